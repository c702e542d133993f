/* Copyright 2026 The binconv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line front end: convert, run, profile, sweep, factory, emacs.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "binconv/bench/emacs.h"
#include "binconv/bench/factory.h"
#include "binconv/bench/sweep.h"
#include "binconv/converter/convert.h"
#include "binconv/converter/model_format.h"
#include "binconv/core/error.h"
#include "binconv/graph/serialize.h"
#include "binconv/runtime/interpreter.h"
#include "binconv/runtime/profile.h"

namespace {

using namespace binconv;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("cannot write " + path);
}

int default_threads() {
  if (const char* env = std::getenv("BINCONV_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
    std::cerr << "warning: ignoring BINCONV_THREADS=" << env << "\n";
  }
  return 1;
}

bool is_model_file(const std::vector<uint8_t>& bytes) {
  return bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4,
                                         converter::kModelMagic);
}

// A model file, or a training graph in text form.
graph::Graph load_graph(const std::string& path) {
  const std::vector<uint8_t> bytes = converter::read_file(path);
  if (is_model_file(bytes)) return converter::read_model(bytes);
  return graph::parse_training_graph(std::string(bytes.begin(), bytes.end()));
}

std::vector<FloatTensor> random_inputs(const graph::Graph& g, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<FloatTensor> inputs;
  for (graph::TensorId id : g.inputs) {
    FloatTensor t(g.tensor(id).nhwc());
    for (float& v : t.data) v = normal(rng);
    inputs.push_back(std::move(t));
  }
  return inputs;
}

// [{"shape": [n, h, w, c], "data": [...]}, ...] in graph input order.
std::vector<FloatTensor> read_inputs(const std::string& path) {
  const auto j = nlohmann::json::parse(read_text(path));
  if (!j.is_array()) throw ConfigError("input file must hold an array of tensors");
  std::vector<FloatTensor> inputs;
  for (const auto& t : j) {
    const auto shape = t.at("shape").get<std::vector<int>>();
    if (shape.size() != 4) throw ConfigError("input tensors must have rank 4");
    inputs.emplace_back(Shape{shape[0], shape[1], shape[2], shape[3]},
                        t.at("data").get<std::vector<float>>());
  }
  return inputs;
}

nlohmann::json tensors_json(const std::vector<FloatTensor>& tensors) {
  nlohmann::json out = nlohmann::json::array();
  for (const FloatTensor& t : tensors) {
    out.push_back({{"shape", {t.shape.batch, t.shape.height, t.shape.width, t.shape.channels}},
                   {"data", t.data}});
  }
  return out;
}

std::string report_csv(const std::vector<converter::PassReport>& reports) {
  std::ostringstream os;
  os << "pass,nodes_removed,nodes_added,nodes_modified,skipped,equivalent,max_abs_error,probes\n";
  char buf[32];
  for (const auto& r : reports) {
    os << r.pass << ',' << r.nodes_removed << ',' << r.nodes_added << ',' << r.nodes_modified
       << ',' << r.skipped.size() << ',';
    if (r.equivalent) {
      std::snprintf(buf, sizeof(buf), "%.6g", r.max_abs_error);
      os << (*r.equivalent ? "yes" : "no") << ',' << buf << ',' << r.probes;
    } else {
      os << ",,";
    }
    os << '\n';
  }
  return os.str();
}

std::string report_table(const std::vector<converter::PassReport>& reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-20s %8s %6s %9s %8s %s\n", "Pass", "Removed", "Added",
                "Modified", "Skipped", "Verified");
  os << line;
  for (const auto& r : reports) {
    std::string verified = "-";
    if (r.equivalent) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s (max err %.3g, %d probes)",
                    *r.equivalent ? "yes" : "no", r.max_abs_error, r.probes);
      verified = buf;
    }
    std::snprintf(line, sizeof(line), "%-20s %8d %6d %9d %8zu %s\n", r.pass.c_str(),
                  r.nodes_removed, r.nodes_added, r.nodes_modified, r.skipped.size(),
                  verified.c_str());
    os << line;
    for (const std::string& s : r.skipped) os << "    skipped " << s << '\n';
  }
  return os.str();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad integer list '" + text + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bitpacked binary network converter, runtime and benchmarks"};
  app.require_subcommand(1);
  const int env_threads = default_threads();

  // convert
  auto* convert = app.add_subcommand("convert", "Convert a training graph into a model file");
  std::string convert_in, convert_out, convert_report, inject_fault;
  bool verify = false;
  int verify_probes = 16;
  int convert_threads = env_threads;
  convert->add_option("input", convert_in, "Training graph (or model file)")->required();
  convert->add_option("output", convert_out, "Model file to write")->required();
  convert->add_flag("--verify", verify, "Check each pass against the reference evaluator");
  convert->add_option("--probes", verify_probes, "Random inputs per verified pass")
      ->check(CLI::PositiveNumber);
  convert->add_option("--inject-fault", inject_fault, "Test hook: corrupt the named pass");
  convert->add_option("--report", convert_report, "Write the pass report as CSV");
  convert->add_option("--threads", convert_threads, "Worker threads for verification")
      ->check(CLI::PositiveNumber);

  // run
  auto* run = app.add_subcommand("run", "Execute a model once");
  std::string run_model, run_input, run_output;
  int run_threads = env_threads;
  uint64_t run_seed = 1;
  run->add_option("model", run_model, "Model file")->required();
  run->add_option("--input", run_input, "JSON array of input tensors (default: random)");
  run->add_option("--output", run_output, "Write outputs as JSON ('-' for stdout)");
  run->add_option("--seed", run_seed, "Seed for random inputs");
  run->add_option("--threads", run_threads, "Kernel threads")->check(CLI::PositiveNumber);

  // profile
  auto* prof = app.add_subcommand("profile", "Per-op latency profile of a model");
  std::string prof_model, prof_csv;
  int prof_runs = 20, prof_warmup = 2, prof_threads = env_threads;
  prof->add_option("model", prof_model, "Model file")->required();
  prof->add_option("--runs", prof_runs, "Timed runs")->check(CLI::PositiveNumber);
  prof->add_option("--warmup", prof_warmup, "Untimed runs first")->check(CLI::NonNegativeNumber);
  prof->add_option("--csv", prof_csv, "Write per-op records as CSV ('-' for stdout)");
  prof->add_option("--threads", prof_threads, "Kernel threads")->check(CLI::PositiveNumber);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Binary vs float convolution latency sweep");
  std::string sweep_config, sweep_out;
  int sweep_threads = env_threads;
  sweep->add_option("config", sweep_config, "JSON sweep config (default: the full grid)");
  sweep->add_option("--out", sweep_out, "Write the per-config CSV");
  auto* sweep_threads_opt =
      sweep->add_option("--threads", sweep_threads, "Kernel threads")->check(CLI::PositiveNumber);

  // factory
  auto* factory = app.add_subcommand("factory", "Write a random-weight training graph");
  factory->require_subcommand(1);
  factory->fallthrough();
  std::string factory_out = "-";
  uint64_t factory_seed = 1;
  factory->add_option("--out", factory_out, "Output path ('-' for stdout)");
  factory->add_option("--seed", factory_seed, "Weight seed");

  auto* quicknet = factory->add_subcommand("quicknet", "Residual binary network");
  std::string layers = "4,4,4,4", filters = "32,64,256,512";
  bench::QuickNetOptions qn;
  quicknet->add_option("--layers", layers, "N: layers per section, comma separated");
  quicknet->add_option("--filters", filters, "k: filters per section, comma separated");
  quicknet->add_option("--input-size", qn.input_size, "Input height and width");
  quicknet->add_option("--classes", qn.classes, "Output classes");

  auto* shortcut = factory->add_subcommand("shortcut", "Shortcut latency study block");
  std::string variant = "A";
  bench::ShortcutStudyOptions so;
  shortcut->add_option("variant", variant, "A, B or C")->required();
  shortcut->add_option("--channels", so.channels, "Channels of the regular blocks");
  shortcut->add_option("--spatial", so.spatial, "Input height and width");
  shortcut->add_option("--blocks", so.regular_blocks, "Regular blocks before downsampling");

  auto* conv = factory->add_subcommand("conv", "Single convolution");
  bench::SingleConvOptions co;
  std::string precision = "binary";
  conv->add_option("--height", co.height, "Input height");
  conv->add_option("--width", co.width, "Input width");
  conv->add_option("--in-channels", co.in_channels, "Input channels");
  conv->add_option("--out-channels", co.out_channels, "Filters");
  conv->add_option("--kernel", co.kernel, "Square kernel size");
  conv->add_option("--stride", co.stride, "Stride in both directions");
  conv->add_option("--padding", co.padding, "valid, one or zero");
  conv->add_option("--precision", precision, "binary or float");
  conv->add_flag("--relu", co.relu, "ReLU after the conv");
  conv->add_flag("--batch-norm", co.batch_norm, "BatchNorm after the conv");
  conv->add_flag("--binary-output", co.binary_output, "Trailing Sign");
  conv->add_flag("--maxpool", co.maxpool_before, "Max pooling before the input Sign");

  // emacs
  auto* emacs = app.add_subcommand("emacs", "MAC and eMAC counts of models");
  std::vector<std::string> emacs_models;
  double factor = bench::kDefaultEMacFactor;
  int emacs_runs = 10, emacs_warmup = 2, emacs_threads = env_threads;
  bool no_latency = false;
  std::string emacs_csv;
  emacs->add_option("models", emacs_models, "Model files")->required();
  emacs->add_option("--factor", factor, "Binary MACs per float MAC (15; 17 for Cortex-A72)");
  emacs->add_option("--runs", emacs_runs, "Timed runs per model")->check(CLI::PositiveNumber);
  emacs->add_option("--warmup", emacs_warmup, "Untimed runs first")->check(CLI::NonNegativeNumber);
  emacs->add_option("--threads", emacs_threads, "Kernel threads")->check(CLI::PositiveNumber);
  emacs->add_flag("--no-latency", no_latency, "Skip latency measurement");
  emacs->add_option("--csv", emacs_csv, "Write rows as CSV ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (convert->parsed()) {
      converter::ConvertOptions opts;
      opts.verify = verify;
      opts.verify_options.probes = verify_probes;
      opts.verify_options.threads = convert_threads;
      opts.inject_fault = inject_fault;
      const auto result = converter::convert(load_graph(convert_in), opts);
      converter::write_file(convert_out, result.model);
      if (!convert_report.empty()) write_text(convert_report, report_csv(result.reports));
      std::cout << report_table(result.reports);
      std::cout << "wrote " << convert_out << " (" << result.model.size() << " bytes, "
                << result.graph.nodes.size() << " ops)\n";
    } else if (run->parsed()) {
      const auto plan = runtime::load_model(converter::read_file(run_model));
      const auto inputs =
          run_input.empty() ? random_inputs(plan.graph(), run_seed) : read_inputs(run_input);
      const auto outputs = plan.execute(inputs, run_threads);
      if (!run_output.empty()) write_text(run_output, tensors_json(outputs).dump() + "\n");
      if (run_output != "-") {
        for (size_t k = 0; k < outputs.size(); ++k) {
          double sum = 0.0;
          for (float v : outputs[k].data) sum += v;
          std::printf("output %zu: shape %s, sum %.6f\n", k, outputs[k].shape.str().c_str(), sum);
        }
      }
    } else if (prof->parsed()) {
      const auto plan = runtime::load_model(converter::read_file(prof_model));
      const auto inputs = random_inputs(plan.graph(), 1);
      const auto p = runtime::profile(plan, inputs, prof_runs, prof_warmup, prof_threads);
      if (!prof_csv.empty()) write_text(prof_csv, runtime::profile_csv(p));
      if (prof_csv != "-") {
        std::cout << runtime::format_breakdown(runtime::category_breakdown(p));
        std::printf("ops %zu, runs %d, warmup %d, end-to-end median %.1f us\n",
                    p.records.size(), p.runs, p.warmup, p.end_to_end_median_us);
      }
    } else if (sweep->parsed()) {
      bench::SweepConfig cfg;
      if (!sweep_config.empty()) cfg = bench::parse_sweep_config(read_text(sweep_config));
      if (sweep_threads_opt->count() > 0 || sweep_config.empty()) cfg.threads = sweep_threads;
      const auto result = bench::run_sweep(cfg, [](const bench::SweepRow& r) {
        std::fprintf(stderr, "  %3dx%-3d c=%-4d k=%d done\n", r.spatial, r.spatial, r.channels,
                     r.kernel);
      });
      if (!sweep_out.empty()) write_text(sweep_out, bench::sweep_csv(result));
      if (sweep_out != "-") std::cout << bench::format_sweep_summary(result);
    } else if (factory->parsed()) {
      graph::Graph g;
      if (quicknet->parsed()) {
        qn.layers = parse_int_list(layers);
        qn.filters = parse_int_list(filters);
        g = bench::quicknet_like(qn, factory_seed);
      } else if (shortcut->parsed()) {
        g = bench::shortcut_study(bench::shortcut_variant_from_string(variant), so, factory_seed);
      } else {
        co.precision = bench::precision_from_string(precision);
        g = bench::single_conv(co, factory_seed);
      }
      write_text(factory_out, graph::serialize(g));
    } else if (emacs->parsed()) {
      std::vector<bench::EMacRow> rows;
      for (const std::string& path : emacs_models) {
        const auto plan = runtime::load_model(converter::read_file(path));
        bench::EMacRow row = bench::emac_row(path, plan, factor);
        if (!no_latency) {
          const auto p = runtime::profile(plan, random_inputs(plan.graph(), 1), emacs_runs,
                                          emacs_warmup, emacs_threads);
          row.latency_us = p.end_to_end_median_us;
        }
        rows.push_back(row);
      }
      if (!emacs_csv.empty()) write_text(emacs_csv, bench::emacs_csv(rows));
      if (emacs_csv != "-") std::cout << bench::format_emacs(rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
