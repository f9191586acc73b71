// Copyright 2026 The DiscoBox Engine Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end over the C API.
//
// Exit codes: 0 success, 2 input error, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "discobox/discobox.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

// Thrown to unwind with a status already reported.
struct Failure {
  int exit_code;
};

void Check(dbx_status status, const std::string& context) {
  if (status == DBX_OK) return;
  std::cerr << "discobox " << context << ": " << dbx_last_error() << "\n";
  throw Failure{dbx_status_is_numeric(status) ? kExitNumeric : kExitInput};
}

struct BundleDeleter {
  void operator()(dbx_bundle* b) const { dbx_bundle_destroy(b); }
};
struct ConfigDeleter {
  void operator()(dbx_config* c) const { dbx_config_destroy(c); }
};
struct BankDeleter {
  void operator()(dbx_bank* b) const { dbx_bank_destroy(b); }
};
struct StringDeleter {
  void operator()(char* s) const { dbx_string_free(s); }
};
using BundlePtr = std::unique_ptr<dbx_bundle, BundleDeleter>;
using ConfigPtr = std::unique_ptr<dbx_config, ConfigDeleter>;
using BankPtr = std::unique_ptr<dbx_bank, BankDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

BundlePtr ReadBundle(const std::string& path) {
  dbx_bundle* b = nullptr;
  Check(dbx_bundle_read(path.c_str(), &b), "reading " + path);
  return BundlePtr(b);
}

void WriteBundle(const dbx_bundle* bundle, const std::string& path) {
  Check(dbx_bundle_write(bundle, path.c_str()), "writing " + path);
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "discobox: cannot open " << path << "\n";
    throw Failure{kExitInput};
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "discobox: cannot write " << path << "\n";
    throw Failure{kExitInput};
  }
}

// Shared --config / --set / --threads handling.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> overrides;
  int threads = 0;

  void Attach(CLI::App* cmd, bool with_threads) {
    cmd->add_option("--config", file, "key=value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "override a config key (key=value)");
    if (with_threads) cmd->add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
  }

  ConfigPtr Build() const {
    dbx_config* raw = nullptr;
    Check(dbx_config_create(&raw), "config");
    ConfigPtr config(raw);
    if (!file.empty()) Check(dbx_config_load_file(raw, file.c_str()), "config " + file);
    if (threads == 0) {
      if (const char* env = std::getenv("DISCOBOX_THREADS"); env != nullptr && *env != '\0') {
        Check(dbx_config_set(raw, "threads", env), "DISCOBOX_THREADS");
      }
    }
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "discobox: --set expects key=value, got '" << kv << "'\n";
        throw Failure{kExitInput};
      }
      Check(dbx_config_set(raw, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
    }
    if (threads > 0) Check(dbx_config_set(raw, "threads", std::to_string(threads).c_str()), "--threads");
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DiscoBox structured-teacher engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dbx_version());

  ConfigFlags refine_cfg;
  std::string refine_input, refine_output, refine_bank, refine_bank_out;
  CLI::App* refine = app.add_subcommand("refine", "refine RoI masks with the structured teacher");
  refine->add_option("--input", refine_input, "input object bundle")->required();
  refine->add_option("--output", refine_output, "output bundle")->required();
  refine->add_option("--bank", refine_bank, "memory bank snapshot directory");
  refine->add_option("--bank-out", refine_bank_out, "write the updated bank here");
  refine_cfg.Attach(refine, true);

  ConfigFlags match_cfg;
  std::string match_a, match_b, match_out;
  CLI::App* match = app.add_subcommand("match", "dense correspondence between two RoIs");
  match->add_option("--a", match_a, "source RoI bundle")->required();
  match->add_option("--b", match_b, "target RoI bundle")->required();
  match->add_option("--out", match_out, "output bundle")->required();
  match_cfg.Attach(match, false);

  std::string eval_pred, eval_gt, eval_report;
  CLI::App* eval = app.add_subcommand("eval-corr", "multi-object correspondence AP");
  eval->add_option("--pred", eval_pred, "prediction JSON")->required();
  eval->add_option("--gt", eval_gt, "annotation JSON")->required();
  eval->add_option("--report", eval_report, "report path (stdout when omitted)");

  ConfigFlags bench_cfg;
  int bench_roi = 32;
  int bench_pairs = 10;
  CLI::App* bench = app.add_subcommand("bench", "time the numeric kernels");
  bench->add_option("--roi-size", bench_roi, "RoI side length");
  bench->add_option("--pairs", bench_pairs, "synthetic pairs");
  bench_cfg.Attach(bench, false);

  CLI::App* gen = app.add_subcommand("gen", "write synthetic fixtures");
  gen->require_subcommand(1);
  std::uint64_t gen_seed = 0;
  int shape_count = 2, shape_size = 16;
  double shape_noise = 0.1;
  std::string shape_out, shape_truth;
  CLI::App* gen_shapes = gen->add_subcommand("shapes", "two-color blob RoIs");
  gen_shapes->add_option("--seed", gen_seed);
  gen_shapes->add_option("--count", shape_count);
  gen_shapes->add_option("--size", shape_size);
  gen_shapes->add_option("--noise", shape_noise, "mask flip rate");
  gen_shapes->add_option("--out", shape_out)->required();
  gen_shapes->add_option("--truth-out", shape_truth);

  int pair_size = 16;
  std::string pair_a, pair_b;
  CLI::App* gen_pair = gen->add_subcommand("pair", "RoI pair related by a known shift");
  gen_pair->add_option("--seed", gen_seed);
  gen_pair->add_option("--size", pair_size);
  gen_pair->add_option("--out-a", pair_a)->required();
  gen_pair->add_option("--out-b", pair_b)->required();

  int metric_pairs = 10;
  double metric_noise = 1.0;
  std::string metric_gt, metric_pred;
  CLI::App* gen_metric = gen->add_subcommand("metric", "correspondence annotations + predictions");
  gen_metric->add_option("--seed", gen_seed);
  gen_metric->add_option("--pairs", metric_pairs);
  gen_metric->add_option("--noise", metric_noise, "prediction noise in pixels");
  gen_metric->add_option("--gt-out", metric_gt)->required();
  gen_metric->add_option("--pred-out", metric_pred)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (refine->parsed()) {
      ConfigPtr config = refine_cfg.Build();
      BundlePtr input = ReadBundle(refine_input);
      BankPtr bank;
      dbx_bank* raw_bank = nullptr;
      if (refine_bank.empty()) {
        Check(dbx_bank_create(&raw_bank), "bank");
      } else {
        Check(dbx_bank_load(refine_bank.c_str(), &raw_bank), "bank " + refine_bank);
      }
      bank.reset(raw_bank);
      dbx_bundle* raw_out = nullptr;
      Check(dbx_refine(input.get(), bank.get(), config.get(), &raw_out), "refine");
      BundlePtr output(raw_out);
      WriteBundle(output.get(), refine_output);
      if (!refine_bank_out.empty()) {
        Check(dbx_bank_save(bank.get(), refine_bank_out.c_str()), "bank " + refine_bank_out);
      }
    } else if (match->parsed()) {
      ConfigPtr config = match_cfg.Build();
      BundlePtr a = ReadBundle(match_a);
      BundlePtr b = ReadBundle(match_b);
      dbx_bundle* raw_out = nullptr;
      Check(dbx_match(a.get(), b.get(), config.get(), &raw_out), "match");
      BundlePtr output(raw_out);
      WriteBundle(output.get(), match_out);
    } else if (eval->parsed()) {
      const std::string pred = ReadText(eval_pred);
      const std::string gt = ReadText(eval_gt);
      char* raw = nullptr;
      Check(dbx_eval_corr(pred.c_str(), gt.c_str(), &raw), "eval-corr");
      StringPtr report(raw);
      WriteText(eval_report, report.get());
    } else if (bench->parsed()) {
      ConfigPtr config = bench_cfg.Build();
      char* raw = nullptr;
      Check(dbx_bench(config.get(), bench_roi, bench_pairs, &raw), "bench");
      StringPtr report(raw);
      std::cout << report.get();
    } else if (gen_shapes->parsed()) {
      dbx_bundle* objects = nullptr;
      dbx_bundle* truth = nullptr;
      Check(dbx_gen_shapes(gen_seed, shape_count, shape_size, shape_noise, &objects, &truth),
            "gen shapes");
      BundlePtr o(objects), t(truth);
      WriteBundle(o.get(), shape_out);
      if (!shape_truth.empty()) WriteBundle(t.get(), shape_truth);
    } else if (gen_pair->parsed()) {
      dbx_bundle* a = nullptr;
      dbx_bundle* b = nullptr;
      Check(dbx_gen_permuted_pair(gen_seed, pair_size, &a, &b), "gen pair");
      BundlePtr pa(a), pb(b);
      WriteBundle(pa.get(), pair_a);
      WriteBundle(pb.get(), pair_b);
    } else if (gen_metric->parsed()) {
      char* gt = nullptr;
      char* pred = nullptr;
      Check(dbx_gen_metric_fixture(gen_seed, metric_pairs, metric_noise, &gt, &pred), "gen metric");
      StringPtr g(gt), p(pred);
      WriteText(metric_gt, g.get());
      WriteText(metric_pred, p.get());
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitOk;
}
