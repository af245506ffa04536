// Copyright 2026 The ESRP Simulator Authors.
//
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

// esrp: run scenarios, sweep a parameter, inspect plans, and decode packets.
//
// Exit codes: 0 ok, 1 usage, 2 configuration, 3 runtime.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "esrp/esrp.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::string out;
  std::vector<std::string> sets;
  bool trace = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("scenario", o.scenario, "Scenario file (sectioned key-value text or JSON)")->required();
  cmd->add_option("--seed", o.seed, "Override run.seed");
  cmd->add_option("--iterations", o.iterations, "Override run.iterations");
  cmd->add_option("--out", o.out, "Output directory (beats ESRP_OUT and output.dir)");
  cmd->add_option("--set", o.sets, "Override any key, e.g. --set attack.intruders=10")->allow_extra_args(false);
  cmd->add_flag("--trace", o.trace, "Also write trace.jsonl");
}

esrp::Scenario load(const CommonOptions& o) {
  esrp::Scenario sc = esrp::load_scenario(o.scenario);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    esrp::apply(sc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) esrp::apply(sc, "run.seed", std::to_string(*o.seed));
  if (o.iterations) esrp::apply(sc, "run.iterations", std::to_string(*o.iterations));
  if (o.trace) sc.write_trace = true;
  if (const char* env = std::getenv("ESRP_OUT"); env != nullptr && *env != '\0') sc.out_dir = env;
  if (!o.out.empty()) sc.out_dir = o.out;
  esrp::finalize(sc);
  return sc;
}

int cmd_run(const CommonOptions& o) {
  const esrp::Scenario sc = load(o);
  const esrp::RunResult r = esrp::run_simulation(sc.config);
  esrp::write_run_outputs(sc.out_dir, sc, r);
  const esrp::IterationSample* end = r.metrics.last();
  std::printf("wrote %s (iterations %zu, alive %zu, energy %.6f J)\n", sc.out_dir.c_str(), r.metrics.series.size(),
              end != nullptr ? end->alive : r.metrics.initial_alive, end != nullptr ? end->energy_spent_j : 0.0);
  return kExitOk;
}

struct SweepOptions {
  CommonOptions common;
  std::string param;
  std::vector<std::string> values;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  unsigned jobs = 0;
};

struct RunRow {
  std::string value;
  std::uint64_t seed = 0;
  esrp::RunResult result;
};

// Final-state columns summarised per swept value.
struct Column {
  const char* name;
  double (*get)(const esrp::RunResult&);
};

double final_or_zero(const esrp::RunResult& r, double esrp::IterationSample::*field) {
  const auto* e = r.metrics.last();
  return e ? e->*field : 0.0;
}

template <typename T>
double final_count(const esrp::RunResult& r, T esrp::IterationSample::*field) {
  const auto* e = r.metrics.last();
  return e ? static_cast<double>(e->*field) : 0.0;
}

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      {"alive", [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::alive); }},
      {"energy_spent_j", [](const esrp::RunResult& r) { return final_or_zero(r, &esrp::IterationSample::energy_spent_j); }},
      {"delay_ms", [](const esrp::RunResult& r) { return final_or_zero(r, &esrp::IterationSample::delay_ms); }},
      {"overhead_bytes", [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::overhead_bytes); }},
      {"control_packets", [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::control_packets); }},
      {"security_packets",
       [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::security_packets); }},
      {"delivered", [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::delivered); }},
      {"clusters", [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::clusters); }},
      {"blocked", [](const esrp::RunResult& r) { return final_count(r, &esrp::IterationSample::blocked); }},
      {"energy_pct",
       [](const esrp::RunResult& r) {
         return r.metrics.energy_budget_j > 0.0 ? final_or_zero(r, &esrp::IterationSample::energy_spent_j) /
                                                      r.metrics.energy_budget_j * 100.0
                                                : 0.0;
       }},
  };
  return cols;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
  return out;
}

int cmd_sweep(const SweepOptions& o) {
  if (o.values.empty()) throw UsageError("sweep needs at least one value");
  if (o.seeds == 0) throw UsageError("--seeds must be at least 1");
  const esrp::Scenario base = load(o.common);

  // Resolve every scenario up front so configuration errors surface before any run.
  std::vector<std::pair<esrp::Scenario, RunRow>> jobs;
  for (const auto& value : o.values) {
    for (std::size_t i = 0; i < o.seeds; ++i) {
      esrp::Scenario sc = base;
      esrp::apply(sc, o.param, value);
      const std::uint64_t seed = o.seed_base + i;
      esrp::apply(sc, "run.seed", std::to_string(seed));
      esrp::finalize(sc);
      RunRow row;
      row.value = value;
      row.seed = seed;
      jobs.emplace_back(std::move(sc), std::move(row));
    }
  }

  const unsigned workers = std::max(1U, std::min<unsigned>(o.jobs ? o.jobs : std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<std::string> failure;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          auto& [sc, row] = jobs[i];
          row.result = esrp::run_simulation(sc.config);
          const fs::path dir = fs::path(base.out_dir) / "runs" /
                               (safe_name(esrp::canonical_key(o.param)) + "=" + safe_name(row.value)) /
                               ("seed-" + std::to_string(row.seed));
          esrp::write_run_outputs(dir, sc, row.result);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!failure) failure = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) throw std::runtime_error(*failure);

  std::ostringstream runs;
  runs << "param,value,seed";
  for (const auto& c : columns()) runs << ',' << c.name;
  runs << '\n';
  std::ostringstream series;
  series << "param,value,seed," << esrp::kMetricsCsvHeader << '\n';
  std::ostringstream agg;
  agg << "param,value,runs";
  for (const auto& c : columns()) agg << ',' << c.name << "_mean," << c.name << "_stddev";
  agg << '\n';

  const std::string param = esrp::canonical_key(o.param);
  for (const auto& value : o.values) {
    std::vector<const RunRow*> rows;
    for (const auto& [sc, row] : jobs)
      if (row.value == value) rows.push_back(&row);
    agg << param << ',' << value << ',' << rows.size();
    for (const auto& c : columns()) {
      double sum = 0.0;
      for (const auto* r : rows) sum += c.get(r->result);
      const double mean = sum / static_cast<double>(rows.size());
      double ss = 0.0;
      for (const auto* r : rows) ss += (c.get(r->result) - mean) * (c.get(r->result) - mean);
      const double sd = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
      agg << ',' << fmt(mean) << ',' << fmt(sd);
    }
    agg << '\n';
    for (const auto* r : rows) {
      runs << param << ',' << value << ',' << r->seed;
      for (const auto& c : columns()) runs << ',' << fmt(c.get(r->result));
      runs << '\n';
      std::istringstream csv(esrp::metrics_csv(r->result.metrics));
      std::string line;
      std::getline(csv, line);  // header
      while (std::getline(csv, line))
        if (line.rfind("summary", 0) != 0) series << param << ',' << value << ',' << r->seed << ',' << line << '\n';
    }
  }
  const fs::path out(base.out_dir);
  fs::create_directories(out);
  esrp::write_text_file(out / "sweep_aggregate.csv", agg.str());
  esrp::write_text_file(out / "sweep_runs.csv", runs.str());
  esrp::write_text_file(out / "sweep_series.csv", series.str());
  std::printf("wrote %s (%zu runs, %zu aggregate rows)\n", base.out_dir.c_str(), jobs.size(), o.values.size());
  return kExitOk;
}

int cmd_plan(const CommonOptions& o) {
  const esrp::Scenario sc = load(o);
  esrp::Simulation sim(sc.config);
  const esrp::PlanSnapshot snap = sim.formation_preview();
  nlohmann::ordered_json j = esrp::plan_to_json(snap.plan, &snap.keys);
  j["attack_set"] = esrp::attacks_to_json(sim.attacks());
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_codec_dump(const std::string& type, const std::string& hex) {
  const esrp::Bytes bytes = esrp::from_hex(hex);
  if (type == "signal") {
    std::cout << esrp::describe(esrp::decode_signal(bytes)) << '\n';
  } else if (type == "ch") {
    std::cout << esrp::describe(esrp::decode_ch(bytes)) << '\n';
  } else if (type == "cm") {
    std::cout << esrp::describe(esrp::decode_cm(bytes)) << '\n';
  } else {
    throw UsageError("packet type must be signal, ch or cm");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ESRP clustered sensor network simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one scenario and write its outputs");
  add_common(run, run_opts);

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario for every (value, seed) pair and aggregate");
  add_common(sweep, sweep_opts.common);
  sweep->add_option("--param", sweep_opts.param, "Key to vary (dotted key or alias such as security, intruders)")
      ->required();
  sweep->add_option("--values", sweep_opts.values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--seeds", sweep_opts.seeds, "Seeds per value");
  sweep->add_option("--seed-base", sweep_opts.seed_base, "First seed");
  sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads (default: hardware concurrency)");

  CommonOptions plan_opts;
  auto* plan = app.add_subcommand("plan", "Print the t = 0 cluster plan as JSON without simulating");
  add_common(plan, plan_opts);

  auto* codec = app.add_subcommand("codec", "Packet codec utilities");
  codec->require_subcommand(1);
  std::string dump_type;
  std::string dump_hex;
  auto* dump = codec->add_subcommand("dump", "Decode a hex packet and print its fields");
  dump->add_option("type", dump_type, "signal, ch or cm")->required();
  dump->add_option("hex", dump_hex, "Packet bytes as hex")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (plan->parsed()) return cmd_plan(plan_opts);
    if (dump->parsed()) return cmd_codec_dump(dump_type, dump_hex);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const esrp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
