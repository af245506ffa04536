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

#pragma once

// JSON and text renderings of plans, summaries, manifests, traces, and the
// per-node energy ledger, plus the writer that lays them out in a run directory.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "esrp/engine.hpp"
#include "esrp/metrics.hpp"
#include "esrp/scenario.hpp"

namespace esrp {

inline nlohmann::ordered_json plan_to_json(const ClusterPlan& plan, const KeyIssue* keys = nullptr) {
  nlohmann::ordered_json j;
  j["clusters"] = nlohmann::ordered_json::array();
  for (const auto& c : plan.clusters) {
    nlohmann::ordered_json cj;
    cj["ch"] = to_int(c.ch);
    std::vector<int> members;
    for (NodeId m : c.members) members.push_back(to_int(m));
    cj["members"] = members;
    const NodeId up = plan.upstream_of(c.ch);
    cj["upstream"] = up == kSinkId ? nlohmann::ordered_json("sink") : nlohmann::ordered_json(to_int(up));
    if (keys != nullptr) {
      const ChSecurity& s = keys->at(c.ch);
      cj["security_role"] = std::string(to_string(s.role));
      cj["proves_to_sink"] = s.proves_to_sink;
      cj["trap"] = s.trap_enable;
      cj["mine"] = s.mine_enable;
      cj["promiscuous"] = s.promisc_enable;
    }
    j["clusters"].push_back(cj);
  }
  std::vector<int> flat;
  for (NodeId f : plan.flat) flat.push_back(to_int(f));
  j["flat"] = flat;
  j["warnings"] = plan.warnings;
  if (keys != nullptr) j["public_modulus"] = keys->public_n;
  return j;
}

inline nlohmann::ordered_json attacks_to_json(const AttackAssignment& attacks) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [id, p] : attacks) {
    nlohmann::ordered_json a;
    a["node"] = to_int(id);
    a["kind"] = std::string(to_string(p.kind));
    a["activation_time"] = p.activation_time;
    if (p.kind == AttackKind::Compromised) a["wrong_secret"] = p.wrong_secret;
    if (p.kind == AttackKind::SelectiveForward) a["drop_prob"] = p.drop_prob;
    arr.push_back(a);
  }
  return arr;
}

// Resolved configuration grouped by section, loadable as a JSON scenario.
inline nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, value] : scenario_entries(sc)) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = nlohmann::ordered_json::parse(value);
  }
  return j;
}

inline nlohmann::ordered_json manifest_json(const Scenario& sc, const RunResult& r) {
  nlohmann::ordered_json j;
  j["seed"] = sc.config.seed;
  j["config"] = scenario_to_json(sc);
  j["attack_set"] = attacks_to_json(r.attacks);
  return j;
}

inline nlohmann::ordered_json summary_json(const RunResult& r) {
  const MetricsReport& m = r.metrics;
  nlohmann::ordered_json j;
  j["iterations_run"] = m.series.size();
  j["terminated_early"] = m.terminated;
  j["initial_alive"] = m.initial_alive;
  j["initial_clusters"] = m.initial_clusters;
  j["energy_budget_j"] = m.energy_budget_j;
  if (const IterationSample* end = m.last()) {
    j["final"] = {{"alive", end->alive},
                  {"energy_spent_j", end->energy_spent_j},
                  {"delay_ms", end->delay_ms},
                  {"overhead_bytes", end->overhead_bytes},
                  {"control_packets", end->control_packets},
                  {"security_packets", end->security_packets},
                  {"data_packets", end->data_packets},
                  {"generated", end->generated},
                  {"delivered", end->delivered},
                  {"clusters", end->clusters},
                  {"blocked", end->blocked},
                  {"directional_entropy_bits", directional_entropy(end->toward_sink, end->away_from_sink)}};
  }
  try {
    const SummaryPercentages p = summary_percentages(m);
    j["percentages"] = {{"alive_decrease", p.alive_decrease},
                        {"survival", p.survival_pct},
                        {"delay", p.delay_pct},
                        {"energy", p.energy_pct},
                        {"lifetime_decrease", p.lifetime_decrease},
                        {"clusters_retained", p.clusters_retained_pct},
                        {"overhead", p.overhead_pct}};
  } catch (const std::domain_error& e) {
    j["percentages"] = nullptr;
    j["percentages_error"] = e.what();
  }
  std::vector<nlohmann::ordered_json> blocks;
  for (const auto& b : r.blocks) blocks.push_back({{"time", b.time}, {"node", to_int(b.node)}, {"reason", b.reason}});
  j["blocks"] = blocks;
  j["quorum_misses"] = r.quorum_misses;
  j["ledger_conserved"] = r.ledger.conserved();
  return j;
}

inline std::string trace_jsonl(const std::vector<TraceEntry>& trace) {
  std::ostringstream os;
  for (const auto& t : trace) {
    nlohmann::ordered_json j;
    j["t"] = t.time;
    j["kind"] = std::string(to_string(t.kind));
    j["packet"] = std::string(to_string(t.packet));
    j["node"] = to_int(t.node);
    j["peer"] = to_int(t.peer);
    j["bytes"] = t.bytes;
    j["residual_fj"] = t.residual_fj;
    os << j.dump() << '\n';
  }
  return os.str();
}

inline const char* kLedgerCsvHeader = "iteration,node,tx_fj,rx_fj,cpu_fj,mem_fj,radio_idle_fj,sensor_fj,residual_fj";

inline std::string ledger_csv(const std::vector<LedgerRow>& rows) {
  std::ostringstream os;
  os << kLedgerCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.iteration << ',' << to_int(r.node);
    for (auto d : r.debits) os << ',' << d;
    os << ',' << r.residual << '\n';
  }
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Writes manifest.json, metrics.csv, summary.json, ledger.csv, security.log
// and, when asked, trace.jsonl into `dir`.
inline void write_run_outputs(const std::filesystem::path& dir, const Scenario& sc, const RunResult& r) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "manifest.json", manifest_json(sc, r).dump(2) + "\n");
  write_text_file(dir / "metrics.csv", metrics_csv(r.metrics));
  write_text_file(dir / "summary.json", summary_json(r).dump(2) + "\n");
  write_text_file(dir / "ledger.csv", ledger_csv(r.ledger_rows));
  std::string log;
  for (const auto& line : r.security_log) log += line + "\n";
  write_text_file(dir / "security.log", log);
  if (sc.write_trace) write_text_file(dir / "trace.jsonl", trace_jsonl(r.trace));
}

}  // namespace esrp
