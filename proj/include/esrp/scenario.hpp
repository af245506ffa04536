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

// Scenario files. The native format is a sectioned key-value text:
//
//   [network]
//   nodes = 100
//   placement = "random"
//
//   [node_table]
//   0 = [12.5, 40.0, 7.14]   # x, y, energy in mJ
//
// JSON with the same sections is accepted as an alternative. Every key ends up
// in apply(), which is also the path used by command-line overrides and sweeps.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "esrp/engine.hpp"
#include "esrp/errors.hpp"

namespace esrp {

struct Scenario {
  RunConfig config;
  std::string out_dir = "out";
  bool write_trace = false;
  std::map<NodeId, AttackProfile> attackers;  // explicit attacker table, empty means a random draw
};

namespace scenario_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Drops a trailing '#' comment that is not inside a quoted string.
inline std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

inline std::string unquote(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

inline double as_double(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

inline std::uint64_t as_uint(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

inline bool as_bool(const std::string& key, const std::string& raw) {
  std::string v = unquote(raw);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> as_list(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw ConfigError(key + ": expected a [ ... ] list");
  std::vector<std::string> out;
  const std::string body = v.substr(1, v.size() - 2);
  if (trim(body).empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline AttackKind attack_kind(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  for (AttackKind k : {AttackKind::Compromised, AttackKind::SelectiveForward, AttackKind::BlackHole,
                       AttackKind::SelfIntruder})
    if (v == to_string(k)) return k;
  throw ConfigError(key + ": unknown attack kind '" + v + "'");
}

inline NodeId row_id(const std::string& key, const std::string& id_text) {
  const auto id = as_uint(key, id_text);
  if (id >= kMaxSensorNodes) throw ConfigError(key + ": node id must lie in 0..254");
  return node_id(static_cast<int>(id));
}

}  // namespace scenario_detail

// Short names accepted by overrides and sweeps.
inline std::string canonical_key(const std::string& key) {
  static const std::map<std::string, std::string> kAliases = {
      {"security", "security.enabled"}, {"intruders", "attack.intruders"}, {"seed", "run.seed"},
      {"iterations", "run.iterations"}, {"nodes", "network.nodes"},       {"k", "network.k"},
      {"horizon", "run.horizon"},
  };
  auto it = kAliases.find(key);
  return it == kAliases.end() ? key : it->second;
}

// Sets one dotted key ("section.name") from its textual value.
inline void apply(Scenario& sc, const std::string& dotted, const std::string& raw) {
  using namespace scenario_detail;
  const std::string key = canonical_key(dotted);
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError("unknown key '" + key + "'");
  const std::string section = key.substr(0, dot);
  const std::string name = key.substr(dot + 1);
  RunConfig& c = sc.config;

  if (section == "node_table") {
    const auto cols = as_list(key, raw);
    if (cols.size() != 3) throw ConfigError(key + ": expected [x, y, energy_mJ]");
    const NodeId id = row_id(key, name);
    NodeSpec spec{to_int(id), {as_double(key, cols[0]), as_double(key, cols[1])}, as_double(key, cols[2]) / 1000.0};
    auto it = std::find_if(c.node_table.begin(), c.node_table.end(), [&](const NodeSpec& n) { return n.id == spec.id; });
    if (it != c.node_table.end()) throw ConfigError(key + ": duplicate node id");
    c.node_table.push_back(spec);
    return;
  }
  if (section == "attackers") {
    const NodeId id = row_id(key, name);
    AttackProfile p;
    std::vector<std::string> cols = trim(raw).front() == '[' ? as_list(key, raw) : std::vector<std::string>{raw};
    if (cols.empty() || cols.size() > 2) throw ConfigError(key + ": expected \"kind\" or [\"kind\", parameter]");
    p.kind = attack_kind(key, cols[0]);
    p.activation_time = c.attack.activation_time;
    p.drop_prob = p.kind == AttackKind::BlackHole ? 1.0 : 0.0;
    if (p.kind == AttackKind::SelectiveForward) p.drop_prob = c.attack.drop_prob;
    if (cols.size() == 2) {
      if (p.kind == AttackKind::Compromised) {
        const auto w = as_uint(key, cols[1]);
        if (w > 255) throw ConfigError(key + ": wrong secret must fit in one byte");
        p.wrong_secret = static_cast<std::uint8_t>(w);
      } else if (p.kind == AttackKind::SelectiveForward) {
        p.drop_prob = as_double(key, cols[1]);
      } else {
        throw ConfigError(key + ": this attack kind takes no parameter");
      }
    }
    sc.attackers[id] = p;
    return;
  }

  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"field.width", [&](const std::string& v) { c.field.width = as_double(key, v); }},
      {"field.height", [&](const std::string& v) { c.field.height = as_double(key, v); }},
      {"field.radio_range", [&](const std::string& v) { c.field.radio_range = as_double(key, v); }},
      {"field.sink_range", [&](const std::string& v) { c.field.sink_range = as_double(key, v); }},
      {"field.sink_x",
       [&](const std::string& v) {
         Position p = c.field.sink();
         p.x = as_double(key, v);
         c.field.sink_position = p;
       }},
      {"field.sink_y",
       [&](const std::string& v) {
         Position p = c.field.sink();
         p.y = as_double(key, v);
         c.field.sink_position = p;
       }},
      {"network.nodes", [&](const std::string& v) { c.n_nodes = as_uint(key, v); }},
      {"network.initial_energy", [&](const std::string& v) { c.initial_energy = as_double(key, v); }},
      {"network.placement",
       [&](const std::string& v) {
         const std::string p = unquote(v);
         if (p == "random") c.placement = Placement::Random;
         else if (p == "grid") c.placement = Placement::Grid;
         else throw ConfigError(key + ": expected \"random\" or \"grid\"");
       }},
      {"network.k", [&](const std::string& v) { c.k = as_uint(key, v); }},
      {"run.horizon", [&](const std::string& v) { c.horizon_s = as_double(key, v); }},
      {"run.iterations", [&](const std::string& v) { c.iterations = as_uint(key, v); }},
      {"run.reform_period", [&](const std::string& v) { c.reform_period = as_uint(key, v); }},
      {"run.seed", [&](const std::string& v) { c.seed = as_uint(key, v); }},
      {"run.quorum", [&](const std::string& v) { c.quorum = as_double(key, v); }},
      {"run.slot", [&](const std::string& v) { c.slot_s = as_double(key, v); }},
      {"run.intra_timeout", [&](const std::string& v) { c.intra_timeout_s = as_double(key, v); }},
      {"run.flat_threshold", [&](const std::string& v) { c.flat_threshold_j = as_double(key, v); }},
      {"run.termination_threshold", [&](const std::string& v) { c.termination_threshold_j = as_double(key, v); }},
      {"run.termination_fraction", [&](const std::string& v) { c.termination_fraction = as_double(key, v); }},
      {"run.max_overhead_bytes", [&](const std::string& v) { c.max_overhead_bytes = as_double(key, v); }},
      {"link.rate", [&](const std::string& v) { c.link_rate_bps = as_double(key, v); }},
      {"link.proc_delay", [&](const std::string& v) { c.proc_delay_s = as_double(key, v); }},
      {"link.ack_loss", [&](const std::string& v) { c.ack_loss_rate = as_double(key, v); }},
      {"energy.e_elec", [&](const std::string& v) { c.energy.e_elec = as_double(key, v); }},
      {"energy.e_amp", [&](const std::string& v) { c.energy.e_amp = as_double(key, v); }},
      {"energy.k_data", [&](const std::string& v) { c.energy.k_data = as_double(key, v); }},
      {"energy.k_signal", [&](const std::string& v) { c.energy.k_signal = as_double(key, v); }},
      {"energy.data_rate", [&](const std::string& v) { c.energy.data_rate = as_double(key, v); }},
      {"energy.l_key", [&](const std::string& v) { c.energy.l_key = as_double(key, v); }},
      {"security.enabled",
       [&](const std::string& v) {
         c.security = as_bool(key, v) ? SecurityFeatures{} : SecurityFeatures::none();
       }},
      {"security.mzkp", [&](const std::string& v) { c.security.mzkp = as_bool(key, v); }},
      {"security.promiscuous", [&](const std::string& v) { c.security.promiscuous = as_bool(key, v); }},
      {"security.trapping", [&](const std::string& v) { c.security.trapping = as_bool(key, v); }},
      {"security.mine_detection", [&](const std::string& v) { c.security.mine_detection = as_bool(key, v); }},
      {"security.mzkp_threshold", [&](const std::string& v) { c.thresholds.mzkp = as_double(key, v); }},
      {"security.trap_threshold", [&](const std::string& v) { c.thresholds.trap = as_double(key, v); }},
      {"security.mine_threshold", [&](const std::string& v) { c.thresholds.mine = as_double(key, v); }},
      {"security.dummy_ttl",
       [&](const std::string& v) {
         const auto t = as_uint(key, v);
         if (t > 255) throw ConfigError(key + ": must fit in one byte");
         c.dummy_ttl = static_cast<std::uint8_t>(t);
       }},
      {"attack.intruders", [&](const std::string& v) { c.attack.n_attackers = as_uint(key, v); }},
      {"attack.mix",
       [&](const std::string& v) {
         const auto w = as_list(key, v);
         if (w.size() != 4) throw ConfigError(key + ": expected four weights");
         for (std::size_t i = 0; i < 4; ++i) c.attack.mix.weights[i] = as_double(key, w[i]);
       }},
      {"attack.drop_prob", [&](const std::string& v) { c.attack.drop_prob = as_double(key, v); }},
      {"attack.activation_time", [&](const std::string& v) { c.attack.activation_time = as_double(key, v); }},
      {"output.dir", [&](const std::string& v) { sc.out_dir = unquote(v); }},
      {"output.trace", [&](const std::string& v) { sc.write_trace = as_bool(key, v); }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(raw);
}

// Checks the assembled scenario and folds the attacker table into the config.
inline void finalize(Scenario& sc) {
  RunConfig& c = sc.config;
  if (!sc.attackers.empty()) {
    for (auto& [id, p] : sc.attackers) p.activation_time = c.attack.activation_time;
    AttackAssignment a(sc.attackers.begin(), sc.attackers.end());
    c.attack_override = std::move(a);
  } else {
    c.attack_override.reset();
  }
  std::sort(c.node_table.begin(), c.node_table.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  double w = 0.0;
  for (double x : c.attack.mix.weights) {
    if (x < 0.0) throw ConfigError("attack.mix: weights must be non-negative");
    w += x;
  }
  if (c.attack.n_attackers > 0 && !(w > 0.0)) throw ConfigError("attack.mix: weights sum to zero");
  if (c.attack.drop_prob < 0.0 || c.attack.drop_prob > 1.0) throw ConfigError("attack.drop_prob must lie in [0, 1]");
  c.validate();
  const std::size_t population = c.node_table.empty() ? c.n_nodes : c.node_table.size();
  if (!sc.attackers.empty()) {
    for (const auto& [id, p] : sc.attackers) {
      const bool known = c.node_table.empty()
                             ? static_cast<std::size_t>(to_int(id)) < c.n_nodes
                             : std::any_of(c.node_table.begin(), c.node_table.end(),
                                           [&](const NodeSpec& n) { return n.id == to_int(id); });
      if (!known) throw ConfigError("attackers: node " + std::to_string(to_int(id)) + " is not deployed");
    }
  } else if (c.attack.n_attackers > population) {
    throw ConfigError("attack.intruders exceeds the node count");
  }
}

inline Scenario parse_scenario_text(std::string_view text) {
  Scenario sc;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = scenario_detail::trim(scenario_detail::strip_comment(line));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + "unterminated section header");
      section = scenario_detail::trim(std::string_view(body).substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError(where + "empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = scenario_detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = scenario_detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside any section");
    try {
      apply(sc, section + "." + key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  finalize(sc);
  return sc;
}

namespace scenario_detail {

inline std::string json_value_text(const nlohmann::json& v) {
  if (v.is_string()) return "\"" + v.get<std::string>() + "\"";
  if (v.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_value_text(v[i]);
    return out + "]";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw ConfigError("unsupported JSON value " + v.dump());
}

}  // namespace scenario_detail

inline Scenario parse_scenario_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario JSON must be an object of sections");
  Scenario sc;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError("section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items())
      apply(sc, section + "." + key, scenario_detail::json_value_text(value));
  }
  finalize(sc);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_scenario_json(text);
  return parse_scenario_text(text);
}

// The fully resolved scenario as sections of key/value text, in apply() form.
// Feeding these pairs back through apply() reproduces the configuration.
inline std::vector<std::pair<std::string, std::string>> scenario_entries(const Scenario& sc) {
  const RunConfig& c = sc.config;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };
  std::vector<std::pair<std::string, std::string>> out = {
      {"field.width", num(c.field.width)},
      {"field.height", num(c.field.height)},
      {"field.radio_range", num(c.field.radio_range)},
  };
  if (c.field.sink_range) out.emplace_back("field.sink_range", num(*c.field.sink_range));
  out.emplace_back("field.sink_x", num(c.field.sink().x));
  out.emplace_back("field.sink_y", num(c.field.sink().y));
  if (c.node_table.empty()) {
    out.emplace_back("network.nodes", std::to_string(c.n_nodes));
    out.emplace_back("network.initial_energy", num(c.initial_energy));
    out.emplace_back("network.placement", c.placement == Placement::Grid ? "\"grid\"" : "\"random\"");
  }
  out.insert(out.end(), {
      {"network.k", std::to_string(c.k)},
      {"run.horizon", num(c.horizon_s)},
      {"run.iterations", std::to_string(c.iterations)},
      {"run.reform_period", std::to_string(c.reform_period)},
      {"run.seed", std::to_string(c.seed)},
      {"run.quorum", num(c.quorum)},
      {"run.slot", num(c.slot_s)},
      {"run.intra_timeout", num(c.intra_timeout_s)},
      {"run.flat_threshold", num(c.flat_threshold_j)},
      {"run.termination_threshold", num(c.termination_threshold_j)},
      {"run.termination_fraction", num(c.termination_fraction)},
      {"run.max_overhead_bytes", num(c.max_overhead_bytes)},
      {"link.rate", num(c.link_rate_bps)},
      {"link.proc_delay", num(c.proc_delay_s)},
      {"link.ack_loss", num(c.ack_loss_rate)},
      {"energy.e_elec", num(c.energy.e_elec)},
      {"energy.e_amp", num(c.energy.e_amp)},
      {"energy.k_data", num(c.energy.k_data)},
      {"energy.k_signal", num(c.energy.k_signal)},
      {"energy.data_rate", num(c.energy.data_rate)},
      {"energy.l_key", num(c.energy.l_key)},
      {"security.mzkp", boolean(c.security.mzkp)},
      {"security.promiscuous", boolean(c.security.promiscuous)},
      {"security.trapping", boolean(c.security.trapping)},
      {"security.mine_detection", boolean(c.security.mine_detection)},
      {"security.mzkp_threshold", num(c.thresholds.mzkp)},
      {"security.trap_threshold", num(c.thresholds.trap)},
      {"security.mine_threshold", num(c.thresholds.mine)},
      {"security.dummy_ttl", std::to_string(c.dummy_ttl)},
      {"attack.intruders", std::to_string(c.attack.n_attackers)},
      {"attack.mix", "[" + num(c.attack.mix.weights[0]) + ", " + num(c.attack.mix.weights[1]) + ", " +
                         num(c.attack.mix.weights[2]) + ", " + num(c.attack.mix.weights[3]) + "]"},
      {"attack.drop_prob", num(c.attack.drop_prob)},
      {"attack.activation_time", num(c.attack.activation_time)},
      {"output.dir", "\"" + sc.out_dir + "\""},
      {"output.trace", boolean(sc.write_trace)},
  });
  for (const auto& n : c.node_table)
    out.emplace_back("node_table." + std::to_string(n.id),
                     "[" + num(n.pos.x) + ", " + num(n.pos.y) + ", " + num(n.energy * 1000.0) + "]");
  for (const auto& [id, p] : sc.attackers) {
    std::string v = "[\"" + std::string(to_string(p.kind)) + "\"";
    if (p.kind == AttackKind::Compromised) v += ", " + std::to_string(p.wrong_secret);
    if (p.kind == AttackKind::SelectiveForward) v += ", " + num(p.drop_prob);
    out.emplace_back("attackers." + std::to_string(to_int(id)), v + "]");
  }
  return out;
}

// Renders the scenario back into the native text format.
inline std::string render_scenario_text(const Scenario& sc) {
  std::string out;
  std::string section;
  for (const auto& [key, value] : scenario_entries(sc)) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out += (out.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

}  // namespace esrp
