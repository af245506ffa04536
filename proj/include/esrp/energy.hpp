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

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

#include "esrp/errors.hpp"
#include "esrp/topology.hpp"

namespace esrp {

// First-order radio model constants. Bits and bit rates are doubles so a
// scenario may scale them freely.
struct EnergyParams {
  double e_elec = 50e-9;   // J/bit, modulation/demodulation and CPU per bit
  double e_amp = 100e-12;  // J/bit/m^2, transmit amplifier
  double k_data = 1000.0;  // bits per data message
  double k_signal = 64.0;  // bits per signal message
  double data_rate = 1000.0;  // bits/s, sets the radio/sensor baseline
  double l_key = 8.0;         // bits per key entry

  void validate() const {
    if (!(e_elec > 0.0) || !(e_amp > 0.0) || !(k_data > 0.0) || !(k_signal > 0.0) || !(data_rate > 0.0) ||
        !(l_key > 0.0))
      throw ConfigError("energy parameters must all be strictly positive");
  }
};

inline double tx_energy(double k, double d, const EnergyParams& p) { return p.e_elec * k + p.e_amp * k * d * d; }

inline double rx_energy(double k, const EnergyParams& p) { return p.e_elec * k; }

inline double cpu_energy(double k, const EnergyParams& p) { return p.e_elec * k; }

enum class MemAccess : std::uint8_t { Read, Write };

// Reads cost twice the per-bit CPU energy, writes half of it.
inline double mem_energy(MemAccess kind, double l, const EnergyParams& p) {
  return kind == MemAccess::Read ? 2.0 * p.e_elec * l : 0.5 * p.e_elec * l;
}

struct BaselinePower {
  double radio = 0.0;   // J/s while awake
  double sensor = 0.0;  // J/s while sensing
};

inline BaselinePower baseline_energy_per_second(const EnergyParams& p) {
  const double radio = p.e_elec * p.data_rate;
  return {radio, radio * 2.0 / 3.0};
}

struct NodeEnergyBreakdown {
  double transceiver = 0.0;
  double cpu = 0.0;
  double sensor = 0.0;

  double total() const { return transceiver + cpu + sensor; }
};

// Energy of one node exchanging one data and one signal message each way at
// distance d, processing both, touching one key entry, and sensing for 1 s.
inline NodeEnergyBreakdown node_message_breakdown(const EnergyParams& p, double d) {
  NodeEnergyBreakdown b;
  b.transceiver = tx_energy(p.k_data, d, p) + tx_energy(p.k_signal, d, p) + rx_energy(p.k_data, p) +
                  rx_energy(p.k_signal, p);
  b.cpu = cpu_energy(p.k_data, p) + cpu_energy(p.k_signal, p) + mem_energy(MemAccess::Read, p.l_key, p) +
          mem_energy(MemAccess::Write, p.l_key, p);
  b.sensor = baseline_energy_per_second(p).sensor;
  return b;
}

inline double node_message_energy(const EnergyParams& p, double d) { return node_message_breakdown(p, d).total(); }

// Network-wide consumption when every node spends node_message_energy each
// second for `seconds`.
inline double network_energy_budget(const EnergyParams& p, double d, std::size_t n_nodes, double seconds) {
  return node_message_energy(p, d) * static_cast<double>(n_nodes) * seconds;
}

enum class EnergyCategory : std::uint8_t { Tx, Rx, Cpu, Mem, RadioIdle, Sensor };

inline constexpr std::size_t kEnergyCategories = 6;

inline constexpr std::string_view to_string(EnergyCategory c) {
  switch (c) {
    case EnergyCategory::Tx: return "tx";
    case EnergyCategory::Rx: return "rx";
    case EnergyCategory::Cpu: return "cpu";
    case EnergyCategory::Mem: return "mem";
    case EnergyCategory::RadioIdle: return "radio_idle";
    case EnergyCategory::Sensor: return "sensor";
  }
  return "unknown";
}

// Per-node debits by category. Amounts are held in integer femtojoules so that
// initial - residual == sum of debits holds exactly.
class EnergyLedger {
 public:
  using Femtojoules = std::int64_t;

  static Femtojoules to_fj(double joules) { return static_cast<Femtojoules>(std::llround(joules * 1e15)); }
  static double to_joules(Femtojoules fj) { return static_cast<double>(fj) * 1e-15; }

  struct Account {
    Femtojoules initial = 0;
    Femtojoules residual = 0;
    std::array<Femtojoules, kEnergyCategories> debits{};

    Femtojoules spent() const { return std::accumulate(debits.begin(), debits.end(), Femtojoules{0}); }
  };

  void open(NodeId id, double initial_joules) {
    Account a;
    a.initial = to_fj(initial_joules);
    a.residual = a.initial;
    accounts_[id] = a;
  }

  bool has(NodeId id) const { return accounts_.count(id) != 0; }

  // Debits up to the node's residual and returns the joules actually taken.
  double debit(NodeId id, EnergyCategory category, double joules) {
    if (joules < 0.0) throw std::invalid_argument("negative energy debit");
    Account& a = mutable_account(id);
    const Femtojoules want = to_fj(joules);
    const Femtojoules take = want < a.residual ? want : a.residual;
    a.residual -= take;
    a.debits[static_cast<std::size_t>(category)] += take;
    return to_joules(take);
  }

  double residual(NodeId id) const { return to_joules(account(id).residual); }
  Femtojoules residual_fj(NodeId id) const { return account(id).residual; }
  bool depleted(NodeId id) const { return account(id).residual <= 0; }

  const Account& account(NodeId id) const {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw std::out_of_range("no ledger account for node " + std::to_string(to_int(id)));
    return it->second;
  }

  const std::map<NodeId, Account>& accounts() const { return accounts_; }

  Femtojoules total_initial_fj() const { return sum([](const Account& a) { return a.initial; }); }
  Femtojoules total_residual_fj() const { return sum([](const Account& a) { return a.residual; }); }
  Femtojoules total_debits_fj() const { return sum([](const Account& a) { return a.spent(); }); }

  double total_spent() const { return to_joules(total_debits_fj()); }

  bool conserved() const { return total_initial_fj() - total_residual_fj() == total_debits_fj(); }

 private:
  Account& mutable_account(NodeId id) {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw std::out_of_range("no ledger account for node " + std::to_string(to_int(id)));
    return it->second;
  }

  template <typename F>
  Femtojoules sum(F field) const {
    Femtojoules total = 0;
    for (const auto& [id, a] : accounts_) total += field(a);
    return total;
  }

  std::map<NodeId, Account> accounts_;
};

}  // namespace esrp
