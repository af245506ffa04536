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

#include <gtest/gtest.h>

#include "esrp/energy.hpp"

namespace esrp {
namespace {

constexpr double kMicro = 1e-6;

TEST(TxEnergy, DataMessageAtFiftyMetres) {
  EXPECT_NEAR(tx_energy(1000, 50, EnergyParams{}), 300 * kMicro, 1e-15);
}

TEST(TxEnergy, SignalMessageAtFiftyMetres) {
  EXPECT_NEAR(tx_energy(64, 50, EnergyParams{}), 19.2 * kMicro, 1e-15);
}

TEST(TxEnergy, ZeroBitsCostNothing) {
  EXPECT_EQ(tx_energy(0, 50, EnergyParams{}), 0.0);
  EXPECT_EQ(tx_energy(0, 0, EnergyParams{}), 0.0);
}

TEST(TxEnergy, MonotoneInBitsAndDistance) {
  const EnergyParams p;
  double prev = -1.0;
  for (double k = 0; k <= 2000; k += 50) {
    const double e = tx_energy(k, 30, p);
    EXPECT_GE(e, prev);
    prev = e;
  }
  prev = -1.0;
  for (double d = 0; d <= 500; d += 7) {
    const double e = tx_energy(1000, d, p);
    EXPECT_GE(e, prev);
    prev = e;
  }
}

TEST(TxEnergy, AtZeroDistanceEqualsReceive) {
  const EnergyParams p;
  for (double k : {0.0, 1.0, 64.0, 1000.0}) EXPECT_EQ(tx_energy(k, 0, p), rx_energy(k, p));
}

TEST(RxEnergy, DataMessage) { EXPECT_NEAR(rx_energy(1000, EnergyParams{}), 50 * kMicro, 1e-15); }

TEST(RxEnergy, SignalMessageExactAndNearRoundedFigure) {
  const double e = rx_energy(64, EnergyParams{});
  EXPECT_NEAR(e, 3.2 * kMicro, 1e-15);
  EXPECT_NEAR(e, 3.0 * kMicro, 0.5 * kMicro);
}

TEST(RxEnergy, ZeroBits) { EXPECT_EQ(rx_energy(0, EnergyParams{}), 0.0); }

TEST(CpuEnergy, Values) {
  const EnergyParams p;
  EXPECT_NEAR(cpu_energy(1000, p), 50 * kMicro, 1e-15);
  EXPECT_NEAR(cpu_energy(64, p), 3.2 * kMicro, 1e-15);
  EXPECT_EQ(cpu_energy(0, p), 0.0);
}

TEST(MemEnergy, ReadAndWriteOfOneKey) {
  const EnergyParams p;
  EXPECT_NEAR(mem_energy(MemAccess::Read, 8, p), 0.8 * kMicro, 1e-15);
  EXPECT_NEAR(mem_energy(MemAccess::Write, 8, p), 0.2 * kMicro, 1e-15);
  EXPECT_EQ(mem_energy(MemAccess::Read, 0, p), 0.0);
  EXPECT_EQ(mem_energy(MemAccess::Write, 0, p), 0.0);
}

TEST(Baseline, Defaults) {
  const BaselinePower b = baseline_energy_per_second(EnergyParams{});
  EXPECT_NEAR(b.radio, 50 * kMicro, 1e-15);
  EXPECT_NEAR(b.sensor, 100.0 / 3.0 * kMicro, 1e-15);
}

TEST(Baseline, ZeroDataRate) {
  EnergyParams p;
  p.data_rate = 0;
  const BaselinePower b = baseline_energy_per_second(p);
  EXPECT_EQ(b.radio, 0.0);
  EXPECT_EQ(b.sensor, 0.0);
}

TEST(NodeMessageEnergy, ComponentsFrozen) {
  const NodeEnergyBreakdown b = node_message_breakdown(EnergyParams{}, 50);
  EXPECT_NEAR(b.transceiver, 372.4 * kMicro, 1e-12);
  EXPECT_NEAR(b.cpu, 54.2 * kMicro, 1e-12);
  EXPECT_NEAR(b.sensor, 33.3333333333 * kMicro, 1e-12);
  EXPECT_NEAR(b.total(), 459.9333333333 * kMicro, 1e-12);
}

TEST(NodeMessageEnergy, WithinToleranceOfRoundedFigures) {
  const NodeEnergyBreakdown b = node_message_breakdown(EnergyParams{}, 50);
  EXPECT_NEAR(b.transceiver, 372 * kMicro, 0.5 * kMicro);
  EXPECT_NEAR(b.total(), 459 * kMicro, 1.5 * kMicro);
  EXPECT_EQ(node_message_energy(EnergyParams{}, 50), b.total());
}

TEST(NetworkBudget, ExactArithmeticFrozen) {
  // 459.933 uJ x 100 nodes x 3600 s.
  EXPECT_NEAR(network_energy_budget(EnergyParams{}, 50, 100, 1), 0.0459933333, 1e-9);
  EXPECT_NEAR(network_energy_budget(EnergyParams{}, 50, 100, 3600), 165.576, 1e-6);
}

TEST(EnergyParams, RejectsNonPositive) {
  EnergyParams p;
  EXPECT_NO_THROW(p.validate());
  p.e_amp = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = EnergyParams{};
  p.k_signal = -1;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(EnergyLedger, ConservesExactly) {
  EnergyLedger l;
  l.open(node_id(1), 2.0);
  l.open(node_id(2), 0.001);
  l.debit(node_id(1), EnergyCategory::Tx, 3e-4);
  l.debit(node_id(1), EnergyCategory::Rx, 5e-5);
  l.debit(node_id(2), EnergyCategory::Sensor, 1.0 / 3.0 * 1e-4);
  for (int i = 0; i < 1000; ++i) l.debit(node_id(1), EnergyCategory::Cpu, 3.2e-6);
  EXPECT_TRUE(l.conserved());
  EXPECT_EQ(l.total_initial_fj() - l.total_residual_fj(), l.total_debits_fj());
}

TEST(EnergyLedger, DebitClampsAtResidual) {
  EnergyLedger l;
  l.open(node_id(0), 1e-3);
  const double taken = l.debit(node_id(0), EnergyCategory::Tx, 5e-3);
  EXPECT_DOUBLE_EQ(taken, 1e-3);
  EXPECT_TRUE(l.depleted(node_id(0)));
  EXPECT_EQ(l.residual(node_id(0)), 0.0);
  EXPECT_EQ(l.debit(node_id(0), EnergyCategory::Tx, 1e-3), 0.0);
  EXPECT_TRUE(l.conserved());
}

TEST(EnergyLedger, CategoriesAccumulateSeparately) {
  EnergyLedger l;
  l.open(node_id(3), 1.0);
  l.debit(node_id(3), EnergyCategory::Mem, 0.25);
  l.debit(node_id(3), EnergyCategory::Mem, 0.25);
  l.debit(node_id(3), EnergyCategory::RadioIdle, 0.125);
  const auto& a = l.account(node_id(3));
  EXPECT_EQ(a.debits[static_cast<std::size_t>(EnergyCategory::Mem)], EnergyLedger::to_fj(0.5));
  EXPECT_EQ(a.debits[static_cast<std::size_t>(EnergyCategory::RadioIdle)], EnergyLedger::to_fj(0.125));
  EXPECT_EQ(a.debits[static_cast<std::size_t>(EnergyCategory::Tx)], 0);
  EXPECT_DOUBLE_EQ(l.residual(node_id(3)), 0.375);
}

TEST(EnergyLedger, RejectsNegativeDebitAndUnknownNode) {
  EnergyLedger l;
  l.open(node_id(0), 1.0);
  EXPECT_THROW(l.debit(node_id(0), EnergyCategory::Tx, -1.0), std::invalid_argument);
  EXPECT_THROW(l.debit(node_id(9), EnergyCategory::Tx, 1.0), std::out_of_range);
}

}  // namespace
}  // namespace esrp
