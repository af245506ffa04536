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

#include <cstdint>
#include <string_view>

namespace esrp {

enum class AttackKind : std::uint8_t {
  Compromised,       // answers identity challenges with a forged secret
  SelectiveForward,  // drops a fraction of forwarded packets and their acks
  BlackHole,         // drops every forwarded packet, acknowledges nothing
  SelfIntruder,      // stays silent during mine-detection sweeps
};

struct AttackProfile {
  AttackKind kind = AttackKind::BlackHole;
  std::uint8_t wrong_secret = 0;  // Compromised only
  double drop_prob = 1.0;         // SelectiveForward only, in [0, 1]
  double activation_time = 0.0;   // seconds

  friend bool operator==(const AttackProfile&, const AttackProfile&) = default;
};

inline constexpr std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Compromised: return "compromised";
    case AttackKind::SelectiveForward: return "selective_forward";
    case AttackKind::BlackHole: return "black_hole";
    case AttackKind::SelfIntruder: return "self_intruder";
  }
  return "unknown";
}

}  // namespace esrp
