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
#include <stdexcept>
#include <string_view>

namespace esrp {

// Identity-check role of a cluster head; the values are the 2-bit wire code.
enum class SecurityRole : std::uint8_t { None = 0, Prover = 1, Verifier = 2, ProverVerifier = 3 };

constexpr bool proves(SecurityRole r) noexcept { return (static_cast<unsigned>(r) & 1U) != 0; }
constexpr bool verifies(SecurityRole r) noexcept { return (static_cast<unsigned>(r) & 2U) != 0; }

constexpr SecurityRole with_prover(SecurityRole r) noexcept {
  return static_cast<SecurityRole>(static_cast<unsigned>(r) | 1U);
}
constexpr SecurityRole with_verifier(SecurityRole r) noexcept {
  return static_cast<SecurityRole>(static_cast<unsigned>(r) | 2U);
}

inline SecurityRole role_from_bits(unsigned bits) {
  if (bits > 3U) throw std::invalid_argument("security role code out of range");
  return static_cast<SecurityRole>(bits);
}

inline constexpr std::string_view to_string(SecurityRole r) {
  switch (r) {
    case SecurityRole::None: return "none";
    case SecurityRole::Prover: return "prover";
    case SecurityRole::Verifier: return "verifier";
    case SecurityRole::ProverVerifier: return "prover_verifier";
  }
  return "unknown";
}

}  // namespace esrp
