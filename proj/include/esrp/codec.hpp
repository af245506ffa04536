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

// Wire formats for the three ESRP packet types. Layouts are documented in
// docs/wire-format.md; every decoder validates the exact length it consumes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esrp/errors.hpp"
#include "esrp/security_role.hpp"
#include "esrp/topology.hpp"

namespace esrp {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kSignalPacketSize = 11;
inline constexpr std::size_t kChFrameFixedSize = 13;
inline constexpr std::size_t kChFrameMaxPayload = 255;
inline constexpr std::size_t kCmReportHeaderSize = 3;
inline constexpr std::size_t kCmReportMaxPayload = 125;
inline constexpr std::uint8_t kEmptyCmSlot = 0xFF;

// Sink -> CH at formation and reformation.
struct SignalPacket {
  std::uint8_t ch_id = 0;
  std::uint8_t public_key = 0;
  std::uint8_t private_key = 0;
  std::array<std::uint8_t, 4> cm_ids{};  // kEmptyCmSlot marks an unused slot
  std::uint8_t neighbor_ch_id = 0;

  friend bool operator==(const SignalPacket&, const SignalPacket&) = default;
};

// CH frame. Everything after hier_flag is meaningful only when hier_flag is set.
struct ChFrame {
  bool hier_flag = false;
  bool is_ch = false;
  std::uint8_t node_id = 0;
  std::uint8_t energy = 0;
  std::uint8_t next_ch_id = 0;
  std::uint8_t cm_id = 0;
  std::uint8_t cm_energy = 0;
  Bytes cm_payload;
  std::uint8_t secret_key = 0;
  std::uint8_t public_key = 0;
  SecurityRole role = SecurityRole::None;
  std::uint8_t cm_energy2 = 0;  // member energy echoed after aggregation
  bool trap_enable = false;
  bool mine_enable = false;
  bool promisc_enable = false;
  SecurityStatus status;

  friend bool operator==(const ChFrame&, const ChFrame&) = default;
};

// CM -> CH report.
struct CmReport {
  std::uint8_t node_id = 0;
  std::uint8_t energy = 0;
  std::uint8_t ch_id = 0;
  Bytes payload;

  friend bool operator==(const CmReport&, const CmReport&) = default;
};

// One-byte energy level relative to the node's initial energy.
struct EnergyByte {
  std::uint8_t q = 0;

  static EnergyByte quantize(double energy, double initial) {
    if (!(initial > 0.0)) return {0};
    const double scaled = std::round(energy / initial * 255.0);
    return {static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0))};
  }

  double dequantize(double initial) const { return static_cast<double>(q) / 255.0 * initial; }
};

namespace detail {

class Reader {
 public:
  Reader(std::span<const std::uint8_t> buf, std::string_view what) : buf_(buf), what_(what) {}

  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }

  Bytes take(std::size_t n) {
    need(n);
    Bytes out(buf_.begin() + static_cast<std::ptrdiff_t>(pos_), buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

  void finish() const {
    if (pos_ != buf_.size())
      throw MalformedPacket(std::string(what_) + ": " + std::to_string(buf_.size() - pos_) + " trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw MalformedPacket(std::string(what_) + ": truncated buffer");
  }

  std::span<const std::uint8_t> buf_;
  std::string_view what_;
  std::size_t pos_ = 0;
};

inline TriState tri_from_byte(std::uint8_t b) {
  if (b > 2) throw MalformedPacket("ch frame: security status byte out of range");
  return static_cast<TriState>(b);
}

}  // namespace detail

inline Bytes encode_signal(const SignalPacket& p) {
  Bytes out;
  out.reserve(kSignalPacketSize);
  out.push_back(p.ch_id);
  out.push_back(p.public_key);
  out.push_back(p.private_key);
  out.insert(out.end(), p.cm_ids.begin(), p.cm_ids.end());
  out.push_back(p.neighbor_ch_id);
  out.insert(out.end(), 3, 0);
  return out;
}

inline SignalPacket decode_signal(std::span<const std::uint8_t> buf) {
  if (buf.size() != kSignalPacketSize)
    throw MalformedPacket("signal packet: expected 11 bytes, got " + std::to_string(buf.size()));
  SignalPacket p;
  p.ch_id = buf[0];
  p.public_key = buf[1];
  p.private_key = buf[2];
  std::copy(buf.begin() + 3, buf.begin() + 7, p.cm_ids.begin());
  p.neighbor_ch_id = buf[7];
  return p;
}

// Flag byte, MSB first: hier, is_ch, role(2), trap, mine, promisc, reserved.
inline Bytes encode_ch(const ChFrame& f) {
  if (f.cm_payload.size() > kChFrameMaxPayload) throw MalformedPacket("ch frame: payload exceeds 255 bytes");
  Bytes out;
  if (!f.hier_flag) {
    out.assign(kChFrameFixedSize, 0);
    return out;
  }
  out.reserve(kChFrameFixedSize + f.cm_payload.size());
  std::uint8_t flags = 0x80;
  if (f.is_ch) flags |= 0x40;
  flags |= static_cast<std::uint8_t>((static_cast<unsigned>(f.role) & 0x3U) << 4);
  if (f.trap_enable) flags |= 0x08;
  if (f.mine_enable) flags |= 0x04;
  if (f.promisc_enable) flags |= 0x02;
  out.push_back(flags);
  out.push_back(f.node_id);
  out.push_back(f.energy);
  out.push_back(f.next_ch_id);
  out.push_back(f.cm_id);
  out.push_back(f.cm_energy);
  out.push_back(static_cast<std::uint8_t>(f.cm_payload.size()));
  out.insert(out.end(), f.cm_payload.begin(), f.cm_payload.end());
  out.push_back(f.secret_key);
  out.push_back(f.public_key);
  out.push_back(f.cm_energy2);
  out.push_back(static_cast<std::uint8_t>(f.status.mzkp));
  out.push_back(static_cast<std::uint8_t>(f.status.promisc));
  out.push_back(static_cast<std::uint8_t>(f.status.mine));
  return out;
}

inline ChFrame decode_ch(std::span<const std::uint8_t> buf) {
  detail::Reader r(buf, "ch frame");
  const std::uint8_t flags = r.u8();
  ChFrame f;
  if ((flags & 0x80) == 0) {
    // Flat frame: fixed length, remaining fields carry no meaning.
    if (buf.size() != kChFrameFixedSize)
      throw MalformedPacket("ch frame: flat frame must be 13 bytes, got " + std::to_string(buf.size()));
    return f;
  }
  f.hier_flag = true;
  f.is_ch = (flags & 0x40) != 0;
  f.role = role_from_bits((flags >> 4) & 0x3U);
  f.trap_enable = (flags & 0x08) != 0;
  f.mine_enable = (flags & 0x04) != 0;
  f.promisc_enable = (flags & 0x02) != 0;
  f.node_id = r.u8();
  f.energy = r.u8();
  f.next_ch_id = r.u8();
  f.cm_id = r.u8();
  f.cm_energy = r.u8();
  const std::size_t len = r.u8();
  f.cm_payload = r.take(len);
  f.secret_key = r.u8();
  f.public_key = r.u8();
  f.cm_energy2 = r.u8();
  f.status.mzkp = detail::tri_from_byte(r.u8());
  f.status.promisc = detail::tri_from_byte(r.u8());
  f.status.mine = detail::tri_from_byte(r.u8());
  r.finish();
  return f;
}

inline Bytes encode_cm(const CmReport& r) {
  if (r.payload.size() > kCmReportMaxPayload) throw MalformedPacket("cm report: payload exceeds 125 bytes");
  Bytes out;
  out.reserve(kCmReportHeaderSize + 1 + r.payload.size());
  out.push_back(r.node_id);
  out.push_back(r.energy);
  out.push_back(r.ch_id);
  out.push_back(static_cast<std::uint8_t>(r.payload.size()));
  out.insert(out.end(), r.payload.begin(), r.payload.end());
  return out;
}

inline CmReport decode_cm(std::span<const std::uint8_t> buf) {
  detail::Reader rd(buf, "cm report");
  CmReport r;
  r.node_id = rd.u8();
  r.energy = rd.u8();
  r.ch_id = rd.u8();
  const std::size_t len = rd.u8();
  if (len > kCmReportMaxPayload) throw MalformedPacket("cm report: payload length " + std::to_string(len) + " > 125");
  r.payload = rd.take(len);
  rd.finish();
  return r;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

// Accepts upper or lower case, ignoring whitespace, ':' and '-' separators.
inline Bytes from_hex(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  int hi = -1;
  for (char c : text) {
    if (c == ' ' || c == ':' || c == '-' || c == '\n' || c == '\t') continue;
    const int v = nibble(c);
    if (v < 0) throw MalformedPacket(std::string("invalid hex digit '") + c + "'");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(hi << 4 | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw MalformedPacket("odd number of hex digits");
  return out;
}

inline std::string describe(const SignalPacket& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "signal ch_id=%u public_key=0x%02x private_key=0x%02x cm_ids=[%u,%u,%u,%u] neighbor_ch_id=%u",
                p.ch_id, p.public_key, p.private_key, p.cm_ids[0], p.cm_ids[1], p.cm_ids[2], p.cm_ids[3],
                p.neighbor_ch_id);
  return buf;
}

inline std::string describe(const ChFrame& f) {
  if (!f.hier_flag) return "ch_frame flat";
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "ch_frame hier=1 is_ch=%d node_id=%u energy=%u next_ch_id=%u cm_id=%u cm_energy=%u payload=%zu "
                "secret_key=0x%02x public_key=0x%02x role=%s cm_energy2=%u trap=%d mine=%d promisc=%d "
                "status=[%u,%u,%u]",
                f.is_ch, f.node_id, f.energy, f.next_ch_id, f.cm_id, f.cm_energy, f.cm_payload.size(), f.secret_key,
                f.public_key, std::string(to_string(f.role)).c_str(), f.cm_energy2, f.trap_enable, f.mine_enable,
                f.promisc_enable, static_cast<unsigned>(f.status.mzkp), static_cast<unsigned>(f.status.promisc),
                static_cast<unsigned>(f.status.mine));
  return std::string(buf) + (f.cm_payload.empty() ? "" : " payload_hex=" + to_hex(f.cm_payload));
}

inline std::string describe(const CmReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "cm_report node_id=%u energy=%u ch_id=%u payload=%zu", r.node_id, r.energy, r.ch_id,
                r.payload.size());
  return std::string(buf) + (r.payload.empty() ? "" : " payload_hex=" + to_hex(r.payload));
}

}  // namespace esrp
