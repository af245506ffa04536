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
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace esrp {

// Cumulative counters are totals since t = 0.
struct IterationSample {
  std::size_t iteration = 0;
  double time_s = 0.0;
  std::size_t alive = 0;
  std::size_t below_threshold = 0;  // residual under the termination threshold
  double energy_spent_j = 0.0;
  double delay_ms = 0.0;
  std::uint64_t overhead_bytes = 0;
  std::uint64_t control_packets = 0;
  std::uint64_t security_packets = 0;
  std::uint64_t data_packets = 0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::size_t clusters = 0;
  std::size_t flat = 0;
  std::size_t blocked = 0;
  std::uint64_t toward_sink = 0;
  std::uint64_t away_from_sink = 0;

  friend bool operator==(const IterationSample&, const IterationSample&) = default;
};

struct MetricsReport {
  std::vector<IterationSample> series;
  std::size_t initial_alive = 0;
  std::size_t initial_clusters = 0;
  double energy_budget_j = 0.0;
  double horizon_s = 0.0;
  double max_overhead_bytes = 650.0;
  bool terminated = false;  // stopped by the depletion rule before the horizon

  const IterationSample* last() const { return series.empty() ? nullptr : &series.back(); }
};

struct SummaryInputs {
  double alive_start = 0.0;
  double alive_end = 0.0;
  double total_delay_s = 0.0;
  double horizon_s = 0.0;
  double energy_spent = 0.0;
  double energy_budget = 0.0;
  double clusters_start = 0.0;
  double clusters_end = 0.0;
  double overhead_bytes = 0.0;
  double max_overhead_bytes = 0.0;
};

struct SummaryPercentages {
  double alive_decrease = 0.0;      // headline; complement of survival_pct
  double survival_pct = 0.0;
  double delay_pct = 0.0;
  double energy_pct = 0.0;
  double lifetime_decrease = 0.0;   // headline; complement of clusters_retained_pct
  double clusters_retained_pct = 0.0;
  double overhead_pct = 0.0;
};

inline SummaryPercentages summary_percentages(const SummaryInputs& in) {
  auto ratio = [](double num, double den, const char* what) {
    if (den == 0.0) throw std::domain_error(std::string("zero denominator for ") + what);
    return num / den * 100.0;
  };
  SummaryPercentages p;
  p.survival_pct = ratio(in.alive_end, in.alive_start, "nodes alive at start");
  p.alive_decrease = 100.0 - p.survival_pct;
  p.delay_pct = ratio(in.total_delay_s, in.horizon_s, "simulation time");
  p.energy_pct = ratio(in.energy_spent, in.energy_budget, "energy budget");
  p.clusters_retained_pct = ratio(in.clusters_end, in.clusters_start, "clusters at start");
  p.lifetime_decrease = 100.0 - p.clusters_retained_pct;
  p.overhead_pct = ratio(in.overhead_bytes, in.max_overhead_bytes, "maximum overhead bytes");
  return p;
}

inline SummaryInputs summary_inputs(const MetricsReport& report) {
  const IterationSample* end = report.last();
  if (end == nullptr) throw std::domain_error("report has no iterations");
  SummaryInputs in;
  in.alive_start = static_cast<double>(report.initial_alive);
  in.alive_end = static_cast<double>(end->alive);
  in.total_delay_s = end->delay_ms / 1000.0;
  in.horizon_s = report.horizon_s;
  in.energy_spent = end->energy_spent_j;
  in.energy_budget = report.energy_budget_j;
  in.clusters_start = static_cast<double>(report.initial_clusters);
  in.clusters_end = static_cast<double>(end->clusters);
  in.overhead_bytes = static_cast<double>(end->overhead_bytes);
  in.max_overhead_bytes = report.max_overhead_bytes;
  return in;
}

inline SummaryPercentages summary_percentages(const MetricsReport& report) {
  return summary_percentages(summary_inputs(report));
}

// Packet counts of the closed-form overhead models, for m clusters of n nodes
// (CH included).
struct OverheadCount {
  std::uint64_t intra = 0;
  std::uint64_t inter = 0;
  std::uint64_t total = 0;

  friend bool operator==(const OverheadCount&, const OverheadCount&) = default;
};

inline void check_overhead_args(std::uint64_t m, std::uint64_t n) {
  if (m < 1) throw std::invalid_argument("cluster count m must be at least 1");
  if (n < 2) throw std::invalid_argument("cluster size n must be at least 2");
}

// n-1 polls and n-1 replies per cluster; one CH-to-CH feedback exchange plus a
// request/response between the sink and every CH.
inline OverheadCount esrp_overhead(std::uint64_t m, std::uint64_t n) {
  check_overhead_args(m, n);
  OverheadCount c;
  c.intra = 2 * (n - 1);
  c.inter = 2 + 2 * m;
  c.total = m * c.intra + c.inter;
  return c;
}

inline std::uint64_t ldts_inter(std::uint64_t m) { return 2 * (m - 1) * (m - 1) + 2 * m; }

inline std::uint64_t ldts_total(std::uint64_t m, std::uint64_t intra) { return m * intra + ldts_inter(m); }

inline OverheadCount ldts_overhead(std::uint64_t m, std::uint64_t n) {
  check_overhead_args(m, n);
  OverheadCount c;
  c.intra = 2 * (n - 2) * (n - 1) + 2 * n;
  c.inter = ldts_inter(m);
  c.total = ldts_total(m, c.intra);
  return c;
}

inline const char* kMetricsCsvHeader =
    "iteration,time_s,alive,below_threshold,energy_spent_j,delay_ms,overhead_bytes,control_packets,"
    "security_packets,data_packets,generated,delivered,clusters,flat,blocked,toward_sink,away_from_sink";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_sample(std::ostream& os, const std::string& label, const IterationSample& s) {
  os << label << ',' << fmt_double(s.time_s) << ',' << s.alive << ',' << s.below_threshold << ','
     << fmt_double(s.energy_spent_j) << ',' << fmt_double(s.delay_ms) << ',' << s.overhead_bytes << ','
     << s.control_packets << ',' << s.security_packets << ',' << s.data_packets << ',' << s.generated << ','
     << s.delivered << ',' << s.clusters << ',' << s.flat << ',' << s.blocked << ',' << s.toward_sink << ','
     << s.away_from_sink << '\n';
}

}  // namespace detail

// One row per iteration followed by a "summary" row holding the final state
// (the start-of-run state when no iteration completed).
inline std::string metrics_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << kMetricsCsvHeader << '\n';
  for (const auto& s : report.series) detail::write_sample(os, std::to_string(s.iteration), s);
  IterationSample summary;
  if (const IterationSample* end = report.last()) {
    summary = *end;
  } else {
    summary.alive = report.initial_alive;
    summary.clusters = report.initial_clusters;
  }
  detail::write_sample(os, "summary", summary);
  return os.str();
}

inline void export_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << metrics_csv(report);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace esrp
