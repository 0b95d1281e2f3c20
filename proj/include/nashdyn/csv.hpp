// Copyright 2026 The nashdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NASHDYN_CSV_HPP_
#define NASHDYN_CSV_HPP_

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashdyn/analysis.hpp"
#include "nashdyn/baselines.hpp"
#include "nashdyn/dynamics.hpp"
#include "nashdyn/equilibrium.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

namespace csv_detail {

// Full round-trip precision; NaN prints as an empty cell.
inline std::string cell(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace csv_detail

// One row per (player, state, action) with the full exact-eval bundle.
inline void write_eval_csv(const std::string& path, const MarkovGame& game,
                           const EvalReport& report) {
  using csv_detail::cell;
  std::ofstream out = csv_detail::open_out(path);
  out << "player,state,action,rho,V,Q,A,w,u\n";
  for (int i = 0; i < game.num_players; ++i) {
    for (int s = 0; s < game.num_states; ++s) {
      for (int a = 0; a < game.action_counts[i]; ++a) {
        out << i << ',' << s << ',' << a << ',' << cell(report.rho[s]) << ','
            << cell(report.values[i][s]) << ','
            << cell(report.q_values[i](s, a)) << ','
            << cell(report.advantages[i](s, a)) << ','
            << cell(report.weighted_advantages[i](s, a)) << ','
            << cell(report.payoffs[i]) << '\n';
      }
    }
  }
}

// Learning-curve schema shared by the dynamics runners; extra_header /
// extra_cells append run-constant columns (sampling parameters, algorithm
// tags).
inline void write_trace_csv(const std::string& path,
                            const std::vector<TraceRecord>& records,
                            const std::string& extra_header = "",
                            const std::string& extra_cells = "") {
  using csv_detail::cell;
  std::ofstream out = csv_detail::open_out(path);
  out << "time_or_iter,residual_inf,nashconv_total,lyapunov,wall_ms"
      << extra_header << '\n';
  for (const TraceRecord& rec : records) {
    out << cell(rec.time) << ',' << cell(rec.residual) << ','
        << cell(rec.nashconv) << ',' << cell(rec.lyapunov) << ','
        << cell(rec.wall_ms) << extra_cells << '\n';
  }
}

inline void write_nashconv_csv(const std::string& path,
                               const std::vector<NashConvReport>& reports) {
  using csv_detail::cell;
  if (reports.empty()) {
    throw std::invalid_argument("write_nashconv_csv: no reports");
  }
  std::ofstream out = csv_detail::open_out(path);
  const std::size_t players = reports.front().gaps.size();
  out << "iteration";
  for (std::size_t i = 0; i < players; ++i) out << ",gap_" << i;
  out << ",total\n";
  for (std::size_t it = 0; it < reports.size(); ++it) {
    out << it;
    for (double gap : reports[it].gaps) out << ',' << cell(gap);
    out << ',' << cell(reports[it].total) << '\n';
  }
}

inline void write_baseline_csv(const std::string& path,
                               const BaselineRun& run) {
  using csv_detail::cell;
  std::ofstream out = csv_detail::open_out(path);
  out << "time_or_iter,residual_inf,nashconv_total,lyapunov,wall_ms,"
         "algorithm\n";
  for (std::size_t l = 0; l < run.nashconv.size(); ++l) {
    out << l << ",," << cell(run.nashconv[l]) << ",,," << run.algorithm
        << '\n';
  }
}

inline void write_sweep_csv(const std::string& path,
                            const std::vector<SweepRow>& rows) {
  using csv_detail::cell;
  std::ofstream out = csv_detail::open_out(path);
  out << "epsilon,nashconv_total,residual_inf,status\n";
  for (const SweepRow& row : rows) {
    out << cell(row.epsilon) << ',' << cell(row.nashconv) << ','
        << cell(row.residual) << ',' << to_string(row.status) << '\n';
  }
}

// Bins for both scan statistics plus a trailing summary line:
//   summary,<max_inner>,<max_norm>,<sample_count>
inline void write_mu_histogram_csv(const std::string& path,
                                   const MuScanReport& report, int bins = 40) {
  using csv_detail::cell;
  std::vector<double> inner, norm;
  inner.reserve(report.samples.size());
  norm.reserve(report.samples.size());
  for (const auto& [i, n] : report.samples) {
    inner.push_back(i);
    norm.push_back(n);
  }
  const Histogram h_inner = make_histogram(inner, bins);
  const Histogram h_norm = make_histogram(norm, bins);

  std::ofstream out = csv_detail::open_out(path);
  out << "statistic,bin_left,bin_right,count\n";
  auto dump = [&out](const char* tag, const Histogram& h) {
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << tag << ',' << csv_detail::cell(h.edges[b]) << ','
          << csv_detail::cell(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
    }
  };
  dump("inner_ratio", h_inner);
  dump("norm_ratio", h_norm);
  out << "summary," << cell(report.max_inner) << ',' << cell(report.max_norm)
      << ',' << report.sample_count << '\n';
}

// Raw scan samples, one row per profile pair.
inline void write_mu_samples_csv(const std::string& path,
                                 const MuScanReport& report) {
  using csv_detail::cell;
  std::ofstream out = csv_detail::open_out(path);
  out << "sample,inner_ratio,norm_ratio\n";
  for (std::size_t idx = 0; idx < report.samples.size(); ++idx) {
    out << idx << ',' << cell(report.samples[idx].first) << ','
        << cell(report.samples[idx].second) << '\n';
  }
}

// Text form of a profile, one row per (player, state).
inline void write_profile_csv(const std::string& path,
                              const PolicyProfile& profile) {
  using csv_detail::cell;
  std::ofstream out = csv_detail::open_out(path);
  out << "player,state,probabilities...\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    for (Eigen::Index s = 0; s < profile[i].rows(); ++s) {
      out << i << ',' << s;
      for (Eigen::Index a = 0; a < profile[i].cols(); ++a) {
        out << ',' << cell(profile[i](s, a));
      }
      out << '\n';
    }
  }
}

}  // namespace nashdyn

#endif  // NASHDYN_CSV_HPP_
