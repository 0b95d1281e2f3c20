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

#ifndef NASHDYN_ANALYSIS_HPP_
#define NASHDYN_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nashdyn/common.hpp"
#include "nashdyn/dynamics.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

// Hypomonotonicity scan over random profile pairs. For each pair (pi, pi'):
//   inner_ratio = <w(pi) - w(pi'), pi - pi'> / ||pi - pi'||^2
//   norm_ratio  = ||w(pi) - w(pi')|| / ||pi - pi'||^2
// with Frobenius products summed over players. max_inner, when positive, is
// a certified lower bound on the game's hypomonotonicity constant mu; all
// inner_ratios <= 0 evidences monotonicity at sample resolution.
// Cauchy-Schwarz orders the two statistics per sample as
//   inner_ratio <= norm_ratio * ||pi - pi'||,
// so delta_norms keeps the pair norms; inner_ratio <= norm_ratio alone can
// fail when ||pi - pi'|| > 1 (profiles span several simplices).
struct MuScanReport {
  std::vector<std::pair<double, double>> samples;  // (inner, norm) per pair
  std::vector<double> delta_norms;                 // ||pi - pi'|| per pair
  double max_inner = -std::numeric_limits<double>::infinity();
  double max_norm = 0.0;
  double min_delta_norm = std::numeric_limits<double>::infinity();
  long sample_count = 0;
  std::uint64_t seed = 0;
};

namespace analysis_detail {

inline PolicyProfile dirichlet_profile(const MarkovGame& game, Rng& rng) {
  PolicyProfile profile(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    profile[i].resize(game.num_states, game.action_counts[i]);
    for (int s = 0; s < game.num_states; ++s) {
      profile[i].row(s) = rng.dirichlet(game.action_counts[i]).transpose();
    }
  }
  return profile;
}

}  // namespace analysis_detail

inline MuScanReport mu_scan(const MarkovGame& game, long sample_count,
                            std::uint64_t seed, int workers = 1) {
  if (sample_count < 1) throw std::invalid_argument("mu_scan: need samples");

  struct Sample {
    double inner, norm, delta_norm;
  };
  std::vector<Sample> slots(sample_count);
  for_each_chunk(
      sample_count, 16, workers, [&](long /*chunk*/, long begin, long end) {
        for (long idx = begin; idx < end; ++idx) {
          Rng rng(derive_seed(seed, static_cast<std::uint64_t>(idx)));
          double delta_sq = 0.0;
          PolicyProfile a, b;
          do {  // degenerate pairs are resampled from the same stream
            a = analysis_detail::dirichlet_profile(game, rng);
            b = analysis_detail::dirichlet_profile(game, rng);
            delta_sq = 0.0;
            for (int i = 0; i < game.num_players; ++i) {
              delta_sq += (a[i] - b[i]).squaredNorm();
            }
          } while (delta_sq < 1e-12);
          const TableSet wa = evaluate(game, a).weighted_advantages;
          const TableSet wb = evaluate(game, b).weighted_advantages;
          double inner = 0.0, w_sq = 0.0;
          for (int i = 0; i < game.num_players; ++i) {
            const Matrix dw = wa[i] - wb[i];
            inner += dw.cwiseProduct(a[i] - b[i]).sum();
            w_sq += dw.squaredNorm();
          }
          slots[idx] = {inner / delta_sq, std::sqrt(w_sq) / delta_sq,
                        std::sqrt(delta_sq)};
        }
      });

  MuScanReport report;
  report.sample_count = sample_count;
  report.seed = seed;
  report.samples.reserve(sample_count);
  report.delta_norms.reserve(sample_count);
  for (const Sample& s : slots) {
    report.samples.emplace_back(s.inner, s.norm);
    report.delta_norms.push_back(s.delta_norm);
    report.max_inner = std::max(report.max_inner, s.inner);
    report.max_norm = std::max(report.max_norm, s.norm);
    report.min_delta_norm = std::min(report.min_delta_norm, s.delta_norm);
  }
  return report;
}

struct SweepRow {
  double epsilon = 0.0;
  double nashconv = 0.0;
  double residual = 0.0;
  RunStatus status = RunStatus::kBudgetExhausted;
};

// One run_ctld per epsilon, all from the same y0; rows sorted by epsilon.
// Non-converged runs are flagged by status, never dropped.
inline std::vector<SweepRow> epsilon_sweep(const MarkovGame& game,
                                           std::vector<double> epsilons,
                                           DynamicsConfig config,
                                           const TableSet& y0,
                                           const TraceOptions& options = {}) {
  for (double e : epsilons) {
    if (!(e > 0.0)) throw std::invalid_argument("epsilon_sweep: epsilon <= 0");
  }
  std::sort(epsilons.begin(), epsilons.end());
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size());
  for (double e : epsilons) {
    config.epsilon = e;
    const DynamicsRun run = run_ctld(game, y0, config, options);
    SweepRow row;
    row.epsilon = e;
    row.nashconv = nash_conv(game, run.profile, options.br_tol).total;
    row.residual = run.residual;
    row.status = run.trace.status;
    rows.push_back(row);
  }
  return rows;
}

// Empirical companion of the existence statement for mu: every sampled ratio
// must be finite; the crude analytic ceiling derived from |w| <= R_max/(1-g)^2
// and the smallest accepted pair distance is reported next to the raw max.
struct Prop1Report {
  MuScanReport scan;
  bool all_finite = true;
  double analytic_bound = 0.0;
};

inline Prop1Report proposition1_probe(const MarkovGame& game,
                                      long sample_count, std::uint64_t seed,
                                      int workers = 1) {
  Prop1Report report;
  report.scan = mu_scan(game, sample_count, seed, workers);
  for (const auto& [inner, norm] : report.scan.samples) {
    if (!std::isfinite(inner) || !std::isfinite(norm)) {
      report.all_finite = false;
    }
  }
  const double w_cap = game.reward_bound /
                       ((1.0 - game.gamma) * (1.0 - game.gamma));
  report.analytic_bound = 2.0 * game.num_players * w_cap *
                          (2.0 / report.scan.min_delta_norm);
  return report;
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<long> counts;   // per bin; last bin right-closed
};

inline Histogram make_histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("make_histogram: bins < 1");
  if (values.empty()) throw std::invalid_argument("make_histogram: no values");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (hi <= lo) hi = lo + 1.0;  // degenerate spread: one catch-all bin span
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
  }
  return h;
}

}  // namespace nashdyn

#endif  // NASHDYN_ANALYSIS_HPP_
