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

#ifndef NASHDYN_SAMPLING_HPP_
#define NASHDYN_SAMPLING_HPP_

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "nashdyn/common.hpp"
#include "nashdyn/dynamics.hpp"
#include "nashdyn/equilibrium.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

// One simulated episode of fixed horizon. action_probs(k, i) keeps the
// probability player i gave its own sampled action at step k, so importance
// corrections can be applied later, against the behavior policy, even after
// the live profile has moved on.
struct Trajectory {
  std::vector<int> states;         // length horizon + 1
  std::vector<int> joint_actions;  // length horizon
  Matrix rewards;                  // horizon x num_players
  Matrix action_probs;             // horizon x num_players
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(joint_actions.size()); }
};

// Horizon at which the discounted tail drops below tail_tol * R_max/(1-gamma).
inline int default_horizon(double gamma, double tail_tol = 1e-3) {
  return static_cast<int>(
      std::ceil(std::log(tail_tol) / std::log(gamma)));
}

// Simulates horizon steps: draw s0 from rho0, then per step each player's
// action independently, then the joint transition. Same seed, same episode.
inline Trajectory rollout(const MarkovGame& game, const PolicyProfile& profile,
                          int horizon, std::uint64_t seed) {
  check_profile_shape(game, profile, "rollout");
  if (horizon < 1) throw std::invalid_argument("rollout: horizon < 1");

  Rng rng(seed);
  Trajectory traj;
  traj.seed = seed;
  traj.states.resize(horizon + 1);
  traj.joint_actions.resize(horizon);
  traj.rewards.resize(horizon, game.num_players);
  traj.action_probs.resize(horizon, game.num_players);

  int s = rng.sample_index(game.rho0.transpose());
  std::vector<int> actions(game.num_players);
  for (int k = 0; k < horizon; ++k) {
    traj.states[k] = s;
    for (int i = 0; i < game.num_players; ++i) {
      actions[i] = rng.sample_index(profile[i].row(s));
      traj.action_probs(k, i) = profile[i](s, actions[i]);
    }
    const int j = game.encode_joint(actions);
    traj.joint_actions[k] = j;
    for (int i = 0; i < game.num_players; ++i) {
      traj.rewards(k, i) = game.rewards[i](s, j);
    }
    s = rng.sample_index(game.transitions[s].row(j));
  }
  traj.states[horizon] = s;
  return traj;
}

// Truncated discounted returns G_k = r_k + gamma * G_{k+1}, G_{H-1} = r_{H-1}.
inline Vector returns(const Trajectory& traj, double gamma, int player) {
  const int H = traj.horizon();
  Vector g(H);
  g[H - 1] = traj.rewards(H - 1, player);
  for (int k = H - 2; k >= 0; --k) {
    g[k] = traj.rewards(k, player) + gamma * g[k + 1];
  }
  return g;
}

// Tabular value regression target: V_hat(s) = value_sum(s) / weight(s) with
// discounted-visit weights, i.e. the rho-weighted average of observed
// returns; 0 where a state was never visited.
struct EmpiricalValueTable {
  std::vector<Vector> value_sum;  // per player, per state
  std::vector<Vector> weight;

  EmpiricalValueTable() = default;
  explicit EmpiricalValueTable(const MarkovGame& game) {
    value_sum.assign(game.num_players, Vector::Zero(game.num_states));
    weight.assign(game.num_players, Vector::Zero(game.num_states));
  }

  double estimate(int player, int state) const {
    const double w = weight[player][state];
    return w > 0.0 ? value_sum[player][state] / w : 0.0;
  }

  Vector estimates(int player) const {
    Vector v(value_sum[player].size());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      v[s] = estimate(player, static_cast<int>(s));
    }
    return v;
  }
};

// Accumulates value_sum[s_k] += gamma^k G_k and weight[s_k] += gamma^k for
// every player along one episode.
inline void update_empirical_values(EmpiricalValueTable& table,
                                    const Trajectory& traj, double gamma) {
  const int H = traj.horizon();
  for (std::size_t i = 0; i < table.value_sum.size(); ++i) {
    const Vector g = returns(traj, gamma, static_cast<int>(i));
    double disc = 1.0;
    for (int k = 0; k < H; ++k) {
      table.value_sum[i][traj.states[k]] += disc * g[k];
      table.weight[i][traj.states[k]] += disc;
      disc *= gamma;
    }
  }
}

// Generalized advantage estimates by the backward recursion
// A_k = delta_k + gamma * lambda * A_{k+1} over TD residuals
// delta_k = r_k + gamma * V(s_{k+1}) - V(s_k), values taken from the table.
inline Vector gae(const Trajectory& traj, const Vector& values, double gamma,
                  double lambda, int player) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("gae: lambda must lie in [0, 1]");
  }
  const int H = traj.horizon();
  Vector adv(H);
  double next = 0.0;
  for (int k = H - 1; k >= 0; --k) {
    const double delta = traj.rewards(k, player) +
                         gamma * values[traj.states[k + 1]] -
                         values[traj.states[k]];
    next = delta + gamma * lambda * next;
    adv[k] = next;
  }
  return adv;
}

enum class EstimatorMode { kUnbiased, kGae };

inline const char* to_string(EstimatorMode mode) {
  return mode == EstimatorMode::kUnbiased ? "unbiased" : "gae";
}

// Monte-Carlo estimate of the weighted advantages, with per-entry sample
// variance across episodes.
struct WhatEstimate {
  TableSet mean;
  TableSet variance;
  long episodes = 0;
};

namespace sampling_detail {

// Per-episode contribution to the w estimate for every player.
//
// Mode unbiased: entry (s_k, a_k) receives gamma^k * (G_k - b(s_k)) /
// prob(a_k); other actions of the visited row receive nothing. Conditioned
// on reaching s_k, the baseline term contributes -gamma^k * b(s_k) to every
// action in expectation (the importance weight cancels the sampling
// probability), i.e. a state-only row shift that the soft-max ignores, so
// the expectation stays rho(s) * (Q(s,a) - V(s)) = w(s,a) when b = V while
// unsampled entries of a realization stay zero.
//
// Mode gae: entry (s_k, a_k) receives gamma^k * A_hat_k / prob(a_k); the
// value estimates already live inside the TD residuals.
inline void episode_contribution(const MarkovGame& game,
                                 const Trajectory& traj, EstimatorMode mode,
                                 const std::vector<Vector>& baseline_values,
                                 double lambda, TableSet& out) {
  const int H = traj.horizon();
  for (int i = 0; i < game.num_players; ++i) {
    out[i].setZero();
    const Vector signal = mode == EstimatorMode::kUnbiased
                              ? returns(traj, game.gamma, i)
                              : gae(traj, baseline_values[i], game.gamma,
                                    lambda, i);
    double disc = 1.0;
    for (int k = 0; k < H; ++k) {
      const int s = traj.states[k];
      const int a = game.action_of(traj.joint_actions[k], i);
      const double prob = traj.action_probs(k, i);
      if (!(prob > 0.0)) {
        throw std::runtime_error(
            "estimate_w: zero-probability action recorded; profile corrupt");
      }
      const double centered = mode == EstimatorMode::kUnbiased
                                  ? signal[k] - baseline_values[i][s]
                                  : signal[k];
      out[i](s, a) += disc * centered / prob;
      disc *= game.gamma;
    }
  }
}

struct ChunkMoments {
  TableSet sum;
  TableSet sum_sq;
};

// Folds per-episode contributions into per-chunk first and second moments;
// fetch_episode(m) must return the m-th episode independent of worker
// scheduling. Chunks combine in index order, so results do not depend on the
// worker count.
template <typename FetchEpisode>
WhatEstimate reduce_episodes(const MarkovGame& game, long episodes,
                             EstimatorMode mode,
                             const std::vector<Vector>& baseline_values,
                             double lambda, int workers,
                             FetchEpisode fetch_episode) {
  constexpr long kChunk = 64;
  const long n_chunks = (episodes + kChunk - 1) / kChunk;
  std::vector<ChunkMoments> moments(n_chunks);

  for_each_chunk(episodes, kChunk, workers,
                 [&](long chunk, long begin, long end) {
                   ChunkMoments& m = moments[chunk];
                   m.sum = zero_tables(game);
                   m.sum_sq = zero_tables(game);
                   TableSet c = zero_tables(game);
                   for (long e = begin; e < end; ++e) {
                     const Trajectory traj = fetch_episode(e);
                     episode_contribution(game, traj, mode, baseline_values,
                                          lambda, c);
                     for (int i = 0; i < game.num_players; ++i) {
                       m.sum[i] += c[i];
                       m.sum_sq[i] += c[i].cwiseProduct(c[i]);
                     }
                   }
                 });

  WhatEstimate est;
  est.episodes = episodes;
  est.mean = zero_tables(game);
  est.variance = zero_tables(game);
  for (long chunk = 0; chunk < n_chunks; ++chunk) {
    for (int i = 0; i < game.num_players; ++i) {
      est.mean[i] += moments[chunk].sum[i];
      est.variance[i] += moments[chunk].sum_sq[i];
    }
  }
  const double m_count = static_cast<double>(episodes);
  for (int i = 0; i < game.num_players; ++i) {
    est.mean[i] /= m_count;
    if (episodes > 1) {
      // sample variance, clamped against cancellation rounding
      est.variance[i] =
          ((est.variance[i] - m_count * est.mean[i].cwiseProduct(est.mean[i]))
           / (m_count - 1.0))
              .cwiseMax(0.0);
    } else {
      est.variance[i].setZero();
    }
  }
  return est;
}

inline std::vector<Vector> zero_baselines(const MarkovGame& game) {
  return std::vector<Vector>(game.num_players,
                             Vector::Zero(game.num_states));
}

}  // namespace sampling_detail

// Estimates w(profile) from M fresh episodes. baseline_values supplies the
// state-only baseline b (mode unbiased) or the value estimates inside the TD
// residuals (mode gae); pass an empty vector for b = 0. Episode seeds are
// derived per index from seed, so the result is worker-count independent.
inline WhatEstimate estimate_w(const MarkovGame& game,
                               const PolicyProfile& profile, long episodes,
                               int horizon, std::uint64_t seed,
                               EstimatorMode mode,
                               const std::vector<Vector>& baseline_values = {},
                               double lambda = 0.95, int workers = 1) {
  if (episodes < 1) throw std::invalid_argument("estimate_w: episodes < 1");
  check_profile_shape(game, profile, "estimate_w");
  const std::vector<Vector>& baselines =
      baseline_values.empty() ? sampling_detail::zero_baselines(game)
                              : baseline_values;
  if (static_cast<int>(baselines.size()) != game.num_players) {
    throw std::invalid_argument("estimate_w: baseline shape mismatch");
  }
  return sampling_detail::reduce_episodes(
      game, episodes, mode, baselines, lambda, workers, [&](long e) {
        return rollout(game, profile, horizon, derive_seed(seed, e));
      });
}

enum class EpoMode { kUnbiased, kGae, kExact };

inline const char* to_string(EpoMode mode) {
  switch (mode) {
    case EpoMode::kUnbiased: return "unbiased";
    case EpoMode::kGae: return "gae";
    case EpoMode::kExact: return "exact";
  }
  return "unknown";
}

struct EpoOptions {
  long episodes_per_iter = 64;  // M
  int horizon = 100;            // H
  double lambda = 0.95;
  EpoMode mode = EpoMode::kUnbiased;
  // 0: value table accumulates the full history and w_hat uses the current
  // iteration only. W >= 1: both value and w_hat estimates are rebuilt from
  // the last W iterations' episodes (importance-corrected against the
  // policies that generated them).
  int buffer_window = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  TraceOptions trace{};
};

struct EpoRun {
  ScoreState state;
  PolicyProfile profile;
  LearningTrace trace;
  EmpiricalValueTable values;
};

// Sample-based discrete-time score dynamics (the tabular optimizer):
// per iteration play M episodes with sigma(y_l), refresh the empirical value
// table, estimate w_hat, and apply y_{l+1} = y_l + alpha_l eta (w_hat - y_l).
// Mode exact strips the noise source entirely and retraces run_dtld_exact
// bit for bit.
inline EpoRun run_tabular_epo(const MarkovGame& game,
                              const DynamicsConfig& config,
                              const EpoOptions& options, const TableSet& y0) {
  validate_dynamics_config(config);
  if (options.mode == EpoMode::kExact) {
    const DynamicsRun run = run_dtld_exact(game, y0, config, options.trace);
    EpoRun out;
    out.state = run.state;
    out.profile = run.profile;
    out.trace = run.trace;
    out.values = EmpiricalValueTable(game);
    return out;
  }
  if (options.episodes_per_iter < 1 || options.horizon < 1) {
    throw std::invalid_argument("run_tabular_epo: M and H must be >= 1");
  }
  const EstimatorMode est_mode = options.mode == EpoMode::kGae
                                     ? EstimatorMode::kGae
                                     : EstimatorMode::kUnbiased;
  dynamics_detail::WallClock clock;

  EpoRun run;
  run.state.y = y0;
  run.values = EmpiricalValueTable(game);
  run.trace.status = RunStatus::kBudgetExhausted;

  const long M = options.episodes_per_iter;
  // Sliding window of past episodes (buffer_window >= 1 only).
  std::deque<std::vector<Trajectory>> window;

  for (long l = 0;; ++l) {
    const PolicyProfile profile = choice_map(run.state.y, config.epsilon);

    // Collect this iteration's episodes (parallel, seeded per index).
    std::vector<Trajectory> episodes(M);
    for_each_chunk(M, 64, options.workers,
                   [&](long /*chunk*/, long begin, long end) {
                     for (long m = begin; m < end; ++m) {
                       episodes[m] = rollout(
                           game, profile, options.horizon,
                           derive_seed(options.seed,
                                       static_cast<std::uint64_t>(l) * M +
                                           static_cast<std::uint64_t>(m)));
                     }
                   });
    if (options.buffer_window >= 1) {
      window.push_back(std::move(episodes));
      while (static_cast<int>(window.size()) > options.buffer_window) {
        window.pop_front();
      }
      // Rebuild the value table from the window, oldest first.
      run.values = EmpiricalValueTable(game);
      for (const auto& batch : window) {
        for (const Trajectory& traj : batch) {
          update_empirical_values(run.values, traj, game.gamma);
        }
      }
    } else {
      for (const Trajectory& traj : episodes) {
        update_empirical_values(run.values, traj, game.gamma);
      }
      window.clear();
      window.push_back(std::move(episodes));
    }

    std::vector<Vector> baselines(game.num_players);
    for (int i = 0; i < game.num_players; ++i) {
      baselines[i] = run.values.estimates(i);
    }

    // w_hat over the buffered episodes, corrected per episode against the
    // policy that generated it.
    std::vector<const Trajectory*> flat;
    for (const auto& batch : window) {
      for (const Trajectory& traj : batch) flat.push_back(&traj);
    }
    const WhatEstimate what = sampling_detail::reduce_episodes(
        game, static_cast<long>(flat.size()), est_mode, baselines,
        options.lambda, options.workers,
        [&flat](long e) { return *flat[e]; });

    const bool out_of_budget = l >= config.max_iters;
    const bool finite = all_finite(run.state.y) && all_finite(what.mean);
    const double residual =
        finite ? dynamics_detail::score_residual(what.mean, run.state.y)
               : std::numeric_limits<double>::quiet_NaN();
    const bool stopping = out_of_budget || !finite;

    const bool scheduled_record =
        options.trace.record_every > 0 &&
        l % options.trace.record_every == 0;
    if (stopping || scheduled_record) {
      TraceRecord rec;
      rec.time = static_cast<double>(l);
      rec.iteration = l;
      rec.residual = residual;
      if (finite && (stopping || (options.trace.nashconv_every > 0 &&
                                  l % options.trace.nashconv_every == 0))) {
        rec.nashconv = nash_conv(game, profile, options.trace.br_tol).total;
      }
      if (options.trace.lyapunov_reference != nullptr && finite) {
        rec.lyapunov = fenchel_coupling(*options.trace.lyapunov_reference,
                                        run.state.y, config.epsilon);
      }
      rec.wall_ms = clock.elapsed_ms();
      run.trace.records.push_back(rec);
    }

    if (stopping) {
      run.trace.status = finite ? RunStatus::kBudgetExhausted
                                : RunStatus::kDiverged;
      run.profile = profile;
      return run;
    }
    dynamics_detail::dtld_update(run.state.y, what.mean, step_size(config, l),
                                 config.eta);
    run.state.t = static_cast<double>(l + 1);
  }
}

}  // namespace nashdyn

#endif  // NASHDYN_SAMPLING_HPP_
