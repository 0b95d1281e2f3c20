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

#ifndef NASHDYN_DYNAMICS_HPP_
#define NASHDYN_DYNAMICS_HPP_

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nashdyn/common.hpp"
#include "nashdyn/equilibrium.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

// Parameters of the score dynamics
//   continuous:  dy/dt = eta * (w(sigma(y)) - y)
//   discrete:    y_{l+1} = y_l + alpha_l * eta * (w_hat_l - y_l)
// with sigma the entropic choice map at temperature epsilon and the step-size
// schedule alpha_l = alpha0 / (l + schedule_offset)^schedule_p.
struct DynamicsConfig {
  double eta = 1.0;
  double epsilon = 0.1;
  double step = 0.05;  // RK4 step h
  double max_time = 100.0;
  long max_iters = 100000;
  double fp_tol = 1e-6;  // inf-norm fixed-point residual target
  double alpha0 = 1.0;
  double schedule_p = 1.0;      // in (0.5, 1]: sum alpha = inf, sum alpha^2 < inf
  double schedule_offset = 1.0;
};

inline void validate_dynamics_config(const DynamicsConfig& config) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("DynamicsConfig: ") + msg);
  };
  require(config.eta > 0.0, "eta must be > 0");
  require(config.epsilon > 0.0, "epsilon must be > 0");
  require(config.step > 0.0, "step must be > 0");
  require(config.max_time > 0.0, "max_time must be > 0");
  require(config.max_iters >= 1, "max_iters must be >= 1");
  require(config.fp_tol > 0.0, "fp_tol must be > 0");
  require(config.alpha0 > 0.0, "alpha0 must be > 0");
  require(config.schedule_p > 0.5 && config.schedule_p <= 1.0,
          "schedule_p must lie in (0.5, 1]");
  require(config.schedule_offset > 0.0, "schedule_offset must be > 0");
}

inline double step_size(const DynamicsConfig& config, long l) {
  return config.alpha0 / std::pow(l + config.schedule_offset,
                                  config.schedule_p);
}

// h(pi) = epsilon * sum_a pi(a) log pi(a), with 0 log 0 = 0. Convex,
// minimized at the uniform row with value -epsilon * log |A|.
inline double entropy(const Eigen::Ref<const Eigen::RowVectorXd>& policy_row,
                      double epsilon) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < policy_row.size(); ++a) {
    const double p = policy_row[a];
    if (p > 0.0) acc += p * std::log(p);
  }
  return epsilon * acc;
}

// sigma(y): per-state soft-max rows pi(a|s) proportional to exp(y(s,a)/eps).
inline PolicyProfile choice_map(const TableSet& y, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("choice_map: epsilon <= 0");
  PolicyProfile profile(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    profile[i] = softmax_rows(y[i], epsilon);
  }
  return profile;
}

// F(pi, y) = sum_s [eps * logsumexp(y(s,.)/eps) - (<y(s,.), pi(.|s)> - h(pi))]
// for one player. Nonnegative; zero exactly when pi = sigma(y).
inline double fenchel_coupling_player(const Matrix& policy, const Matrix& y,
                                      double epsilon) {
  if (policy.rows() != y.rows() || policy.cols() != y.cols()) {
    throw std::invalid_argument("fenchel_coupling: shape mismatch");
  }
  double total = 0.0;
  for (Eigen::Index s = 0; s < y.rows(); ++s) {
    const double lse = epsilon * logsumexp(y.row(s).transpose() / epsilon);
    const double inner = y.row(s).dot(policy.row(s));
    total += lse - (inner - entropy(policy.row(s), epsilon));
  }
  return total;
}

// Sum of per-player couplings; the Lyapunov candidate of the dynamics.
inline double fenchel_coupling(const PolicyProfile& profile, const TableSet& y,
                               double epsilon) {
  if (profile.size() != y.size()) {
    throw std::invalid_argument("fenchel_coupling: player count mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += fenchel_coupling_player(profile[i], y[i], epsilon);
  }
  return total;
}

struct ScoreState {
  TableSet y;
  double t = 0.0;  // elapsed dynamics time (CTLD) or iteration count (DTLD)
};

enum class RunStatus { kConverged, kBudgetExhausted, kDiverged };

inline const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kBudgetExhausted: return "budget_exhausted";
    case RunStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

struct TraceRecord {
  double time = 0.0;   // dynamics time (CTLD) or iteration index (DTLD/EPO)
  long iteration = 0;  // integrator step / iteration index
  double residual = 0.0;
  // NaN marks "not computed at this record"
  double nashconv = std::numeric_limits<double>::quiet_NaN();
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

struct LearningTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::kBudgetExhausted;
};

struct TraceOptions {
  long record_every = 1;    // residual/Lyapunov cadence, in steps
  long nashconv_every = 0;  // 0: only at the final record
  const PolicyProfile* lyapunov_reference = nullptr;
  double br_tol = 1e-10;  // tolerance of the NashConv oracle
};

struct DynamicsRun {
  ScoreState state;
  PolicyProfile profile;  // sigma(final y)
  double residual = 0.0;
  LearningTrace trace;
};

namespace dynamics_detail {

// w(sigma(y)): the target field of both dynamics.
inline TableSet weighted_advantage_of_scores(const MarkovGame& game,
                                             const TableSet& y,
                                             double epsilon) {
  return evaluate(game, choice_map(y, epsilon)).weighted_advantages;
}

inline double score_residual(const TableSet& w, const TableSet& y) {
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    r = std::max(r, (w[i] - y[i]).cwiseAbs().maxCoeff());
  }
  return r;
}

// One RK4 update of dy/dt = eta (w(sigma(y)) - y), reusing the caller's
// field evaluation at y as stage one.
inline TableSet rk4_step(const MarkovGame& game, const TableSet& y,
                         const TableSet& w_at_y, const DynamicsConfig& config) {
  const int n = static_cast<int>(y.size());
  const double h = config.step;
  const double eta = config.eta;

  TableSet k1(n), stage(n), k2(n), k3(n), k4(n), out(n);
  for (int i = 0; i < n; ++i) k1[i] = eta * (w_at_y[i] - y[i]);
  for (int i = 0; i < n; ++i) stage[i] = y[i] + (0.5 * h) * k1[i];
  TableSet w = weighted_advantage_of_scores(game, stage, config.epsilon);
  for (int i = 0; i < n; ++i) k2[i] = eta * (w[i] - stage[i]);
  for (int i = 0; i < n; ++i) stage[i] = y[i] + (0.5 * h) * k2[i];
  w = weighted_advantage_of_scores(game, stage, config.epsilon);
  for (int i = 0; i < n; ++i) k3[i] = eta * (w[i] - stage[i]);
  for (int i = 0; i < n; ++i) stage[i] = y[i] + h * k3[i];
  w = weighted_advantage_of_scores(game, stage, config.epsilon);
  for (int i = 0; i < n; ++i) k4[i] = eta * (w[i] - stage[i]);
  for (int i = 0; i < n; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// Shared discrete update: y += alpha * eta * (what - y). The sample-based
// optimizer reuses this verbatim so its exact mode retraces the noise-free
// iteration bit for bit.
inline void dtld_update(TableSet& y, const TableSet& what, double alpha,
                        double eta) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += (alpha * eta) * (what[i] - y[i]);
  }
}

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dynamics_detail

// ODE field at y (exposed for tests): eta * (w(sigma(y)) - y).
inline TableSet score_field(const MarkovGame& game, const TableSet& y,
                            const DynamicsConfig& config) {
  TableSet field =
      dynamics_detail::weighted_advantage_of_scores(game, y, config.epsilon);
  for (std::size_t i = 0; i < y.size(); ++i) {
    field[i] = config.eta * (field[i] - y[i]);
  }
  return field;
}

// One fixed-step RK4 update of the continuous dynamics.
inline ScoreState ctld_step(const MarkovGame& game, const ScoreState& state,
                            const DynamicsConfig& config) {
  validate_dynamics_config(config);
  const TableSet w = dynamics_detail::weighted_advantage_of_scores(
      game, state.y, config.epsilon);
  ScoreState next;
  next.y = dynamics_detail::rk4_step(game, state.y, w, config);
  next.t = state.t + config.step;
  return next;
}

// One noise-free discrete update with step size alpha_l.
inline ScoreState dtld_step_exact(const MarkovGame& game,
                                  const ScoreState& state,
                                  const DynamicsConfig& config, long l) {
  if (l < 0) throw std::invalid_argument("dtld_step_exact: l < 0");
  const TableSet w = dynamics_detail::weighted_advantage_of_scores(
      game, state.y, config.epsilon);
  ScoreState next = state;
  dynamics_detail::dtld_update(next.y, w, step_size(config, l), config.eta);
  next.t = static_cast<double>(l + 1);
  return next;
}

namespace dynamics_detail {

// Common driver for both dynamics. Advance(y, w_at_y, iter) performs one
// update in place and returns the new dynamics time.
template <typename Advance>
DynamicsRun run_dynamics(const MarkovGame& game, const TableSet& y0,
                         const DynamicsConfig& config,
                         const TraceOptions& options, bool budget_is_time,
                         Advance advance) {
  validate_dynamics_config(config);
  WallClock clock;

  DynamicsRun run;
  run.state.y = y0;
  run.state.t = 0.0;
  run.trace.status = RunStatus::kBudgetExhausted;

  for (long iter = 0;; ++iter) {
    const PolicyProfile profile = choice_map(run.state.y, config.epsilon);
    const TableSet w = evaluate(game, profile).weighted_advantages;
    const bool finite = all_finite(w) && all_finite(run.state.y);
    const double residual =
        finite ? score_residual(w, run.state.y)
               : std::numeric_limits<double>::quiet_NaN();

    const bool converged = finite && residual < config.fp_tol;
    const bool out_of_budget =
        budget_is_time ? (run.state.t >= config.max_time ||
                          iter >= config.max_iters)
                       : (iter >= config.max_iters);
    const bool stopping = converged || !finite || out_of_budget;

    const bool scheduled_record =
        options.record_every > 0 && iter % options.record_every == 0;
    if (stopping || scheduled_record) {
      TraceRecord rec;
      rec.time = run.state.t;
      rec.iteration = iter;
      rec.residual = residual;
      if (finite &&
          (stopping || (options.nashconv_every > 0 &&
                        iter % options.nashconv_every == 0))) {
        rec.nashconv = nash_conv(game, profile, options.br_tol).total;
      }
      if (options.lyapunov_reference != nullptr && finite) {
        rec.lyapunov = fenchel_coupling(*options.lyapunov_reference,
                                        run.state.y, config.epsilon);
      }
      rec.wall_ms = clock.elapsed_ms();
      run.trace.records.push_back(rec);
    }

    if (stopping) {
      run.trace.status = converged ? RunStatus::kConverged
                         : finite  ? RunStatus::kBudgetExhausted
                                   : RunStatus::kDiverged;
      run.profile = profile;
      run.residual = residual;
      return run;
    }
    run.state.t = advance(run.state.y, w, iter);
  }
}

}  // namespace dynamics_detail

// Integrates the continuous dynamics until the fixed-point residual
// ||w(sigma(y)) - y||_inf drops below fp_tol or the time/iteration budget
// runs out. Non-convergence is a status, not an error.
inline DynamicsRun run_ctld(const MarkovGame& game, const TableSet& y0,
                            const DynamicsConfig& config,
                            const TraceOptions& options = {}) {
  return dynamics_detail::run_dynamics(
      game, y0, config, options, /*budget_is_time=*/true,
      [&game, &config](TableSet& y, const TableSet& w, long iter) {
        y = dynamics_detail::rk4_step(game, y, w, config);
        return config.step * static_cast<double>(iter + 1);
      });
}

// Iterates the noise-free discrete dynamics under the configured step-size
// schedule until the same residual target or max_iters.
inline DynamicsRun run_dtld_exact(const MarkovGame& game, const TableSet& y0,
                                  const DynamicsConfig& config,
                                  const TraceOptions& options = {}) {
  return dynamics_detail::run_dynamics(
      game, y0, config, options, /*budget_is_time=*/false,
      [&config](TableSet& y, const TableSet& w, long iter) {
        dynamics_detail::dtld_update(y, w, step_size(config, iter),
                                     config.eta);
        return static_cast<double>(iter + 1);
      });
}

// max_i ||sigma_i(w^i(profile)) - pi^i||_inf: how far the profile is from
// being a fixed point of the entropic response map.
inline double stationarity_check(const MarkovGame& game,
                                 const PolicyProfile& profile,
                                 double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("stationarity_check: epsilon <= 0");
  }
  const EvalReport report = evaluate(game, profile);
  double residual = 0.0;
  for (int i = 0; i < game.num_players; ++i) {
    const Matrix response =
        softmax_rows(report.weighted_advantages[i], epsilon);
    residual = std::max(residual,
                        (response - profile[i]).cwiseAbs().maxCoeff());
  }
  return residual;
}

// Entropy-regularized payoff U^i = u^i - sum_s h(pi^i(s,.)), states summed
// unweighted (matching the coupling's aggregation).
inline double regularized_payoff(const MarkovGame& game,
                                 const PolicyProfile& profile, int player,
                                 double epsilon) {
  const EvalReport report = evaluate(game, profile);
  double h_total = 0.0;
  for (int s = 0; s < game.num_states; ++s) {
    h_total += entropy(profile[player].row(s), epsilon);
  }
  return report.payoffs[player] - h_total;
}

struct NashEvidence {
  double stationarity_residual = 0.0;
  // max over probed unilateral deviations of U^i(deviation) - U^i(profile);
  // <= tol supports the fixed point being a Nash distribution.
  double max_regret = 0.0;
  int deviations = 0;
};

// Finite certificate for a candidate fixed point: stationarity residual plus
// a random-deviation probe of the regularized payoffs.
inline NashEvidence nash_evidence_probe(const MarkovGame& game,
                                        const PolicyProfile& profile,
                                        double epsilon, int deviations = 100,
                                        std::uint64_t seed = 0) {
  NashEvidence evidence;
  evidence.stationarity_residual = stationarity_check(game, profile, epsilon);
  evidence.deviations = deviations;

  std::vector<double> base_payoff(game.num_players);
  std::vector<double> base_entropy(game.num_players, 0.0);
  const EvalReport report = evaluate(game, profile);
  for (int i = 0; i < game.num_players; ++i) {
    base_payoff[i] = report.payoffs[i];
    for (int s = 0; s < game.num_states; ++s) {
      base_entropy[i] += entropy(profile[i].row(s), epsilon);
    }
  }

  double max_regret = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < deviations; ++d) {
    const int player = d % game.num_players;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
    PolicyProfile deviated = profile;
    double dev_entropy = 0.0;
    for (int s = 0; s < game.num_states; ++s) {
      deviated[player].row(s) =
          rng.dirichlet(game.action_counts[player]).transpose();
      dev_entropy += entropy(deviated[player].row(s), epsilon);
    }
    const double dev_payoff = evaluate(game, deviated).payoffs[player];
    const double regret = (dev_payoff - dev_entropy) -
                          (base_payoff[player] - base_entropy[player]);
    max_regret = std::max(max_regret, regret);
  }
  evidence.max_regret = deviations > 0 ? max_regret : 0.0;
  return evidence;
}

}  // namespace nashdyn

#endif  // NASHDYN_DYNAMICS_HPP_
