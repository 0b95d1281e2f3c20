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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "nashdyn/builtin_games.hpp"
#include "nashdyn/dynamics.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"
#include "nashdyn/sampling.hpp"

namespace nashdyn {
namespace {

// Single state, single action, reward 1 for everyone: V = 1 / (1 - gamma)
// in closed form, which makes truncation error exactly computable.
MarkovGame constant_reward_game(double gamma = 0.9) {
  MarkovGame game;
  game.num_players = 2;
  game.num_states = 1;
  game.action_counts = {1, 1};
  game.gamma = gamma;
  game.reward_bound = 1.0;
  game.rewards.assign(2, Matrix::Ones(1, 1));
  game.transitions.assign(1, Matrix::Ones(1, 1));
  game.rho0 = Vector::Ones(1);
  return game;
}

PolicyProfile mixed_pennies_profile(const MarkovGame& game) {
  PolicyProfile profile = uniform_profile(game);
  profile[0] << 0.6, 0.4;
  profile[1] << 0.7, 0.3;
  return profile;
}

TEST(DefaultHorizon, MatchesClosedForm) {
  // ceil(ln 1e-3 / ln 0.9) = ceil(65.56) = 66
  EXPECT_EQ(default_horizon(0.9), 66);
  EXPECT_EQ(default_horizon(0.99, 1e-2), 459);
}

TEST(Rollout, IsDeterministicPerSeed) {
  const MarkovGame game = build_cournot(2);
  const PolicyProfile profile = uniform_profile(game);
  const Trajectory a = rollout(game, profile, 25, 42);
  const Trajectory b = rollout(game, profile, 25, 42);
  const Trajectory c = rollout(game, profile, 25, 43);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.joint_actions, b.joint_actions);
  EXPECT_EQ(a.rewards, b.rewards);
  EXPECT_EQ(a.action_probs, b.action_probs);
  EXPECT_NE(a.joint_actions, c.joint_actions);
}

TEST(Rollout, PureProfileIsFullyPredictable) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = pure_profile(game, {0, 1});  // H vs T
  const Trajectory traj = rollout(game, profile, 10, 5);
  for (int k = 0; k < traj.horizon(); ++k) {
    EXPECT_EQ(traj.states[k], 0);
    EXPECT_EQ(traj.joint_actions[k], game.encode_joint({0, 1}));
    EXPECT_DOUBLE_EQ(traj.rewards(k, 0), -1.0);
    EXPECT_DOUBLE_EQ(traj.rewards(k, 1), 1.0);
    EXPECT_DOUBLE_EQ(traj.action_probs(k, 0), 1.0);
    EXPECT_DOUBLE_EQ(traj.action_probs(k, 1), 1.0);
  }
  EXPECT_THROW(rollout(game, profile, 0, 5), std::invalid_argument);
}

TEST(Rollout, JointActionFrequenciesMatchTheProfile) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = mixed_pennies_profile(game);
  std::vector<long> counts(4, 0);
  const long episodes = 20000;
  for (long e = 0; e < episodes; ++e) {
    const Trajectory traj = rollout(game, profile, 1, derive_seed(99, e));
    counts[traj.joint_actions[0]] += 1;
  }
  const double expected[] = {0.6 * 0.7, 0.6 * 0.3, 0.4 * 0.7, 0.4 * 0.3};
  for (int j = 0; j < 4; ++j) {
    const double p = expected[j];
    const double se = std::sqrt(p * (1.0 - p) / episodes);
    EXPECT_NEAR(static_cast<double>(counts[j]) / episodes, p, 5.0 * se)
        << "joint action " << j;
  }
}

TEST(Returns, GeometricSeriesForConstantRewards) {
  const MarkovGame game = constant_reward_game();
  const Trajectory traj =
      rollout(game, uniform_profile(game), 200, 1);
  const Vector g = returns(traj, game.gamma, 0);
  EXPECT_NEAR(g[0], (1.0 - std::pow(0.9, 200)) / 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(g[199], 1.0);
  EXPECT_NEAR(g[0], 10.0, 1e-8);
}

TEST(Returns, MatchesForwardPowerSum) {
  const MarkovGame game = build_cournot(2);
  const Trajectory traj = rollout(game, uniform_profile(game), 10, 77);
  const Vector g = returns(traj, game.gamma, 1);
  for (int k = 0; k < 10; ++k) {
    double direct = 0.0;
    for (int t = k; t < 10; ++t) {
      direct += std::pow(game.gamma, t - k) * traj.rewards(t, 1);
    }
    EXPECT_NEAR(g[k], direct, 1e-12);
  }
}

TEST(EmpiricalValueTable, SingleEpisodeMatchesHandAverage) {
  const MarkovGame game = build_matching_pennies();
  const Trajectory traj =
      rollout(game, mixed_pennies_profile(game), 30, 3);
  EmpiricalValueTable table(game);
  update_empirical_values(table, traj, game.gamma);

  const Vector g = returns(traj, game.gamma, 0);
  double num = 0.0, den = 0.0, disc = 1.0;
  for (int k = 0; k < 30; ++k) {
    num += disc * g[k];
    den += disc;
    disc *= game.gamma;
  }
  EXPECT_NEAR(table.estimate(0, 0), num / den, 1e-12);
  EXPECT_NEAR(table.weight[0][0], den, 1e-12);
}

TEST(EmpiricalValueTable, UnvisitedStatesEstimateZero) {
  const MarkovGame game = build_cournot(2);
  EmpiricalValueTable table(game);
  EXPECT_EQ(table.estimate(0, 2), 0.0);
  Trajectory traj;
  traj.states = {0, 0, 0};
  traj.joint_actions = {0, 0};
  traj.rewards = Matrix::Ones(2, 2);
  traj.action_probs = Matrix::Ones(2, 2);
  update_empirical_values(table, traj, game.gamma);
  EXPECT_GT(table.weight[0][0], 0.0);
  EXPECT_EQ(table.estimate(1, 1), 0.0);
  EXPECT_EQ(table.estimate(1, 2), 0.0);
}

TEST(EmpiricalValueTable, ConvergesWithinThreeStandardErrors) {
  // Single state: every episode contributes the same visit weights, so the
  // table estimate is exactly the mean of per-episode ratios and its
  // standard error can be measured from their spread.
  const MarkovGame game = build_biased_matching_pennies();
  const PolicyProfile profile = uniform_profile(game);
  const double v_exact = evaluate(game, profile).values[0][0];

  const long episodes = 4000;
  const int horizon = 132;
  EmpiricalValueTable table(game);
  std::vector<double> ratios;
  ratios.reserve(episodes);
  for (long e = 0; e < episodes; ++e) {
    const Trajectory traj =
        rollout(game, profile, horizon, derive_seed(11, e));
    update_empirical_values(table, traj, game.gamma);
    const Vector g = returns(traj, game.gamma, 0);
    double num = 0.0, den = 0.0, disc = 1.0;
    for (int k = 0; k < horizon; ++k) {
      num += disc * g[k];
      den += disc;
      disc *= game.gamma;
    }
    ratios.push_back(num / den);
  }
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(episodes);
  double var = 0.0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  var /= static_cast<double>(episodes - 1);
  const double se = std::sqrt(var / static_cast<double>(episodes));

  // Mixing later starting points shrinks the effective tail; allow the full
  // truncated-tail bound on top of the sampling error.
  const double truncation =
      game.reward_bound * std::pow(game.gamma, horizon) / (1.0 - game.gamma) +
      std::abs(v_exact) * (1.0 - game.gamma) * horizon *
          std::pow(game.gamma, horizon);
  EXPECT_NEAR(table.estimate(0, 0), mean, 1e-10);
  EXPECT_NEAR(table.estimate(0, 0), v_exact, 3.0 * se + truncation);
}

TEST(Gae, LambdaZeroIsTheOneStepResidual) {
  const MarkovGame game = build_cournot(2);
  const Trajectory traj = rollout(game, uniform_profile(game), 12, 8);
  Vector values(3);
  values << 0.4, -1.3, 2.2;
  const Vector adv = gae(traj, values, game.gamma, 0.0, 0);
  for (int k = 0; k < 12; ++k) {
    const double delta = traj.rewards(k, 0) +
                         game.gamma * values[traj.states[k + 1]] -
                         values[traj.states[k]];
    EXPECT_NEAR(adv[k], delta, 1e-13);
  }
}

TEST(Gae, LambdaOneTelescopesToReturnMinusValue) {
  const MarkovGame game = build_cournot(2);
  const Trajectory traj = rollout(game, uniform_profile(game), 12, 9);
  Vector values(3);
  values << 0.7, 0.1, -0.5;
  const Vector adv = gae(traj, values, game.gamma, 1.0, 1);
  const Vector g = returns(traj, game.gamma, 1);
  const int H = traj.horizon();
  for (int k = 0; k < H; ++k) {
    const double expected = g[k] - values[traj.states[k]] +
                            std::pow(game.gamma, H - k) *
                                values[traj.states[H]];
    EXPECT_NEAR(adv[k], expected, 1e-12);
  }
  EXPECT_THROW(gae(traj, values, game.gamma, 1.5, 0),
               std::invalid_argument);
}

TEST(EstimateW, UnbiasedModeRecoversExactWeightedAdvantages) {
  // With the exact values as baseline the estimator targets w = rho * A
  // entry for entry (with b = 0 it would estimate rho * Q instead, the same
  // rows up to a state-only shift).
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = mixed_pennies_profile(game);
  const EvalReport exact = evaluate(game, profile);
  std::vector<Vector> values = {exact.values[0], exact.values[1]};

  const long episodes = 10000;
  const int horizon = 132;
  const WhatEstimate est = estimate_w(game, profile, episodes, horizon, 17,
                                      EstimatorMode::kUnbiased, values);
  EXPECT_EQ(est.episodes, episodes);
  const double truncation = 140.0 * std::pow(game.gamma, horizon) *
                            game.reward_bound / (1.0 - game.gamma);
  for (int i = 0; i < 2; ++i) {
    for (int a = 0; a < 2; ++a) {
      const double se = std::sqrt(est.variance[i](0, a) / episodes);
      EXPECT_NEAR(est.mean[i](0, a), exact.weighted_advantages[i](0, a),
                  3.0 * se + truncation)
          << "player " << i << " action " << a;
      EXPECT_GT(est.variance[i](0, a), 0.0);
    }
  }
}

TEST(EstimateW, GaeModeWithExactValuesRecoversW) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = mixed_pennies_profile(game);
  const EvalReport exact = evaluate(game, profile);
  std::vector<Vector> values = {exact.values[0], exact.values[1]};

  const long episodes = 10000;
  const WhatEstimate est =
      estimate_w(game, profile, episodes, 132, 23, EstimatorMode::kGae,
                 values, 0.95);
  for (int i = 0; i < 2; ++i) {
    for (int a = 0; a < 2; ++a) {
      const double se = std::sqrt(est.variance[i](0, a) / episodes);
      EXPECT_NEAR(est.mean[i](0, a), exact.weighted_advantages[i](0, a),
                  3.0 * se + 0.01)
          << "player " << i << " action " << a;
    }
  }
}

TEST(EstimateW, ResultsDoNotDependOnWorkerCount) {
  const MarkovGame game = build_cournot(2);
  const PolicyProfile profile = uniform_profile(game);
  const WhatEstimate one =
      estimate_w(game, profile, 500, 40, 31, EstimatorMode::kUnbiased, {},
                 0.95, /*workers=*/1);
  const WhatEstimate three =
      estimate_w(game, profile, 500, 40, 31, EstimatorMode::kUnbiased, {},
                 0.95, /*workers=*/3);
  for (int i = 0; i < game.num_players; ++i) {
    EXPECT_EQ(one.mean[i], three.mean[i]);
    EXPECT_EQ(one.variance[i], three.variance[i]);
  }
}

TEST(EstimateW, VarianceScaleIsStableAcrossSampleSizes) {
  // The per-episode variance estimate targets the same quantity whatever M.
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = mixed_pennies_profile(game);
  const WhatEstimate small =
      estimate_w(game, profile, 2000, 66, 7, EstimatorMode::kUnbiased);
  const WhatEstimate large =
      estimate_w(game, profile, 8000, 66, 7, EstimatorMode::kUnbiased);
  const double a = small.variance[0].mean();
  const double b = large.variance[0].mean();
  EXPECT_GT(a, 0.0);
  EXPECT_LT(std::abs(a / b - 1.0), 0.5);
}

TEST(EstimateW, SingleEpisodeHasZeroVariance) {
  const MarkovGame game = build_matching_pennies();
  const WhatEstimate est = estimate_w(game, uniform_profile(game), 1, 20, 3,
                                      EstimatorMode::kUnbiased);
  EXPECT_EQ(est.variance[0](0, 0), 0.0);
  EXPECT_EQ(est.variance[1].maxCoeff(), 0.0);
  EXPECT_THROW(estimate_w(game, uniform_profile(game), 0, 20, 3,
                          EstimatorMode::kUnbiased),
               std::invalid_argument);
}

TEST(EstimateW, BaselineShiftsRowsUniformlyInConditionalExpectation) {
  // Averaging the one-step contribution over player 0's action (weighted by
  // the sampling probabilities) turns the baseline into the same -b shift on
  // every entry of the visited row: the importance weight cancels the
  // probability of whichever action was taken.
  const MarkovGame game = build_matching_pennies();
  const double p0 = 0.6;
  const double b = 7.25;
  std::vector<Vector> baseline = {Vector::Constant(1, b),
                                  Vector::Constant(1, b)};

  Matrix plain_row = Matrix::Zero(1, 2);
  Matrix offset_row = Matrix::Zero(1, 2);
  for (int a0 = 0; a0 < 2; ++a0) {
    Trajectory traj;
    traj.states = {0, 0};
    traj.joint_actions = {game.encode_joint({a0, 1})};
    traj.rewards = Matrix::Zero(1, 2);
    for (int i = 0; i < 2; ++i) {
      traj.rewards(0, i) = game.rewards[i](0, traj.joint_actions[0]);
    }
    traj.action_probs = Matrix::Ones(1, 2);
    traj.action_probs(0, 0) = a0 == 0 ? p0 : 1.0 - p0;
    const double weight = traj.action_probs(0, 0);

    TableSet out = zero_tables(game);
    sampling_detail::episode_contribution(
        game, traj, EstimatorMode::kUnbiased,
        sampling_detail::zero_baselines(game), 0.95, out);
    plain_row += weight * out[0];
    sampling_detail::episode_contribution(game, traj, EstimatorMode::kUnbiased,
                                          baseline, 0.95, out);
    offset_row += weight * out[0];
  }
  const Matrix shift = plain_row - offset_row;
  EXPECT_NEAR(shift(0, 0), b, 1e-12);
  EXPECT_NEAR(shift(0, 1), b, 1e-12);
}

TEST(EstimateW, ExactValueBaselineReducesVariance) {
  // Centering the returns on the state values shrinks the spread of the
  // per-episode contributions without moving their mean away from w.
  const MarkovGame game = build_cournot(2);
  const PolicyProfile profile = uniform_profile(game);
  const EvalReport exact = evaluate(game, profile);
  std::vector<Vector> values(game.num_players);
  for (int i = 0; i < game.num_players; ++i) values[i] = exact.values[i];

  const WhatEstimate plain = estimate_w(game, profile, 2000, 120, 13,
                                        EstimatorMode::kUnbiased);
  const WhatEstimate centered = estimate_w(game, profile, 2000, 120, 13,
                                           EstimatorMode::kUnbiased, values);
  for (int i = 0; i < game.num_players; ++i) {
    EXPECT_GT((plain.mean[i] - centered.mean[i]).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(centered.variance[i].sum(), plain.variance[i].sum());
    for (int s = 0; s < game.num_states; ++s) {
      for (int a = 0; a < game.action_counts[i]; ++a) {
        const double se = std::sqrt(centered.variance[i](s, a) / 2000.0);
        EXPECT_NEAR(centered.mean[i](s, a), exact.weighted_advantages[i](s, a),
                    4.0 * se + 0.05)
            << "player " << i << " state " << s << " action " << a;
      }
    }
  }
}

TEST(EstimateW, TruncationErrorIsExactlyTheDiscountedTail) {
  // Constant rewards make |G_0 - V| = gamma^H R / (1 - gamma) an equality.
  const MarkovGame game = constant_reward_game();
  const int horizon = 30;
  const Trajectory traj =
      rollout(game, uniform_profile(game), horizon, 2);
  const Vector g = returns(traj, game.gamma, 0);
  const double v = 1.0 / (1.0 - game.gamma);
  const double tail = std::pow(game.gamma, horizon) * game.reward_bound /
                      (1.0 - game.gamma);
  EXPECT_NEAR(v - g[0], tail, 1e-12);
}

TEST(EstimateW, RejectsCorruptActionProbabilities) {
  const MarkovGame game = build_matching_pennies();
  Trajectory traj = rollout(game, uniform_profile(game), 5, 1);
  traj.action_probs(2, 1) = 0.0;
  TableSet out = zero_tables(game);
  EXPECT_THROW(
      sampling_detail::episode_contribution(
          game, traj, EstimatorMode::kUnbiased,
          sampling_detail::zero_baselines(game), 0.95, out),
      std::runtime_error);
}

// --- run_tabular_epo ---

TEST(TabularEpo, ExactModeRetracesTheNoiseFreeDynamics) {
  const MarkovGame game = build_biased_matching_pennies();
  DynamicsConfig config;
  config.epsilon = 0.5;
  config.max_iters = 200;
  Rng rng(91);
  TableSet y0 = zero_tables(game);
  for (auto& t : y0) {
    t(0, 0) = rng.uniform(-0.5, 0.5);
    t(0, 1) = rng.uniform(-0.5, 0.5);
  }
  EpoOptions options;
  options.mode = EpoMode::kExact;
  const EpoRun epo = run_tabular_epo(game, config, options, y0);
  const DynamicsRun direct = run_dtld_exact(game, y0, config);
  ASSERT_EQ(epo.trace.records.size(), direct.trace.records.size());
  EXPECT_EQ(epo.trace.status, direct.trace.status);
  for (int i = 0; i < game.num_players; ++i) {
    EXPECT_EQ(epo.state.y[i], direct.state.y[i]);  // bit for bit
    EXPECT_EQ(epo.profile[i], direct.profile[i]);
  }
}

TEST(TabularEpo, DeterministicAndWorkerCountIndependent) {
  const MarkovGame game = build_matching_pennies();
  DynamicsConfig config;
  config.epsilon = 0.5;
  config.max_iters = 5;
  EpoOptions options;
  options.episodes_per_iter = 96;
  options.horizon = 30;
  options.seed = 5;
  options.workers = 1;
  const EpoRun a = run_tabular_epo(game, config, options, zero_tables(game));
  const EpoRun b = run_tabular_epo(game, config, options, zero_tables(game));
  options.workers = 3;
  const EpoRun c = run_tabular_epo(game, config, options, zero_tables(game));
  for (int i = 0; i < game.num_players; ++i) {
    EXPECT_EQ(a.state.y[i], b.state.y[i]);
    EXPECT_EQ(a.state.y[i], c.state.y[i]);
  }
  EXPECT_EQ(a.trace.records.back().residual,
            c.trace.records.back().residual);
}

TEST(TabularEpo, WindowedReplayRunsAndStaysFinite) {
  const MarkovGame game = build_cournot(2);
  DynamicsConfig config;
  config.epsilon = 0.3;
  config.max_iters = 10;
  EpoOptions options;
  options.episodes_per_iter = 32;
  options.horizon = 40;
  options.buffer_window = 3;
  options.mode = EpoMode::kGae;
  options.seed = 9;
  const EpoRun run =
      run_tabular_epo(game, config, options, zero_tables(game));
  EXPECT_EQ(run.trace.status, RunStatus::kBudgetExhausted);
  EXPECT_TRUE(all_finite(run.state.y));
  ASSERT_FALSE(run.trace.records.empty());
  EXPECT_EQ(run.trace.records.back().iteration, config.max_iters);
  EXPECT_FALSE(std::isnan(run.trace.records.back().nashconv));
  // The value table only holds the windowed episodes.
  EXPECT_GT(run.values.weight[0].sum(), 0.0);
}

TEST(TabularEpo, LearnsOnMatchingPennies) {
  // A short-horizon pennies game keeps the field's rotation slow enough for
  // stable harmonic steps (the offset keeps even the first step below the
  // spiral-stability bound), so from a saturated start the sampled run must
  // end near the uniform equilibrium. Everything is seeded and the estimate
  // reduction is order-fixed, so the numbers are reproducible.
  const MarkovGame game = build_matching_pennies(0.1);
  DynamicsConfig config;
  config.epsilon = 0.1;
  config.eta = 2.0;
  config.schedule_offset = 40.0;
  config.max_iters = 500;
  EpoOptions options;
  options.mode = EpoMode::kGae;
  options.lambda = 0.0;
  options.episodes_per_iter = 64;
  options.horizon = 100;
  options.seed = 12;
  TableSet y0 = zero_tables(game);
  y0[0] << 1.5, -1.5;
  y0[1] << -1.5, 1.5;
  const double initial = nash_conv(game, choice_map(y0, config.epsilon)).total;
  EXPECT_GT(initial, 2.0);

  const EpoRun run = run_tabular_epo(game, config, options, y0);
  ASSERT_GE(run.trace.records.size(), 2u);
  const double final_nc = run.trace.records.back().nashconv;
  EXPECT_LT(final_nc, 0.3 * initial);
  EXPECT_LT(run.trace.records.back().residual,
            0.5 * run.trace.records.front().residual);
}

}  // namespace
}  // namespace nashdyn
