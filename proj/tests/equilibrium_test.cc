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

#include <Eigen/Dense>
#include "gtest/gtest.h"
#include "nashdyn/builtin_games.hpp"
#include "nashdyn/equilibrium.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {
namespace {

PolicyProfile random_profile(const MarkovGame& game, std::uint64_t seed) {
  Rng rng(seed);
  PolicyProfile profile(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    profile[i].resize(game.num_states, game.action_counts[i]);
    for (int s = 0; s < game.num_states; ++s) {
      profile[i].row(s) = rng.dirichlet(game.action_counts[i]).transpose();
    }
  }
  return profile;
}

// Builds the MDP player i faces by marginalizing the joint tensors over the
// fixed opponents directly, without going through induced_mdp.
InducedMdp marginalize_by_hand(const MarkovGame& game,
                               const PolicyProfile& profile, int player) {
  InducedMdp mdp;
  mdp.gamma = game.gamma;
  mdp.rho0 = game.rho0;
  mdp.reward = Matrix::Zero(game.num_states, game.action_counts[player]);
  mdp.transition.assign(
      game.num_states,
      Matrix::Zero(game.action_counts[player], game.num_states));
  for (int s = 0; s < game.num_states; ++s) {
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      const std::vector<int> actions = game.decode_joint(j);
      double opponent_weight = 1.0;
      for (int k = 0; k < game.num_players; ++k) {
        if (k != player) opponent_weight *= profile[k](s, actions[k]);
      }
      const int a = actions[player];
      mdp.reward(s, a) += opponent_weight * game.rewards[player](s, j);
      mdp.transition[s].row(a) +=
          opponent_weight * game.transitions[s].row(j).transpose();
    }
  }
  return mdp;
}

// Evaluates a deterministic rule on an induced MDP with a fresh linear solve.
double rule_payoff(const InducedMdp& mdp, const std::vector<int>& rule) {
  const int num_states = static_cast<int>(mdp.reward.rows());
  Matrix system = Matrix::Identity(num_states, num_states);
  Vector reward(num_states);
  for (int s = 0; s < num_states; ++s) {
    system.row(s) -= mdp.gamma * mdp.transition[s].row(rule[s]);
    reward[s] = mdp.reward(s, rule[s]);
  }
  const Vector values = system.partialPivLu().solve(reward);
  return mdp.rho0.dot(values);
}

TEST(InducedMdp, MatchingPenniesVsPureOpponent) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = pure_profile(game, {0, 0});  // both play H
  const InducedMdp mdp = induced_mdp(game, profile, /*player=*/1);
  // Against heads, the mismatcher earns -1 for H and +1 for T.
  EXPECT_NEAR(mdp.reward(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(mdp.reward(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(mdp.transition[0](0, 0), 1.0, 1e-15);
  EXPECT_NEAR(mdp.transition[0](1, 0), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(mdp.gamma, game.gamma);
}

TEST(InducedMdp, MatchesDirectMarginalization) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomGameParams params;
    params.seed = 300 + seed;
    params.num_players = 2;
    params.num_states = 3;
    params.action_counts = {2, 3};
    const MarkovGame game = gen_random_game(params);
    const PolicyProfile profile = random_profile(game, 17 * seed + 1);
    for (int player = 0; player < 2; ++player) {
      const InducedMdp fast = induced_mdp(game, profile, player);
      const InducedMdp slow = marginalize_by_hand(game, profile, player);
      EXPECT_LT((fast.reward - slow.reward).cwiseAbs().maxCoeff(), 1e-12);
      for (int s = 0; s < game.num_states; ++s) {
        EXPECT_LT(
            (fast.transition[s] - slow.transition[s]).cwiseAbs().maxCoeff(),
            1e-12);
      }
    }
  }
}

TEST(InducedMdp, RejectsBadPlayer) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = uniform_profile(game);
  EXPECT_THROW(induced_mdp(game, profile, -1), std::invalid_argument);
  EXPECT_THROW(induced_mdp(game, profile, 2), std::invalid_argument);
}

TEST(BestResponse, ExploitsPureHeadsForTenPerDiscountedStep) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = pure_profile(game, {0, 0});
  const BestResponse br =
      best_response(game, profile, /*player=*/1, /*tol=*/1e-10);
  // +1 every step, discounted: 1 / (1 - 0.9) = 10.
  EXPECT_NEAR(br.payoff, 10.0, 1e-9);
  EXPECT_NEAR(br.policy(0, 1), 1.0, 1e-15);  // tails
  EXPECT_NEAR(br.values[0], 10.0, 1e-9);
}

TEST(BestResponse, UniformOpponentTiesBreakToLowestAction) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = uniform_profile(game);
  for (int player = 0; player < 2; ++player) {
    const BestResponse br = best_response(game, profile, player, 1e-10);
    EXPECT_NEAR(br.payoff, 0.0, 1e-12);
    EXPECT_NEAR(br.policy(0, 0), 1.0, 1e-15);
  }
}

TEST(BestResponse, AgreesWithValueIteration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomGameParams params;
    params.seed = 900 + seed;
    params.num_states = 4;
    params.action_counts = {3, 2};
    const MarkovGame game = gen_random_game(params);
    const PolicyProfile profile = random_profile(game, 23 * seed + 5);
    for (int player = 0; player < 2; ++player) {
      const InducedMdp mdp = induced_mdp(game, profile, player);
      const BestResponse br = best_response(game, profile, player, 1e-10);
      const Vector vi = value_iteration(mdp, 1e-13);
      EXPECT_NEAR(br.payoff, mdp.rho0.dot(vi), 1e-8);
      EXPECT_LT((br.values - vi).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(BestResponse, MatchesBruteForceOverDeterministicRules) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    RandomGameParams params;
    params.seed = 1200 + seed;
    params.num_states = 2;
    params.action_counts = {2, 3};
    const MarkovGame game = gen_random_game(params);
    const PolicyProfile profile = random_profile(game, 31 * seed + 7);
    for (int player = 0; player < 2; ++player) {
      const InducedMdp mdp = marginalize_by_hand(game, profile, player);
      const int num_actions = game.action_counts[player];
      double best = -std::numeric_limits<double>::infinity();
      std::vector<int> rule(game.num_states, 0);
      // Stationary deterministic rules suffice for MDP optimality, so the
      // enumeration is an exact oracle for the best-response payoff.
      for (int code = 0;
           code < static_cast<int>(std::pow(num_actions, game.num_states));
           ++code) {
        int rest = code;
        for (int s = 0; s < game.num_states; ++s) {
          rule[s] = rest % num_actions;
          rest /= num_actions;
        }
        best = std::max(best, rule_payoff(mdp, rule));
      }
      const BestResponse br = best_response(game, profile, player, 1e-10);
      EXPECT_NEAR(br.payoff, best, 1e-8);
    }
  }
}

TEST(BestResponse, NeverWorseThanCurrentPolicy) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomGameParams params;
    params.seed = 1500 + seed;
    params.num_states = 3;
    params.action_counts = {2, 2};
    const MarkovGame game = gen_random_game(params);
    const PolicyProfile profile = random_profile(game, 41 * seed + 3);
    const EvalReport report = evaluate(game, profile);
    for (int player = 0; player < 2; ++player) {
      const BestResponse br = best_response(game, profile, player, 1e-10);
      EXPECT_GE(br.payoff, report.payoffs[player] - 1e-9);
    }
  }
}

TEST(ValueIteration, SolvesSingleStateMdpInClosedForm) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = pure_profile(game, {0, 0});
  const InducedMdp mdp = induced_mdp(game, profile, 1);
  const Vector values = value_iteration(mdp, 1e-13);
  EXPECT_NEAR(values[0], 1.0 / (1.0 - game.gamma), 1e-9);
}

TEST(NashConv, UniformMatchingPenniesIsEquilibrium) {
  const MarkovGame game = build_matching_pennies();
  const NashConvReport report =
      nash_conv(game, uniform_profile(game), 1e-10);
  EXPECT_NEAR(report.gaps[0], 0.0, 1e-10);
  EXPECT_NEAR(report.gaps[1], 0.0, 1e-10);
  EXPECT_NEAR(report.total, 0.0, 1e-10);
}

TEST(NashConv, PureMatchingPenniesGapIsTwenty) {
  const MarkovGame game = build_matching_pennies();
  const NashConvReport report =
      nash_conv(game, pure_profile(game, {0, 0}), 1e-10);
  // The matcher is already best-responding; the mismatcher moves from -10
  // to +10 by switching to tails.
  EXPECT_NEAR(report.gaps[0], 0.0, 1e-9);
  EXPECT_NEAR(report.gaps[1], 20.0, 1e-9);
  EXPECT_NEAR(report.total, 20.0, 1e-9);
  EXPECT_NEAR(report.payoffs[0], 10.0, 1e-9);
  EXPECT_NEAR(report.payoffs[1], -10.0, 1e-9);
}

TEST(NashConv, GapsAreNonnegativeOnRandomProfiles) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomGameParams params;
    params.seed = 2100 + seed;
    params.num_players = 2 + static_cast<int>(seed % 2);
    params.num_states = 3;
    params.action_counts.assign(params.num_players, 2);
    const MarkovGame game = gen_random_game(params);
    const NashConvReport report =
        nash_conv(game, random_profile(game, 51 * seed + 9), 1e-10);
    for (double gap : report.gaps) EXPECT_GE(gap, -1e-8);
    EXPECT_GE(report.total, -1e-8);
  }
}

TEST(NashConv, SoccerUniformLandsInExpectedBand) {
  const MarkovGame game = build_soccer();
  const NashConvReport report =
      nash_conv(game, uniform_profile(game), 1e-10);
  EXPECT_GE(report.total, 1.0);
  EXPECT_LE(report.total, 15.0);
  // Zero-sum: payoffs cancel, so NashConv equals the sum of BR payoffs.
  EXPECT_NEAR(report.payoffs[0] + report.payoffs[1], 0.0, 1e-8);
}

TEST(LogitResponse, UniformScoresGiveUniformResponse) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = uniform_profile(game);
  for (int player = 0; player < 2; ++player) {
    const Matrix resp = logit_response(game, profile, player, 0.3);
    EXPECT_NEAR(resp(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(resp(0, 1), 0.5, 1e-12);
  }
}

TEST(LogitResponse, MatchesHandComputedWeightedAdvantages) {
  // p = (0.6, 0.4) vs q = (0.7, 0.3) gives player 0 advantages
  // (0.32, -0.48) and visitation 10, so w_0 = (3.2, -4.8).
  const MarkovGame game = build_matching_pennies();
  PolicyProfile profile = uniform_profile(game);
  profile[0] << 0.6, 0.4;
  profile[1] << 0.7, 0.3;
  const double epsilon = 1.0;
  const Matrix resp = logit_response(game, profile, 0, epsilon);
  const double zh = std::exp(3.2);
  const double zt = std::exp(-4.8);
  EXPECT_NEAR(resp(0, 0), zh / (zh + zt), 1e-12);
  EXPECT_NEAR(resp(0, 1), zt / (zh + zt), 1e-12);
}

TEST(LogitResponse, SmallTemperatureIsGreedy) {
  const MarkovGame game = build_matching_pennies();
  PolicyProfile profile = uniform_profile(game);
  profile[0] << 0.6, 0.4;
  profile[1] << 0.7, 0.3;
  const Matrix resp = logit_response(game, profile, 0, 0.01);
  EXPECT_GE(resp(0, 0), 1.0 - 1e-40);
}

TEST(LogitResponse, RejectsBadArguments) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile profile = uniform_profile(game);
  EXPECT_THROW(logit_response(game, profile, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(logit_response(game, profile, 5, 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace nashdyn
