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

#include <stdexcept>

#include "gtest/gtest.h"
#include "nashdyn/baselines.hpp"
#include "nashdyn/builtin_games.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {
namespace {

// Both players have a strictly dominant second action; any best-response
// scheme must land on (1, 1) immediately and stay there.
MarkovGame dominant_action_game() {
  MarkovGame game;
  game.num_players = 2;
  game.num_states = 1;
  game.action_counts = {2, 2};
  game.gamma = 0.9;
  game.reward_bound = 1.0;
  game.rewards.assign(2, Matrix::Zero(1, 4));
  // joint order (a0, a1): (0,0), (0,1), (1,0), (1,1)
  game.rewards[0] << 0.0, 0.0, 1.0, 1.0;
  game.rewards[1] << 0.0, 1.0, 0.0, 1.0;
  game.transitions.assign(1, Matrix::Ones(4, 1));
  game.rho0 = Vector::Ones(1);
  return game;
}

MarkovGame single_agent_chain() {
  MarkovGame game;
  game.num_players = 1;
  game.num_states = 2;
  game.action_counts = {2};
  game.gamma = 0.9;
  game.reward_bound = 1.0;
  game.rewards.assign(1, Matrix::Zero(2, 2));
  game.rewards[0] << 0.0, 1.0,   // state 0: action 1 pays
                     1.0, 0.0;   // state 1: action 0 pays
  game.transitions.assign(2, Matrix::Zero(2, 2));
  game.transitions[0] << 1.0, 0.0,  // action 0 stays, action 1 flips
                         0.0, 1.0;
  game.transitions[1] << 1.0, 0.0,
                         0.0, 1.0;
  game.rho0 = Vector::Constant(2, 0.5);
  return game;
}

bool profiles_equal(const PolicyProfile& a, const PolicyProfile& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] - b[i]).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

TEST(IteratedBestResponse, CyclesOnMatchingPennies) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile start = pure_profile(game, {0, 0});  // heads, heads
  const BaselineRun run = run_ibr(game, start, 12);
  ASSERT_EQ(run.profiles.size(), 13u);
  ASSERT_EQ(run.nashconv.size(), 13u);
  EXPECT_EQ(run.algorithm, "ibr");

  // Simultaneous updates walk (H,H) -> (H,T) -> (T,T) -> (T,H) -> (H,H).
  EXPECT_TRUE(profiles_equal(run.profiles[1], pure_profile(game, {0, 1})));
  EXPECT_TRUE(profiles_equal(run.profiles[2], pure_profile(game, {1, 1})));
  EXPECT_TRUE(profiles_equal(run.profiles[3], pure_profile(game, {1, 0})));
  EXPECT_TRUE(profiles_equal(run.profiles[4], start));
  for (std::size_t k = 0; k + 4 < run.profiles.size(); ++k) {
    EXPECT_TRUE(profiles_equal(run.profiles[k], run.profiles[k + 4]))
        << "period-4 cycle broken at " << k;
  }
  // Every pure iterate leaves the losing player a 20-point deviation; the
  // cycling baseline never gets anywhere near equilibrium.
  for (double value : run.nashconv) {
    EXPECT_NEAR(value, 20.0, 1e-8);
    EXPECT_GE(value, 5.0);
  }
}

TEST(IteratedBestResponse, SolvesDominantActionGameInstantly) {
  const MarkovGame game = dominant_action_game();
  const BaselineRun run = run_ibr(game, pure_profile(game, {0, 0}), 3);
  EXPECT_GT(run.nashconv[0], 1.0);
  EXPECT_TRUE(profiles_equal(run.profiles[1], pure_profile(game, {1, 1})));
  for (std::size_t k = 1; k < run.nashconv.size(); ++k) {
    EXPECT_NEAR(run.nashconv[k], 0.0, 1e-9);
    EXPECT_TRUE(profiles_equal(run.profiles[k], run.profiles[1]));
  }
}

TEST(IteratedBestResponse, SingleAgentIsSolvedInOneIteration) {
  const MarkovGame game = single_agent_chain();
  const BaselineRun run = run_ibr(game, uniform_profile(game), 2);
  EXPECT_GT(run.nashconv[0], 0.1);
  EXPECT_NEAR(run.nashconv[1], 0.0, 1e-9);
  EXPECT_NEAR(run.profiles[1][0](0, 1), 1.0, 1e-15);
  EXPECT_NEAR(run.profiles[1][0](1, 0), 1.0, 1e-15);
}

TEST(IteratedBestResponse, RejectsBadIterationCount) {
  const MarkovGame game = build_matching_pennies();
  EXPECT_THROW(run_ibr(game, uniform_profile(game), 0),
               std::invalid_argument);
  EXPECT_THROW(run_fp(game, uniform_profile(game), -1),
               std::invalid_argument);
}

TEST(FictitiousPlay, FirstStepJumpsToTheBestResponse) {
  const MarkovGame game = build_matching_pennies();
  const PolicyProfile start = pure_profile(game, {0, 0});
  const BaselineRun run = run_fp(game, start, 1);
  // Weight 1/(0+1) = 1 discards the start entirely.
  EXPECT_TRUE(profiles_equal(run.profiles[1], pure_profile(game, {0, 1})));
}

TEST(FictitiousPlay, IteratesStayOnTheSimplex) {
  const MarkovGame game = build_matching_pennies();
  const BaselineRun run = run_fp(game, pure_profile(game, {0, 0}), 50);
  for (const PolicyProfile& profile : run.profiles) {
    for (const Matrix& policy : profile) {
      for (Eigen::Index s = 0; s < policy.rows(); ++s) {
        EXPECT_NEAR(policy.row(s).sum(), 1.0, 1e-12);
        EXPECT_GE(policy.row(s).minCoeff(), 0.0);
      }
    }
  }
}

TEST(FictitiousPlay, AveragingMakesProgressOnMatchingPennies) {
  const MarkovGame game = build_matching_pennies();
  const BaselineRun run = run_fp(game, pure_profile(game, {0, 0}), 200);
  ASSERT_EQ(run.nashconv.size(), 201u);
  EXPECT_LT(run.nashconv[200], run.nashconv[10]);
  EXPECT_LT(run.nashconv[200], 2.0);
  // The behavioral average drifts toward the uniform equilibrium.
  EXPECT_NEAR(run.profiles[200][0](0, 0), 0.5, 0.15);
  EXPECT_NEAR(run.profiles[200][1](0, 0), 0.5, 0.15);
}

TEST(FictitiousPlay, ConvergesOnTheDominantActionGame) {
  const MarkovGame game = dominant_action_game();
  const BaselineRun run = run_fp(game, pure_profile(game, {0, 0}), 60);
  EXPECT_LT(run.nashconv.back(), 0.4);  // averaging closes in on (1, 1)
  EXPECT_GT(run.profiles.back()[0](0, 1), 0.95);
  EXPECT_GT(run.profiles.back()[1](0, 1), 0.95);
}

}  // namespace
}  // namespace nashdyn
