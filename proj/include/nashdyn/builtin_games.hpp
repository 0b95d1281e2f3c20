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

#ifndef NASHDYN_BUILTIN_GAMES_HPP_
#define NASHDYN_BUILTIN_GAMES_HPP_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashdyn/common.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

// Repeated matching pennies: one state, two actions each, zero-sum.
// Row player wins on a match.
inline MarkovGame build_matching_pennies(double gamma = 0.9) {
  MarkovGame game;
  game.num_players = 2;
  game.num_states = 1;
  game.action_counts = {2, 2};
  game.gamma = gamma;
  game.reward_bound = 1.0;
  // joint order: HH, HT, TH, TT
  Matrix r0(1, 4), r1(1, 4);
  r0 << 1, -1, -1, 1;
  r1 = -r0;
  game.rewards = {r0, r1};
  Matrix t(4, 1);
  t.setOnes();
  game.transitions = {t};
  game.rho0 = Vector::Ones(1);
  game.state_labels = {"s0"};
  game.action_labels = {{"H", "T"}, {"H", "T"}};
  return game;
}

// Zero-sum matching-pennies variant with an asymmetric payoff on (H, H);
// the unique equilibrium is interior but away from uniform.
inline MarkovGame build_biased_matching_pennies(double gamma = 0.9) {
  MarkovGame game = build_matching_pennies(gamma);
  Matrix r0(1, 4);
  r0 << 2, -1, -1, 1;
  game.rewards = {r0, -r0};
  game.reward_bound = 2.0;
  return game;
}

namespace soccer_detail {

constexpr int kRows = 4;
constexpr int kCols = 5;
constexpr int kCells = kRows * kCols;
// N, S, E, W, stand
constexpr std::array<int, 5> kDr = {-1, 1, 0, 0, 0};
constexpr std::array<int, 5> kDc = {0, 0, 1, -1, 0};

inline bool goal_row(int r) { return r == 1 || r == 2; }

// States enumerate (pos_a, pos_b != pos_a, possession).
inline int state_index(int pos_a, int pos_b, int poss) {
  const int b_idx = pos_b > pos_a ? pos_b - 1 : pos_b;
  return (pos_a * (kCells - 1) + b_idx) * 2 + poss;
}

struct Situation {
  int pos_a, pos_b, poss;
};

inline Situation decode_state(int s) {
  Situation out;
  out.poss = s % 2;
  const int cell = s / 2;
  out.pos_a = cell / (kCells - 1);
  const int b_idx = cell % (kCells - 1);
  out.pos_b = b_idx >= out.pos_a ? b_idx + 1 : b_idx;
  return out;
}

struct MoveOutcome {
  int scorer = -1;  // -1: play continues
  Situation next{};
};

// Resolves both moves in a fixed order (first = index of the player who
// moves first). Moves off the board are cancelled unless the ball carrier
// exits through a goal row on its own attacking edge, which scores. Moving
// onto the other player is cancelled and hands over the ball if the blocked
// mover carried it.
inline MoveOutcome resolve(const Situation& from, int action_a, int action_b,
                           int first) {
  std::array<int, 2> pos = {from.pos_a, from.pos_b};
  const std::array<int, 2> action = {action_a, action_b};
  int poss = from.poss;
  for (int t = 0; t < 2; ++t) {
    const int me = (t == 0) ? first : 1 - first;
    const int a = action[me];
    if (kDr[a] == 0 && kDc[a] == 0) continue;  // stand
    const int r = pos[me] / kCols;
    const int c = pos[me] % kCols;
    const int nr = r + kDr[a];
    const int nc = c + kDc[a];
    if (nr < 0 || nr >= kRows || nc < 0 || nc >= kCols) {
      const bool attacks_exit =
          (me == 0 && a == 2 && c == kCols - 1) ||  // a heads off the right
          (me == 1 && a == 3 && c == 0);            // b heads off the left
      if (poss == me && attacks_exit && goal_row(r)) {
        MoveOutcome out;
        out.scorer = me;
        return out;
      }
      continue;  // off the board: cancelled
    }
    const int npos = nr * kCols + nc;
    if (npos == pos[1 - me]) {
      if (poss == me) poss = 1 - me;  // tackled
      continue;
    }
    pos[me] = npos;
  }
  MoveOutcome out;
  out.next = {pos[0], pos[1], poss};
  return out;
}

}  // namespace soccer_detail

// Two-player zero-sum grid soccer on a 4x5 pitch. Player a attacks the right
// edge, player b the left; rows 1 and 2 are goal rows. Both players pick one
// of {up, down, right, left, stand} simultaneously; the execution order is
// randomized per step (either order with probability 1/2). Scoring pays +1 /
// -1 and resets to the kickoff position with the ball assigned by coin flip.
inline MarkovGame build_soccer(double gamma = 0.9) {
  using namespace soccer_detail;
  MarkovGame game;
  game.num_players = 2;
  game.num_states = kCells * (kCells - 1) * 2;
  game.action_counts = {5, 5};
  game.gamma = gamma;
  game.reward_bound = 1.0;
  game.action_labels = {{"N", "S", "E", "W", "stand"},
                        {"N", "S", "E", "W", "stand"}};

  const int S = game.num_states;
  const int J = game.num_joint_actions();
  const int kickoff_a = 2 * kCols + 3;  // row 2, col 3
  const int kickoff_b = 2 * kCols + 1;  // row 2, col 1
  const int reset_a = state_index(kickoff_a, kickoff_b, 0);
  const int reset_b = state_index(kickoff_a, kickoff_b, 1);

  game.rho0 = Vector::Zero(S);
  game.rho0[reset_a] = 0.5;
  game.rho0[reset_b] = 0.5;

  game.rewards.assign(2, Matrix::Zero(S, J));
  game.transitions.assign(S, Matrix::Zero(J, S));
  game.state_labels.resize(S);

  for (int s = 0; s < S; ++s) {
    const Situation from = decode_state(s);
    game.state_labels[s] =
        "a" + std::to_string(from.pos_a) + "_b" + std::to_string(from.pos_b) +
        (from.poss == 0 ? "_ball_a" : "_ball_b");
    for (int aa = 0; aa < 5; ++aa) {
      for (int ab = 0; ab < 5; ++ab) {
        const int j = aa * 5 + ab;
        for (int first = 0; first < 2; ++first) {
          const MoveOutcome out = resolve(from, aa, ab, first);
          if (out.scorer >= 0) {
            const double sign = out.scorer == 0 ? 1.0 : -1.0;
            game.rewards[0](s, j) += 0.5 * sign;
            game.rewards[1](s, j) -= 0.5 * sign;
            game.transitions[s](j, reset_a) += 0.25;
            game.transitions[s](j, reset_b) += 0.25;
          } else {
            const int ns =
                state_index(out.next.pos_a, out.next.pos_b, out.next.poss);
            game.transitions[s](j, ns) += 0.5;
          }
        }
      }
    }
  }
  return game;
}

// n-firm dynamic oligopoly. Demand intercept cycles through {4, 6, 8}
// (states low/mid/high); each firm posts quantity 0, 1 or 2 at unit cost 1;
// price is max(0, intercept - total quantity). High total supply pushes the
// intercept down one notch with probability 0.8, low supply pushes it up.
inline MarkovGame build_cournot(int num_players, double gamma = 0.9) {
  if (num_players < 1) {
    throw std::invalid_argument("build_cournot: need at least one firm");
  }
  MarkovGame game;
  game.num_players = num_players;
  game.num_states = 3;
  game.action_counts.assign(num_players, 3);
  game.gamma = gamma;
  game.state_labels = {"low", "mid", "high"};
  game.action_labels.assign(num_players, {"q0", "q1", "q2"});
  const double intercept[3] = {4.0, 6.0, 8.0};

  const int J = game.num_joint_actions();
  game.rewards.assign(num_players, Matrix::Zero(3, J));
  game.transitions.assign(3, Matrix::Zero(J, 3));
  game.rho0 = Vector::Constant(3, 1.0 / 3.0);

  double bound = 0.0;
  for (int j = 0; j < J; ++j) {
    std::vector<int> q(num_players);
    int rem = j;
    for (int i = num_players - 1; i >= 0; --i) {
      q[i] = rem % 3;
      rem /= 3;
    }
    int total = 0;
    for (int qi : q) total += qi;
    for (int s = 0; s < 3; ++s) {
      const double price = std::max(0.0, intercept[s] - total);
      for (int i = 0; i < num_players; ++i) {
        const double r = price * q[i] - q[i];
        game.rewards[i](s, j) = r;
        bound = std::max(bound, std::abs(r));
      }
      int target = s;
      if (total > num_players) target = std::max(0, s - 1);
      if (total < num_players) target = std::min(2, s + 1);
      if (target == s) {
        game.transitions[s](j, s) = 1.0;
      } else {
        game.transitions[s](j, target) = 0.8;
        game.transitions[s](j, s) = 0.2;
      }
    }
  }
  game.reward_bound = bound;
  return game;
}

struct RandomGameParams {
  std::uint64_t seed = 0;
  int num_players = 2;
  int num_states = 3;
  std::vector<int> action_counts = {2, 2};
  double reward_min = -1.0;
  double reward_max = 1.0;
  double gamma = 0.9;
};

// Dense random game: i.i.d. uniform rewards, strictly positive random
// transition rows, random initial distribution. Same seed, same game.
inline MarkovGame gen_random_game(const RandomGameParams& params) {
  if (params.num_players < 1 || params.num_states < 1 ||
      static_cast<int>(params.action_counts.size()) != params.num_players ||
      params.reward_min > params.reward_max ||
      !(params.gamma > 0.0 && params.gamma < 1.0)) {
    throw std::invalid_argument("gen_random_game: bad parameters");
  }
  MarkovGame game;
  game.num_players = params.num_players;
  game.num_states = params.num_states;
  game.action_counts = params.action_counts;
  game.gamma = params.gamma;
  game.reward_bound =
      std::max(std::abs(params.reward_min), std::abs(params.reward_max));

  Rng rng(params.seed);
  const int S = game.num_states;
  const int J = game.num_joint_actions();
  game.rewards.assign(game.num_players, Matrix::Zero(S, J));
  for (int i = 0; i < game.num_players; ++i) {
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < J; ++j) {
        game.rewards[i](s, j) =
            rng.uniform(params.reward_min, params.reward_max);
      }
    }
  }
  game.transitions.assign(S, Matrix::Zero(J, S));
  for (int s = 0; s < S; ++s) {
    for (int j = 0; j < J; ++j) {
      double sum = 0.0;
      for (int t = 0; t < S; ++t) {
        const double v = 0.05 + rng.uniform();  // bounded away from zero
        game.transitions[s](j, t) = v;
        sum += v;
      }
      game.transitions[s].row(j) /= sum;
    }
  }
  game.rho0 = Vector::Zero(S);
  double sum = 0.0;
  for (int s = 0; s < S; ++s) {
    game.rho0[s] = 0.05 + rng.uniform();
    sum += game.rho0[s];
  }
  game.rho0 /= sum;
  return game;
}

}  // namespace nashdyn

#endif  // NASHDYN_BUILTIN_GAMES_HPP_
