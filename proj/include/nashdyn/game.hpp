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

#ifndef NASHDYN_GAME_HPP_
#define NASHDYN_GAME_HPP_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashdyn/common.hpp"

namespace nashdyn {

// Finite n-player general-sum Markov game in tensor form.
//
// Joint actions are flattened row-major with player 0 most significant:
//   j = a0 * (|A1| * ... * |A_{n-1}|) + a1 * (|A2| * ...) + ... + a_{n-1}.
//
// rewards[i]     : num_states x num_joint_actions
// transitions[s] : num_joint_actions x num_states (rows are distributions)
// rho0           : initial state distribution
struct MarkovGame {
  int num_players = 0;
  int num_states = 0;
  std::vector<int> action_counts;
  double gamma = 0.0;
  double reward_bound = 0.0;
  std::vector<Matrix> rewards;
  std::vector<Matrix> transitions;
  Vector rho0;
  std::vector<std::string> state_labels;                // optional
  std::vector<std::vector<std::string>> action_labels;  // optional, per player

  int num_joint_actions() const {
    int j = 1;
    for (int c : action_counts) j *= c;
    return j;
  }

  // stride of player i in the flat joint index
  int joint_stride(int player) const {
    int stride = 1;
    for (int k = player + 1; k < num_players; ++k) stride *= action_counts[k];
    return stride;
  }

  int encode_joint(const std::vector<int>& actions) const {
    if (static_cast<int>(actions.size()) != num_players) {
      throw std::invalid_argument("encode_joint: wrong number of actions");
    }
    int j = 0;
    for (int i = 0; i < num_players; ++i) {
      if (actions[i] < 0 || actions[i] >= action_counts[i]) {
        throw std::invalid_argument("encode_joint: action out of range");
      }
      j = j * action_counts[i] + actions[i];
    }
    return j;
  }

  std::vector<int> decode_joint(int j) const {
    if (j < 0 || j >= num_joint_actions()) {
      throw std::invalid_argument("decode_joint: index out of range");
    }
    std::vector<int> actions(num_players);
    for (int i = num_players - 1; i >= 0; --i) {
      actions[i] = j % action_counts[i];
      j /= action_counts[i];
    }
    return actions;
  }

  int action_of(int j, int player) const {
    return (j / joint_stride(player)) % action_counts[player];
  }

  // [joint][player] -> own action; built on demand by evaluators.
  std::vector<std::vector<int>> joint_component_table() const {
    std::vector<std::vector<int>> table(num_joint_actions());
    for (int j = 0; j < num_joint_actions(); ++j) table[j] = decode_joint(j);
    return table;
  }
};

// Per-player behavioral policies: policy[i] is num_states x action_counts[i],
// rows on the simplex.
using PolicyProfile = std::vector<Matrix>;

inline PolicyProfile uniform_profile(const MarkovGame& game) {
  PolicyProfile profile(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    profile[i] = Matrix::Constant(game.num_states, game.action_counts[i],
                                  1.0 / game.action_counts[i]);
  }
  return profile;
}

// Deterministic profile playing actions[i] in every state.
inline PolicyProfile pure_profile(const MarkovGame& game,
                                  const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != game.num_players) {
    throw std::invalid_argument("pure_profile: wrong number of actions");
  }
  PolicyProfile profile(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    profile[i] = Matrix::Zero(game.num_states, game.action_counts[i]);
    profile[i].col(actions[i]).setOnes();
  }
  return profile;
}

// Zero score tables (one per player), the canonical dynamics start point.
inline TableSet zero_tables(const MarkovGame& game) {
  TableSet tables(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    tables[i] = Matrix::Zero(game.num_states, game.action_counts[i]);
  }
  return tables;
}

inline void check_profile_shape(const MarkovGame& game,
                                const PolicyProfile& profile,
                                const char* where) {
  if (static_cast<int>(profile.size()) != game.num_players) {
    throw std::invalid_argument(std::string(where) +
                                ": profile has wrong number of players");
  }
  for (int i = 0; i < game.num_players; ++i) {
    if (profile[i].rows() != game.num_states ||
        profile[i].cols() != game.action_counts[i]) {
      throw std::invalid_argument(std::string(where) +
                                  ": policy table has wrong shape");
    }
  }
}

// Structural and stochastic checks. Returns human-readable violations,
// empty when the game is well formed.
inline std::vector<std::string> validate_game(const MarkovGame& game,
                                              double tol = 1e-9) {
  std::vector<std::string> errs;
  auto fail = [&errs](const std::string& msg) { errs.push_back(msg); };

  if (game.num_players < 1) fail("num_players must be >= 1");
  if (game.num_states < 1) fail("num_states must be >= 1");
  if (static_cast<int>(game.action_counts.size()) != game.num_players) {
    fail("action_counts size != num_players");
  }
  for (std::size_t i = 0; i < game.action_counts.size(); ++i) {
    if (game.action_counts[i] < 1) {
      fail("player " + std::to_string(i) + " has empty action set");
    }
  }
  if (!(game.gamma > 0.0 && game.gamma < 1.0)) {
    fail("gamma must lie in (0, 1)");
  }
  if (game.reward_bound < 0.0) fail("reward_bound must be >= 0");
  if (!errs.empty()) return errs;  // shape errors make the rest meaningless

  const int J = game.num_joint_actions();
  if (static_cast<int>(game.rewards.size()) != game.num_players) {
    fail("rewards size != num_players");
  } else {
    for (int i = 0; i < game.num_players; ++i) {
      if (game.rewards[i].rows() != game.num_states ||
          game.rewards[i].cols() != J) {
        fail("rewards[" + std::to_string(i) + "] has wrong shape");
      } else if (game.rewards[i].cwiseAbs().maxCoeff() >
                 game.reward_bound + tol) {
        fail("rewards[" + std::to_string(i) + "] exceeds reward_bound");
      }
    }
  }
  if (static_cast<int>(game.transitions.size()) != game.num_states) {
    fail("transitions size != num_states");
  } else {
    for (int s = 0; s < game.num_states; ++s) {
      const Matrix& t = game.transitions[s];
      if (t.rows() != J || t.cols() != game.num_states) {
        fail("transitions[" + std::to_string(s) + "] has wrong shape");
        continue;
      }
      for (int j = 0; j < J; ++j) {
        if (t.row(j).minCoeff() < -1e-12) {
          fail("transitions[" + std::to_string(s) + "] joint " +
               std::to_string(j) + " has a negative entry");
        }
        const double sum = t.row(j).sum();
        if (std::abs(sum - 1.0) > tol) {
          std::ostringstream os;
          os << "transitions[" << s << "] joint " << j << " sums to " << sum;
          fail(os.str());
        }
      }
    }
  }
  if (game.rho0.size() != game.num_states) {
    fail("rho0 has wrong length");
  } else {
    if (game.rho0.minCoeff() < -1e-12) fail("rho0 has a negative entry");
    if (std::abs(game.rho0.sum() - 1.0) > tol) fail("rho0 does not sum to 1");
  }
  return errs;
}

}  // namespace nashdyn

#endif  // NASHDYN_GAME_HPP_
