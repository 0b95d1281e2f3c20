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

#ifndef NASHDYN_GAME_IO_HPP_
#define NASHDYN_GAME_IO_HPP_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nashdyn/game.hpp"

namespace nashdyn {

// Malformed input: bad JSON, missing fields, wrong types or shapes.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input describing an ill-formed game (rows off the simplex,
// rewards out of bound, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io_detail {

inline const nlohmann::json& require(const nlohmann::json& node,
                                     const char* key) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return *it;
}

inline Vector parse_vector(const nlohmann::json& node, const char* what) {
  if (!node.is_array()) {
    throw ParseError(std::string(what) + " must be an array");
  }
  Vector v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw ParseError(std::string(what) + " must hold numbers");
    }
    v[static_cast<Eigen::Index>(i)] = node[i].get<double>();
  }
  return v;
}

// rows x cols matrix from a nested array, shape-checked.
inline Matrix parse_matrix(const nlohmann::json& node, int rows, int cols,
                           const std::string& what) {
  if (!node.is_array() || static_cast<int>(node.size()) != rows) {
    throw ParseError(what + " must be an array of " + std::to_string(rows) +
                     " rows");
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = node[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ParseError(what + " row " + std::to_string(r) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw ParseError(what + " must hold numbers");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

inline nlohmann::json dump_matrix(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace io_detail

// Parses a game from its JSON text. Throws ParseError on malformed input and
// ValidationError when the parsed game fails validate_game.
inline MarkovGame parse_game(const std::string& text) {
  using io_detail::parse_matrix;
  using io_detail::parse_vector;
  using io_detail::require;

  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/
                                 true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("top level must be an object");

  MarkovGame game;
  try {
    game.num_players = require(root, "players").get<int>();
    game.gamma = require(root, "gamma").get<double>();
    game.action_counts =
        require(root, "action_counts").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field type: ") + e.what());
  }
  if (game.num_players < 1 ||
      static_cast<int>(game.action_counts.size()) != game.num_players) {
    throw ParseError("action_counts must list one entry per player");
  }
  for (int c : game.action_counts) {
    if (c < 1) throw ParseError("action_counts entries must be >= 1");
  }

  game.rho0 = parse_vector(require(root, "rho0"), "rho0");
  game.num_states = static_cast<int>(game.rho0.size());
  if (game.num_states < 1) throw ParseError("rho0 must be non-empty");
  const int S = game.num_states;
  const int J = game.num_joint_actions();

  const auto& rewards = require(root, "rewards");
  if (!rewards.is_array() ||
      static_cast<int>(rewards.size()) != game.num_players) {
    throw ParseError("rewards must be an array with one block per player");
  }
  for (int i = 0; i < game.num_players; ++i) {
    game.rewards.push_back(
        parse_matrix(rewards[i], S, J, "rewards[" + std::to_string(i) + "]"));
  }
  const auto& transitions = require(root, "transitions");
  if (!transitions.is_array() || static_cast<int>(transitions.size()) != S) {
    throw ParseError("transitions must be an array with one block per state");
  }
  for (int s = 0; s < S; ++s) {
    game.transitions.push_back(parse_matrix(
        transitions[s], J, S, "transitions[" + std::to_string(s) + "]"));
  }

  if (root.contains("reward_bound")) {
    if (!root["reward_bound"].is_number()) {
      throw ParseError("reward_bound must be a number");
    }
    game.reward_bound = root["reward_bound"].get<double>();
  } else {
    for (const Matrix& r : game.rewards) {
      game.reward_bound =
          std::max(game.reward_bound, r.cwiseAbs().maxCoeff());
    }
  }
  if (root.contains("state_labels")) {
    try {
      game.state_labels =
          root["state_labels"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("state_labels must be an array of strings");
    }
    if (static_cast<int>(game.state_labels.size()) != S) {
      throw ParseError("state_labels must list one label per state");
    }
  }
  if (root.contains("action_labels")) {
    try {
      game.action_labels =
          root["action_labels"].get<std::vector<std::vector<std::string>>>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("action_labels must be nested arrays of strings");
    }
    if (static_cast<int>(game.action_labels.size()) != game.num_players) {
      throw ParseError("action_labels must list one block per player");
    }
    for (int i = 0; i < game.num_players; ++i) {
      if (static_cast<int>(game.action_labels[i].size()) !=
          game.action_counts[i]) {
        throw ParseError("action_labels[" + std::to_string(i) +
                         "] has the wrong length");
      }
    }
  }

  const std::vector<std::string> violations = validate_game(game);
  if (!violations.empty()) {
    std::string msg = "invalid game:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return game;
}

inline MarkovGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open game file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str());
}

// Serializes with full double round-trip precision. The emitted "comment"
// records the joint-action flattening convention.
inline std::string game_to_json(const MarkovGame& game) {
  using io_detail::dump_matrix;
  nlohmann::json root;
  root["comment"] =
      "joint action index = a0 * |A1|*...*|A_{n-1}| + a1 * |A2|*... + "
      "a_{n-1} (player 0 most significant); rewards[player][state][joint]; "
      "transitions[state][joint][next_state]";
  root["players"] = game.num_players;
  root["gamma"] = game.gamma;
  root["reward_bound"] = game.reward_bound;
  root["action_counts"] = game.action_counts;
  nlohmann::json rho0 = nlohmann::json::array();
  for (Eigen::Index s = 0; s < game.rho0.size(); ++s) {
    rho0.push_back(game.rho0[s]);
  }
  root["rho0"] = rho0;
  nlohmann::json rewards = nlohmann::json::array();
  for (const Matrix& r : game.rewards) rewards.push_back(dump_matrix(r));
  root["rewards"] = rewards;
  nlohmann::json transitions = nlohmann::json::array();
  for (const Matrix& t : game.transitions) {
    transitions.push_back(dump_matrix(t));
  }
  root["transitions"] = transitions;
  if (!game.state_labels.empty()) root["state_labels"] = game.state_labels;
  if (!game.action_labels.empty()) root["action_labels"] = game.action_labels;
  return root.dump(1);
}

inline void save_game(const MarkovGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file: " + path);
  out << game_to_json(game) << "\n";
}

}  // namespace nashdyn

#endif  // NASHDYN_GAME_IO_HPP_
