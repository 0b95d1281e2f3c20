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

#ifndef NASHDYN_EVAL_HPP_
#define NASHDYN_EVAL_HPP_

#include <stdexcept>
#include <vector>

#include "nashdyn/common.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

// Exact quantities of a profile, all obtained by direct linear solves:
//   rho  solves (I - gamma * P_pi^T) rho = rho0
//   V^i  solves (I - gamma * P_pi) V^i = rbar^i
//   Q^i(s,a) marginalizes opponents at fixed own action
//   A^i = Q^i - V^i,  w^i(s,a) = rho(s) * A^i(s,a),  u^i = rho0 . V^i
struct EvalReport {
  Vector rho;
  std::vector<double> payoffs;
  std::vector<Vector> values;
  std::vector<Matrix> q_values;
  std::vector<Matrix> advantages;
  TableSet weighted_advantages;
  std::vector<Vector> joint_probs;  // per state, length num_joint_actions
};

// Per-state joint-action distributions induced by independent policies.
inline std::vector<Vector> joint_action_probs(const MarkovGame& game,
                                              const PolicyProfile& profile) {
  check_profile_shape(game, profile, "joint_action_probs");
  const int J = game.num_joint_actions();
  std::vector<Vector> probs(game.num_states, Vector::Ones(J));
  for (int s = 0; s < game.num_states; ++s) {
    for (int j = 0; j < J; ++j) {
      double p = 1.0;
      int rem = j;
      for (int i = game.num_players - 1; i >= 0; --i) {
        p *= profile[i](s, rem % game.action_counts[i]);
        rem /= game.action_counts[i];
      }
      probs[s][j] = p;
    }
  }
  return probs;
}

// State-to-state transition matrix under the profile (rows sum to 1).
inline Matrix profile_transition(const MarkovGame& game,
                                 const PolicyProfile& profile) {
  const std::vector<Vector> jp = joint_action_probs(game, profile);
  Matrix p_pi(game.num_states, game.num_states);
  for (int s = 0; s < game.num_states; ++s) {
    p_pi.row(s) = (game.transitions[s].transpose() * jp[s]).transpose();
  }
  return p_pi;
}

// Discounted visitation: rho(s) = sum_t gamma^t Pr(s_t = s). Sums to
// 1 / (1 - gamma).
inline Vector visitation(const MarkovGame& game, const PolicyProfile& profile) {
  Matrix m = -game.gamma * profile_transition(game, profile);
  m.diagonal().array() += 1.0;
  return m.transpose().partialPivLu().solve(game.rho0);
}

inline EvalReport evaluate(const MarkovGame& game,
                           const PolicyProfile& profile) {
  check_profile_shape(game, profile, "evaluate");
  const int n = game.num_players;
  const int S = game.num_states;
  const int J = game.num_joint_actions();

  EvalReport report;
  report.joint_probs = joint_action_probs(game, profile);

  Matrix m(S, S);  // I - gamma * P_pi, factored once and reused
  for (int s = 0; s < S; ++s) {
    m.row(s) =
        -game.gamma * (game.transitions[s].transpose() * report.joint_probs[s])
             .transpose();
  }
  m.diagonal().array() += 1.0;
  const Eigen::PartialPivLU<Matrix> lu(m);
  report.rho = lu.transpose().solve(game.rho0);

  const auto components = game.joint_component_table();
  report.payoffs.resize(n);
  report.values.resize(n);
  report.q_values.resize(n);
  report.advantages.resize(n);
  report.weighted_advantages.resize(n);
  Vector q_joint(J), opp_weight(J);
  for (int i = 0; i < n; ++i) {
    Vector rbar(S);
    for (int s = 0; s < S; ++s) {
      rbar[s] = game.rewards[i].row(s).dot(report.joint_probs[s]);
    }
    Vector v = lu.solve(rbar);
    Matrix q = Matrix::Zero(S, game.action_counts[i]);
    for (int s = 0; s < S; ++s) {
      q_joint = game.rewards[i].row(s).transpose() +
                game.gamma * (game.transitions[s] * v);
      for (int j = 0; j < J; ++j) {
        // opponents' probability of the joint action, own action fixed
        double p = 1.0;
        for (int k = 0; k < n; ++k) {
          if (k != i) p *= profile[k](s, components[j][k]);
        }
        q(s, components[j][i]) += p * q_joint[j];
      }
    }
    report.payoffs[i] = game.rho0.dot(v);
    report.advantages[i] = q.colwise() - v;
    report.weighted_advantages[i] =
        report.rho.asDiagonal() * report.advantages[i];
    report.values[i] = std::move(v);
    report.q_values[i] = std::move(q);
  }
  return report;
}

// Residual of the exact policy-update identity for one deviating player:
//   u^i(alt) = u^i(base) + sum_s rho_alt(s) sum_a alt(s,a) A_base^i(s,a).
// Zero (to rounding) for every game, every pair of profiles.
inline double policy_update_identity_check(const MarkovGame& game,
                                           const PolicyProfile& base,
                                           int player,
                                           const Matrix& alt_policy) {
  if (player < 0 || player >= game.num_players) {
    throw std::invalid_argument("policy_update_identity_check: bad player");
  }
  PolicyProfile alt = base;
  alt[player] = alt_policy;
  check_profile_shape(game, alt, "policy_update_identity_check");

  const EvalReport base_report = evaluate(game, base);
  const EvalReport alt_report = evaluate(game, alt);
  double gain = 0.0;
  for (int s = 0; s < game.num_states; ++s) {
    gain += alt_report.rho[s] *
            alt_policy.row(s).dot(base_report.advantages[player].row(s));
  }
  const double surrogate = base_report.payoffs[player] + gain;
  return std::abs(alt_report.payoffs[player] - surrogate);
}

}  // namespace nashdyn

#endif  // NASHDYN_EVAL_HPP_
