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

#ifndef NASHDYN_EQUILIBRIUM_HPP_
#define NASHDYN_EQUILIBRIUM_HPP_

#include <stdexcept>
#include <vector>

#include "nashdyn/common.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

// Single-agent MDP seen by one player when the others commit to the profile:
// reward(s,a) and transition rows are opponent-averaged slices of the game.
struct InducedMdp {
  Matrix reward;                   // num_states x own actions
  std::vector<Matrix> transition;  // per state: own actions x num_states
  double gamma = 0.0;
  Vector rho0;
};

inline InducedMdp induced_mdp(const MarkovGame& game,
                              const PolicyProfile& profile, int player) {
  check_profile_shape(game, profile, "induced_mdp");
  if (player < 0 || player >= game.num_players) {
    throw std::invalid_argument("induced_mdp: bad player");
  }
  const int S = game.num_states;
  const int J = game.num_joint_actions();
  const int A = game.action_counts[player];
  const auto components = game.joint_component_table();

  InducedMdp mdp;
  mdp.gamma = game.gamma;
  mdp.rho0 = game.rho0;
  mdp.reward = Matrix::Zero(S, A);
  mdp.transition.assign(S, Matrix::Zero(A, S));
  for (int s = 0; s < S; ++s) {
    for (int j = 0; j < J; ++j) {
      double p = 1.0;
      for (int k = 0; k < game.num_players; ++k) {
        if (k != player) p *= profile[k](s, components[j][k]);
      }
      if (p == 0.0) continue;
      const int a = components[j][player];
      mdp.reward(s, a) += p * game.rewards[player](s, j);
      mdp.transition[s].row(a) += p * game.transitions[s].row(j);
    }
  }
  return mdp;
}

namespace equilibrium_detail {

// Exact value of the deterministic decision rule d on the induced MDP.
inline Vector evaluate_rule(const InducedMdp& mdp, const std::vector<int>& d) {
  const int S = static_cast<int>(mdp.rho0.size());
  Matrix m(S, S);
  Vector r(S);
  for (int s = 0; s < S; ++s) {
    m.row(s) = -mdp.gamma * mdp.transition[s].row(d[s]);
    r[s] = mdp.reward(s, d[s]);
  }
  m.diagonal().array() += 1.0;
  return m.partialPivLu().solve(r);
}

inline Matrix action_values(const InducedMdp& mdp, const Vector& v) {
  const int S = static_cast<int>(mdp.rho0.size());
  Matrix q(S, mdp.reward.cols());
  for (int s = 0; s < S; ++s) {
    q.row(s) = mdp.reward.row(s) +
               mdp.gamma * (mdp.transition[s] * v).transpose();
  }
  return q;
}

}  // namespace equilibrium_detail

struct BestResponse {
  Matrix policy;  // deterministic, one-hot rows
  Vector values;
  double payoff = 0.0;
  int iterations = 0;
};

// Exact best response by policy iteration on the induced MDP. Ties in the
// greedy step resolve to the lowest action index, so the oracle is a pure
// function of its inputs. The cap is generous: Howard iteration on a finite
// MDP improves strictly each round.
inline BestResponse best_response(const MarkovGame& game,
                                  const PolicyProfile& profile, int player,
                                  double tol = 1e-10) {
  using equilibrium_detail::action_values;
  using equilibrium_detail::evaluate_rule;
  if (!(tol > 0.0)) throw std::invalid_argument("best_response: tol <= 0");
  const InducedMdp mdp = induced_mdp(game, profile, player);
  const int S = game.num_states;
  const int A = game.action_counts[player];

  std::vector<int> d(S, 0);
  Vector v;
  const int max_rounds = 10 * S + 10;
  int round = 0;
  for (;; ++round) {
    if (round >= max_rounds) {
      throw std::runtime_error("best_response: policy iteration did not "
                               "settle within the iteration cap");
    }
    v = evaluate_rule(mdp, d);
    const Matrix q = action_values(mdp, v);
    bool changed = false;
    for (int s = 0; s < S; ++s) {
      int best = 0;
      for (int a = 1; a < A; ++a) {
        if (q(s, a) > q(s, best)) best = a;
      }
      // only switch on a strict improvement over the current rule
      if (best != d[s] && q(s, best) > q(s, d[s]) + tol) {
        d[s] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }

  BestResponse br;
  br.policy = Matrix::Zero(S, A);
  for (int s = 0; s < S; ++s) br.policy(s, d[s]) = 1.0;
  br.values = v;
  br.payoff = mdp.rho0.dot(v);
  br.iterations = round + 1;
  return br;
}

// Independent cross-check oracle: sup-norm value iteration on the induced
// MDP. Error after the loop is at most tol * gamma / (1 - gamma).
inline Vector value_iteration(const InducedMdp& mdp, double tol = 1e-12,
                              long max_iters = 1000000) {
  using equilibrium_detail::action_values;
  Vector v = Vector::Zero(mdp.rho0.size());
  for (long it = 0; it < max_iters; ++it) {
    const Vector next = action_values(mdp, v).rowwise().maxCoeff();
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (delta <= tol) return v;
  }
  throw std::runtime_error("value_iteration: no convergence within budget");
}

struct NashConvReport {
  std::vector<double> payoffs;     // u^i under the profile
  std::vector<double> br_payoffs;  // u^i of the unilateral best response
  std::vector<double> gaps;        // br_payoff - payoff (not clamped)
  double total = 0.0;
};

// NashConv(pi) = sum_i [max_{pi'} u^i(pi', pi^{-i}) - u^i(pi)]. Nonnegative
// up to solver rounding; zero exactly at a Nash equilibrium.
inline NashConvReport nash_conv(const MarkovGame& game,
                                const PolicyProfile& profile,
                                double tol = 1e-10) {
  const EvalReport report = evaluate(game, profile);
  NashConvReport out;
  out.payoffs = report.payoffs;
  out.br_payoffs.resize(game.num_players);
  out.gaps.resize(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    out.br_payoffs[i] = best_response(game, profile, i, tol).payoff;
    out.gaps[i] = out.br_payoffs[i] - out.payoffs[i];
    out.total += out.gaps[i];
  }
  return out;
}

// Per-state soft-max response to the player's own weighted advantage:
// row s proportional to exp(w^i(s,.)/epsilon). Fixed points of the score
// dynamics are exactly the profiles this map leaves unchanged.
inline Matrix logit_response(const MarkovGame& game,
                             const PolicyProfile& profile, int player,
                             double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("logit_response: epsilon <= 0");
  }
  if (player < 0 || player >= game.num_players) {
    throw std::invalid_argument("logit_response: bad player");
  }
  const EvalReport report = evaluate(game, profile);
  return softmax_rows(report.weighted_advantages[player], epsilon);
}

}  // namespace nashdyn

#endif  // NASHDYN_EQUILIBRIUM_HPP_
