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

#ifndef NASHDYN_BASELINES_HPP_
#define NASHDYN_BASELINES_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "nashdyn/equilibrium.hpp"
#include "nashdyn/game.hpp"

namespace nashdyn {

struct BaselineRun {
  std::string algorithm;
  std::vector<PolicyProfile> profiles;  // iterates, index 0 = start profile
  std::vector<double> nashconv;         // NashConv of each iterate
};

// Iterated best response with simultaneous updates: every player moves to a
// deterministic best response against the current profile at once. Converges
// only when the game is friendly; cycles otherwise, which is the point of
// the comparison.
inline BaselineRun run_ibr(const MarkovGame& game,
                           const PolicyProfile& profile0, int iters,
                           double br_tol = 1e-10) {
  if (iters < 1) throw std::invalid_argument("run_ibr: iters < 1");
  check_profile_shape(game, profile0, "run_ibr");

  BaselineRun run;
  run.algorithm = "ibr";
  run.profiles.push_back(profile0);
  run.nashconv.push_back(nash_conv(game, profile0, br_tol).total);
  for (int l = 0; l < iters; ++l) {
    const PolicyProfile& current = run.profiles.back();
    PolicyProfile next(game.num_players);
    for (int i = 0; i < game.num_players; ++i) {
      next[i] = best_response(game, current, i, br_tol).policy;
    }
    run.nashconv.push_back(nash_conv(game, next, br_tol).total);
    run.profiles.push_back(std::move(next));
  }
  return run;
}

// Fictitious play, per-state behavioral averaging with harmonic weights:
// avg_{l+1} = (1 - 1/(l+1)) avg_l + 1/(l+1) beta(avg_l), so the first step
// jumps straight to the best response and later ones blend in ever smaller
// corrections.
inline BaselineRun run_fp(const MarkovGame& game, const PolicyProfile& profile0,
                          int iters, double br_tol = 1e-10) {
  if (iters < 1) throw std::invalid_argument("run_fp: iters < 1");
  check_profile_shape(game, profile0, "run_fp");

  BaselineRun run;
  run.algorithm = "fp";
  run.profiles.push_back(profile0);
  run.nashconv.push_back(nash_conv(game, profile0, br_tol).total);
  for (int l = 0; l < iters; ++l) {
    const PolicyProfile& avg = run.profiles.back();
    const double weight = 1.0 / static_cast<double>(l + 1);
    PolicyProfile next(game.num_players);
    for (int i = 0; i < game.num_players; ++i) {
      const Matrix br = best_response(game, avg, i, br_tol).policy;
      next[i] = (1.0 - weight) * avg[i] + weight * br;
    }
    run.nashconv.push_back(nash_conv(game, next, br_tol).total);
    run.profiles.push_back(std::move(next));
  }
  return run;
}

}  // namespace nashdyn

#endif  // NASHDYN_BASELINES_HPP_
