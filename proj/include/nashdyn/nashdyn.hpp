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

#ifndef NASHDYN_NASHDYN_HPP_
#define NASHDYN_NASHDYN_HPP_

#include "nashdyn/analysis.hpp"
#include "nashdyn/baselines.hpp"
#include "nashdyn/builtin_games.hpp"
#include "nashdyn/common.hpp"
#include "nashdyn/csv.hpp"
#include "nashdyn/dynamics.hpp"
#include "nashdyn/equilibrium.hpp"
#include "nashdyn/eval.hpp"
#include "nashdyn/game.hpp"
#include "nashdyn/game_io.hpp"
#include "nashdyn/sampling.hpp"

#endif  // NASHDYN_NASHDYN_HPP_
