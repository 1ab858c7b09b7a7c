// Copyright 2026 The orthant_gait Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ORTHANT_GAIT_ORTHANT_GAIT_HPP_
#define ORTHANT_GAIT_ORTHANT_GAIT_HPP_

#include "orthant_gait/automaton.hpp"
#include "orthant_gait/csv.hpp"
#include "orthant_gait/env.hpp"
#include "orthant_gait/harness.hpp"
#include "orthant_gait/linalg2.hpp"
#include "orthant_gait/plant.hpp"
#include "orthant_gait/reward.hpp"
#include "orthant_gait/rl/checkpoint.hpp"
#include "orthant_gait/rl/mlp.hpp"
#include "orthant_gait/rl/policy.hpp"
#include "orthant_gait/rl/ppo.hpp"

#endif  // ORTHANT_GAIT_ORTHANT_GAIT_HPP_
