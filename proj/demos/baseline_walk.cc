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

// Walks the compass gait with the virtual-gravity controller and prints the
// orthant sequence together with every heel strike.

#include <iostream>

#include "orthant_gait/automaton.hpp"
#include "orthant_gait/env.hpp"

int main() {
  using namespace orthant_gait;
  EnvConfig config;
  config.reward_setup = RewardSetup::ForwardPlusOrthant;
  const EpisodeTrace trace = rollout(config, virtual_gravity_controller(config.params));

  int last_k = -1;
  for (const TraceRow& row : trace.rows) {
    if (row.impacts > 0) std::cout << "  heel strike at t = " << row.t << " s\n";
    if (row.orthant_k != last_k) {
      const auto loc = location_of(OrthantPattern::from_index(row.orthant_k));
      std::cout << "t = " << row.t << " s  orthant " << row.orthant_k << "  "
                << (loc ? to_string(*loc) : "(outside cycle)") << '\n';
      last_k = row.orthant_k;
    }
  }
  std::cout << "distance after " << trace.rows.back().t << " s: " << trace.distance() << " m, "
            << trace.impact_count() << " steps, return " << trace.total_return() << '\n';
}
