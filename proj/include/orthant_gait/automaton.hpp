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

#ifndef ORTHANT_GAIT_AUTOMATON_HPP_
#define ORTHANT_GAIT_AUTOMATON_HPP_

// Orthant classification of the walker phase space and the four-location
// automaton of ideal walking.
//
// Locations and their invariants (s_i means "coordinate i is > 0"):
//   O1: theta1 > 0, theta2 <= 0, dtheta1 <= 0, dtheta2 > 0
//   O2: theta1 > 0, theta2 >  0, dtheta1 <= 0, dtheta2 > 0
//   O3: theta1 <= 0, theta2 > 0, dtheta1 <= 0, dtheta2 > 0
//   O4: theta1 <= 0, theta2 > 0, dtheta1 <= 0, dtheta2 <= 0
// Edges: O1->O2->O3->O4->O1. The O4->O1 edge is the heel strike.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orthant_gait/plant.hpp"

namespace orthant_gait {

class NotAnEdgeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sign pattern of (theta1, theta2, dtheta1, dtheta2). Exact zeros count as
// non-positive.
struct OrthantPattern {
  bool s1 = false;
  bool s2 = false;
  bool s3 = false;
  bool s4 = false;

  // 1 + 8 s1 + 4 s2 + 2 s3 + s4, in [1, 16].
  int index() const { return 1 + 8 * s1 + 4 * s2 + 2 * s3 + (s4 ? 1 : 0); }

  static OrthantPattern from_index(int k) {
    if (k < 1 || k > 16) throw std::out_of_range("orthant index must be in [1, 16]");
    const int bits = k - 1;
    return {(bits & 8) != 0, (bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0};
  }

  friend bool operator==(const OrthantPattern&, const OrthantPattern&) = default;
};

enum class Location { O1, O2, O3, O4 };

inline constexpr std::array<Location, 4> kLocations = {Location::O1, Location::O2, Location::O3,
                                                       Location::O4};

enum class TransitionKind { Stay, CycleAdvance, Enter, Exit, Backward, Outside };

inline std::string_view to_string(Location l) {
  switch (l) {
    case Location::O1: return "O1";
    case Location::O2: return "O2";
    case Location::O3: return "O3";
    case Location::O4: return "O4";
  }
  return "?";
}

inline std::string_view to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::Stay: return "stay";
    case TransitionKind::CycleAdvance: return "cycle_advance";
    case TransitionKind::Enter: return "enter";
    case TransitionKind::Exit: return "exit";
    case TransitionKind::Backward: return "backward";
    case TransitionKind::Outside: return "outside";
  }
  return "?";
}

inline OrthantPattern classify(const std::array<double, 4>& x) {
  return {x[0] > 0.0, x[1] > 0.0, x[2] > 0.0, x[3] > 0.0};
}

inline OrthantPattern classify(const WalkerState& s) { return classify(s.phase()); }

inline std::optional<Location> location_of(const OrthantPattern& p) {
  // dtheta1 > 0 is excluded from every location.
  if (p.s3) return std::nullopt;
  if (p.s1 && !p.s2 && p.s4) return Location::O1;
  if (p.s1 && p.s2 && p.s4) return Location::O2;
  if (!p.s1 && p.s2 && p.s4) return Location::O3;
  if (!p.s1 && p.s2 && !p.s4) return Location::O4;
  return std::nullopt;
}

inline std::optional<Location> location_of(const WalkerState& s) { return location_of(classify(s)); }

inline Location successor(Location l) {
  return kLocations[(static_cast<std::size_t>(l) + 1) % kLocations.size()];
}

inline bool is_edge(Location from, Location to) { return successor(from) == to; }

inline TransitionKind classify_transition(std::optional<Location> prev,
                                          std::optional<Location> cur) {
  if (!prev && !cur) return TransitionKind::Outside;
  if (!prev) return TransitionKind::Enter;
  if (!cur) return TransitionKind::Exit;
  if (*prev == *cur) return TransitionKind::Stay;
  if (is_edge(*prev, *cur)) return TransitionKind::CycleAdvance;
  return TransitionKind::Backward;
}

inline TransitionKind classify_transition(const WalkerState& prev, const WalkerState& cur) {
  return classify_transition(location_of(prev), location_of(cur));
}

// Continuous-variable reset along an automaton edge: identity everywhere
// except the heel strike O4 -> O1.
inline WalkerState reset_map(Location from, Location to, const WalkerParams& params,
                             const WalkerState& pre) {
  if (!is_edge(from, to)) {
    throw NotAnEdgeError("(" + std::string(to_string(from)) + ", " + std::string(to_string(to)) +
                         ") is not an edge of the walking cycle");
  }
  if (from == Location::O4) return impact_map(params, pre).post_state;
  return pre;
}

struct CycleReport {
  std::optional<std::size_t> entered_at;
  std::vector<std::pair<std::size_t, TransitionKind>> violations;
};

// Finds the first state inside the cycle and then records every transition
// that neither stays in a location nor follows an edge. Violation indices
// refer to the later state of the offending pair.
inline CycleReport cycle_monitor(std::span<const WalkerState> trace) {
  if (trace.empty()) throw std::invalid_argument("cycle_monitor needs a non-empty trace");
  CycleReport report;
  std::optional<Location> prev;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::optional<Location> cur = location_of(trace[i]);
    if (report.entered_at) {
      const TransitionKind kind = classify_transition(prev, cur);
      if (kind != TransitionKind::Stay && kind != TransitionKind::CycleAdvance) {
        report.violations.emplace_back(i, kind);
      }
    } else if (cur) {
      report.entered_at = i;
    }
    prev = cur;
  }
  return report;
}

}  // namespace orthant_gait

#endif  // ORTHANT_GAIT_AUTOMATON_HPP_
