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

#ifndef ORTHANT_GAIT_REWARD_HPP_
#define ORTHANT_GAIT_REWARD_HPP_

// Reward terms for the compass walker and their weighted sum.
//
//   r = w_jerk r_jerk + w_dist r_dist + w_fall r_fall + w_for r_for + w_or r_or
//
// Heaviside conventions: r_for uses H(0) = 0, r_dist and r_fall use H(0) = 1.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "orthant_gait/automaton.hpp"
#include "orthant_gait/plant.hpp"

namespace orthant_gait {

struct RewardWeights {
  double w_jerk = -0.001;
  double w_dist = 1.0;
  double w_fall = -10.0;
  double w_for = 0.0;
  double w_or = 0.0;

  RewardWeights scaled(double k) const {
    return {k * w_jerk, k * w_dist, k * w_fall, k * w_for, k * w_or};
  }
};

enum class RewardSetup { Sparse, Forward, Orthant, ForwardPlusOrthant };

inline constexpr std::array<RewardSetup, 4> kRewardSetups = {
    RewardSetup::Sparse, RewardSetup::Forward, RewardSetup::Orthant,
    RewardSetup::ForwardPlusOrthant};

// Stable CLI-facing identifiers.
inline std::string_view to_string(RewardSetup s) {
  switch (s) {
    case RewardSetup::Sparse: return "sparse";
    case RewardSetup::Forward: return "for";
    case RewardSetup::Orthant: return "or";
    case RewardSetup::ForwardPlusOrthant: return "for_plus_or";
  }
  return "?";
}

inline std::optional<RewardSetup> parse_reward_setup(std::string_view name) {
  for (RewardSetup s : kRewardSetups) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

inline RewardWeights weights_for(RewardSetup s) {
  RewardWeights w;
  switch (s) {
    case RewardSetup::Sparse: break;
    case RewardSetup::Forward: w.w_for = 0.01; break;
    case RewardSetup::Orthant: w.w_or = 0.01; break;
    case RewardSetup::ForwardPlusOrthant:
      w.w_for = 0.005;
      w.w_or = 0.005;
      break;
  }
  return w;
}

// Figure: staying inside a cycle location earns +1.
// Strict: only edges of the cycle and entering the cycle earn +1.
enum class OrthantRewardMode { Figure, Strict };

inline double r_or(TransitionKind kind, OrthantRewardMode mode = OrthantRewardMode::Figure) {
  switch (kind) {
    case TransitionKind::CycleAdvance:
    case TransitionKind::Enter: return 1.0;
    case TransitionKind::Stay: return mode == OrthantRewardMode::Figure ? 1.0 : -1.0;
    default: return -1.0;
  }
}

inline double r_or(const WalkerState& cur, const WalkerState& prev,
                   OrthantRewardMode mode = OrthantRewardMode::Figure) {
  return r_or(classify_transition(prev, cur), mode);
}

inline double r_for(const HipPose& cur, const HipPose& prev) {
  return cur.px - prev.px > 0.0 ? 1.0 : -1.0;
}

inline double r_jerk(const Control& cur, const Control& prev) {
  return std::hypot(cur.u1 - prev.u1, cur.u2 - prev.u2);
}

inline double r_dist(const HipPose& cur, double t, double horizon) {
  return t - horizon >= 0.0 ? cur.px : 0.0;
}

inline double r_fall(const HipPose& cur) { return -cur.py >= 0.0 ? 1.0 : 0.0; }

struct StepContext {
  WalkerState x_t;
  WalkerState x_prev;
  HipPose p_t;
  HipPose p_prev;
  Control u_t;
  Control u_prev;
  double t = 0.0;
  double horizon = 10.0;
};

struct RewardTerms {
  double jerk = 0.0;
  double dist = 0.0;
  double fall = 0.0;
  double forward = 0.0;
  double orthant = 0.0;
};

inline RewardTerms reward_terms(const StepContext& ctx,
                                OrthantRewardMode mode = OrthantRewardMode::Figure) {
  return {r_jerk(ctx.u_t, ctx.u_prev), r_dist(ctx.p_t, ctx.t, ctx.horizon), r_fall(ctx.p_t),
          r_for(ctx.p_t, ctx.p_prev), r_or(ctx.x_t, ctx.x_prev, mode)};
}

inline double composite(const RewardTerms& r, const RewardWeights& w) {
  return w.w_jerk * r.jerk + w.w_dist * r.dist + w.w_fall * r.fall + w.w_for * r.forward +
         w.w_or * r.orthant;
}

inline double composite(const StepContext& ctx, const RewardWeights& w,
                        OrthantRewardMode mode = OrthantRewardMode::Figure) {
  return composite(reward_terms(ctx, mode), w);
}

}  // namespace orthant_gait

#endif  // ORTHANT_GAIT_REWARD_HPP_
