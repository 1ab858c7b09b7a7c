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

#ifndef ORTHANT_GAIT_ENV_HPP_
#define ORTHANT_GAIT_ENV_HPP_

// Episodic walking environment: fixed control period with zero-order-hold
// torques, RK4 substeps, bisection-located heel strikes, and the composite
// reward.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthant_gait/automaton.hpp"
#include "orthant_gait/csv.hpp"
#include "orthant_gait/plant.hpp"
#include "orthant_gait/reward.hpp"

namespace orthant_gait {

class EpisodeFinishedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TooManyImpactsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Observation = std::array<double, 4>;

inline constexpr double kImpactHeightTol = 1e-8;

struct EnvConfig {
  WalkerParams params;
  double dt_control = 0.01;
  int substeps = 4;
  double horizon = 10.0;
  double u_max = 10.0;
  WalkerState initial_state{0.0, 0.0, -0.4, 2.0, 0.0};
  RewardSetup reward_setup = RewardSetup::Sparse;
  bool strict_orthant_reward = false;
  double eps_front = 1e-3;
  int max_impacts_per_step = 2;

  std::int64_t horizon_steps() const {
    return static_cast<std::int64_t>(std::llround(horizon / dt_control));
  }

  RewardWeights weights() const { return weights_for(reward_setup); }

  OrthantRewardMode orthant_mode() const {
    return strict_orthant_reward ? OrthantRewardMode::Strict : OrthantRewardMode::Figure;
  }

  void validate() const {
    params.validate();
    if (!(dt_control > 0.0) || !std::isfinite(dt_control)) {
      throw std::invalid_argument("dt_control must be positive");
    }
    if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw std::invalid_argument("horizon must be positive");
    }
    const double n = static_cast<double>(horizon_steps());
    if (n < 1.0 || std::abs(n * dt_control - horizon) > 1e-9 * horizon) {
      throw std::invalid_argument("horizon must be an integer multiple of dt_control");
    }
    if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be positive");
    if (!(eps_front > 0.0)) throw std::invalid_argument("eps_front must be positive");
    if (!initial_state.finite()) throw std::invalid_argument("initial state must be finite");
    if (max_impacts_per_step < 1) throw std::invalid_argument("max_impacts_per_step must be >= 1");
  }
};

inline Observation observe(const WalkerState& s) { return s.phase(); }

struct StepInfo {
  HipPose hip;
  OrthantPattern orthant;
  std::vector<ImpactEvent> impacts;
  RewardTerms terms;
};

struct StepResult {
  Observation observation{};
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

class Environment {
 public:
  explicit Environment(EnvConfig config) : config_(std::move(config)) {
    config_.validate();
    horizon_steps_ = config_.horizon_steps();
    reset();
  }

  // The seed is accepted for interface symmetry; resets are deterministic.
  Observation reset(std::uint64_t /*seed*/ = 0) {
    state_ = config_.initial_state;
    prev_control_ = Control{};
    steps_ = 0;
    done_ = false;
    return observe(state_);
  }

  StepResult step(const Control& raw) {
    if (done_) throw EpisodeFinishedError("step() called on a finished episode");
    if (!std::isfinite(raw.u1) || !std::isfinite(raw.u2)) {
      throw std::invalid_argument("control must be finite");
    }
    const Control u = clip(raw);
    const WalkerParams& p = config_.params;
    const WalkerState prev = state_;
    const HipPose hip_prev = hip_pose(p, prev);

    StepResult out;
    const double h = config_.dt_control / config_.substeps;
    const double t0 = static_cast<double>(steps_) * config_.dt_control;
    for (int k = 0; k < config_.substeps; ++k) {
      integrate_substep(u, h, t0 + k * h, out.info.impacts);
    }
    ++steps_;

    StepContext ctx;
    ctx.x_t = state_;
    ctx.x_prev = prev;
    ctx.p_t = hip_pose(p, state_);
    ctx.p_prev = hip_prev;
    ctx.u_t = u;
    ctx.u_prev = prev_control_;
    ctx.t = time();
    ctx.horizon = static_cast<double>(horizon_steps_) * config_.dt_control;

    out.info.hip = ctx.p_t;
    out.info.orthant = classify(state_);
    out.info.terms = reward_terms(ctx, config_.orthant_mode());
    out.reward = composite(out.info.terms, config_.weights());
    out.observation = observe(state_);
    out.terminated = out.info.terms.fall == 1.0;
    out.truncated = !out.terminated && steps_ >= horizon_steps_;
    done_ = out.terminated || out.truncated;
    prev_control_ = u;
    return out;
  }

  const EnvConfig& config() const { return config_; }
  const WalkerState& state() const { return state_; }
  std::int64_t steps() const { return steps_; }
  double time() const { return static_cast<double>(steps_) * config_.dt_control; }
  bool done() const { return done_; }

  Control clip(const Control& u) const {
    return {std::clamp(u.u1, -config_.u_max, config_.u_max),
            std::clamp(u.u2, -config_.u_max, config_.u_max)};
  }

 private:
  // A heel strike inside [start, end]: the swing foot was in front and above
  // ground at the start, and the contact predicate holds at the end. Requiring
  // "in front" at the start ignores the legs passing each other mid-swing.
  bool strikes_ground(const WalkerState& start, const WalkerState& end) const {
    const WalkerParams& p = config_.params;
    const SwingFootPose f = swing_foot_pose(p, start);
    return f.x - start.stance_foot_x > config_.eps_front && f.y > 0.0 &&
           contact_predicate(p, end, config_.eps_front);
  }

  void integrate_substep(const Control& u, double h, double t_start,
                         std::vector<ImpactEvent>& events) {
    const WalkerParams& p = config_.params;
    double remaining = h;
    double t = t_start;
    while (remaining > 0.0) {
      const WalkerState start = state_;
      const WalkerState end = rk4_step(p, start, u, remaining);
      if (!strikes_ground(start, end)) {
        state_ = end;
        return;
      }
      // Bisect on the swing-foot height; `hi` always has y <= 0.
      double lo = 0.0;
      double hi = remaining;
      WalkerState hit = end;
      for (int it = 0; it < 200 && std::abs(swing_foot_pose(p, hit).y) >= kImpactHeightTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const WalkerState s = rk4_step(p, start, u, mid);
        if (swing_foot_pose(p, s).y > 0.0) {
          lo = mid;
        } else {
          hi = mid;
          hit = s;
        }
      }
      if (!contact_predicate(p, hit, config_.eps_front)) {
        state_ = end;
        return;
      }
      if (static_cast<int>(events.size()) >= config_.max_impacts_per_step) {
        throw TooManyImpactsError("more than " + std::to_string(config_.max_impacts_per_step) +
                                  " impacts in one control period");
      }
      events.push_back(impact_map(p, hit, t + hi));
      state_ = events.back().post_state;
      remaining -= hi;
      t += hi;
    }
  }

  EnvConfig config_;
  std::int64_t horizon_steps_ = 0;
  WalkerState state_;
  Control prev_control_;
  std::int64_t steps_ = 0;
  bool done_ = false;
};

// (m_H l + m (a + l)) cos(theta1), -m b cos(theta2), times g tan(phi), mapped
// back through S^-1.
inline Control virtual_gravity_control(const WalkerParams& p, const WalkerState& s, double phi) {
  const double l = p.leg_length;
  const double m = p.leg_mass;
  const double k = p.gravity * std::tan(phi);
  const double rhs1 = (p.hip_mass * l + m * (p.a + l)) * std::cos(s.theta1) * k;
  const double rhs2 = -m * p.b * std::cos(s.theta2) * k;
  const double u2 = -rhs2;
  return {rhs1 - u2, u2};
}

inline constexpr double kDefaultSlope = -0.07;

struct TraceRow {
  double t = 0.0;
  WalkerState state;
  Control control;
  HipPose hip;
  int orthant_k = 0;
  RewardTerms terms;
  double reward = 0.0;
  int impacts = 0;
};

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  bool terminated = false;
  bool truncated = false;

  double distance() const { return rows.empty() ? 0.0 : rows.back().hip.px; }

  double total_return() const {
    double r = 0.0;
    for (const auto& row : rows) r += row.reward;
    return r;
  }

  int impact_count() const {
    int n = 0;
    for (const auto& row : rows) n += row.impacts;
    return n;
  }

  std::vector<WalkerState> states() const {
    std::vector<WalkerState> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.state);
    return out;
  }
};

using StateController = std::function<Control(const WalkerState&)>;

// Resets, then steps until the episode ends or max_time elapses. The first
// row is the initial state with zero control and zero reward.
inline EpisodeTrace rollout(const EnvConfig& config, const StateController& controller,
                           double max_time = std::numeric_limits<double>::infinity()) {
  Environment env(config);
  env.reset();
  EpisodeTrace trace;
  const WalkerParams& p = config.params;
  TraceRow first;
  first.state = env.state();
  first.hip = hip_pose(p, env.state());
  first.orthant_k = classify(env.state()).index();
  trace.rows.push_back(first);

  const std::int64_t max_steps =
      std::isfinite(max_time)
          ? static_cast<std::int64_t>(std::floor(max_time / config.dt_control + 1e-9))
          : std::numeric_limits<std::int64_t>::max();
  while (!env.done() && env.steps() < max_steps) {
    const Control u = env.clip(controller(env.state()));
    const StepResult r = env.step(u);
    TraceRow row;
    row.t = env.time();
    row.state = env.state();
    row.control = u;
    row.hip = r.info.hip;
    row.orthant_k = r.info.orthant.index();
    row.terms = r.info.terms;
    row.reward = r.reward;
    row.impacts = static_cast<int>(r.info.impacts.size());
    trace.rows.push_back(row);
    trace.terminated = r.terminated;
    trace.truncated = r.truncated;
  }
  return trace;
}

inline StateController virtual_gravity_controller(const WalkerParams& p,
                                                  double phi = kDefaultSlope) {
  return [p, phi](const WalkerState& s) { return virtual_gravity_control(p, s, phi); };
}

inline StateController zero_controller() {
  return [](const WalkerState&) { return Control{}; };
}

inline CsvTable trace_table(const EpisodeTrace& trace) {
  CsvTable t;
  t.header = {"t",     "theta1", "theta2", "dtheta1", "dtheta2", "u1",    "u2",
              "px",    "py",     "orthant_k", "r_jerk", "r_dist", "r_fall", "r_for",
              "r_or",  "reward", "impact"};
  for (const auto& r : trace.rows) {
    t.add_row({format_double(r.t), format_double(r.state.theta1), format_double(r.state.theta2),
               format_double(r.state.dtheta1), format_double(r.state.dtheta2),
               format_double(r.control.u1), format_double(r.control.u2), format_double(r.hip.px),
               format_double(r.hip.py), std::to_string(r.orthant_k), format_double(r.terms.jerk),
               format_double(r.terms.dist), format_double(r.terms.fall),
               format_double(r.terms.forward), format_double(r.terms.orthant),
               format_double(r.reward), std::to_string(r.impacts)});
  }
  return t;
}

}  // namespace orthant_gait

#endif  // ORTHANT_GAIT_ENV_HPP_
