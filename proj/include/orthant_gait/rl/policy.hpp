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

#ifndef ORTHANT_GAIT_RL_POLICY_HPP_
#define ORTHANT_GAIT_RL_POLICY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "orthant_gait/env.hpp"
#include "orthant_gait/plant.hpp"
#include "orthant_gait/rl/mlp.hpp"

namespace orthant_gait::rl {

inline constexpr std::size_t kObsDim = 4;
inline constexpr std::size_t kActDim = 2;
inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

using Action = std::array<double, kActDim>;

inline Control to_control(const Action& a) { return {a[0], a[1]}; }

// Log density of a diagonal Gaussian.
inline double gaussian_log_prob(const Action& x, const Action& mean, const Action& log_std) {
  double lp = 0.0;
  for (std::size_t i = 0; i < kActDim; ++i) {
    const double z = (x[i] - mean[i]) / std::exp(log_std[i]);
    lp += -0.5 * z * z - log_std[i] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

inline double gaussian_entropy(const Action& log_std) {
  double h = 0.0;
  for (double ls : log_std) h += ls + 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return h;
}

struct ActResult {
  Action action{};
  double log_prob = 0.0;
  double value = 0.0;
};

// Gaussian actor with state-independent log std and a separate value critic.
// All parameters are stored in one flat vector: [actor | log_std | critic].
class Policy {
 public:
  Policy() : Policy(64) {}

  explicit Policy(std::size_t hidden)
      : actor_({kObsDim, hidden, hidden, kActDim}), critic_({kObsDim, hidden, hidden, 1}) {
    params_.assign(actor_.num_params() + kActDim + critic_.num_params(), 0.0);
  }

  // Orthogonal init: gain sqrt(2) in hidden layers, 0.01 on the action head,
  // 1 on the value head; log std starts at 0.
  void initialize(std::mt19937_64& rng) {
    actor_.init_orthogonal(actor_params(), rng, std::sqrt(2.0), 0.01);
    critic_.init_orthogonal(critic_params(), rng, std::sqrt(2.0), 1.0);
    for (double& v : log_std_params()) v = 0.0;
  }

  std::size_t hidden() const { return actor_.widths()[1]; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::size_t actor_offset() const { return 0; }
  std::size_t log_std_offset() const { return actor_.num_params(); }
  std::size_t critic_offset() const { return actor_.num_params() + kActDim; }

  std::span<double> actor_params() { return {params_.data(), actor_.num_params()}; }
  std::span<const double> actor_params() const { return {params_.data(), actor_.num_params()}; }
  std::span<double> log_std_params() { return {params_.data() + log_std_offset(), kActDim}; }
  std::span<const double> log_std_params() const {
    return {params_.data() + log_std_offset(), kActDim};
  }
  std::span<double> critic_params() {
    return {params_.data() + critic_offset(), critic_.num_params()};
  }
  std::span<const double> critic_params() const {
    return {params_.data() + critic_offset(), critic_.num_params()};
  }

  Action log_std() const {
    const auto p = log_std_params();
    return {std::clamp(p[0], kLogStdMin, kLogStdMax), std::clamp(p[1], kLogStdMin, kLogStdMax)};
  }

  void clamp_log_std() {
    for (double& v : log_std_params()) v = std::clamp(v, kLogStdMin, kLogStdMax);
  }

  Action mean(const Observation& obs) const {
    Mlp::Cache cache;
    const auto out = actor_.forward(actor_params(), obs, cache);
    return {out[0], out[1]};
  }

  double value(const Observation& obs) const {
    Mlp::Cache cache;
    return critic_.forward(critic_params(), obs, cache)[0];
  }

  ActResult act(const Observation& obs, bool stochastic, std::mt19937_64& rng) const {
    ActResult r;
    const Action mu = mean(obs);
    const Action ls = log_std();
    if (stochastic) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t i = 0; i < kActDim; ++i) r.action[i] = mu[i] + std::exp(ls[i]) * normal(rng);
    } else {
      r.action = mu;
    }
    r.log_prob = gaussian_log_prob(r.action, mu, ls);
    r.value = value(obs);
    return r;
  }

  bool finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  Mlp actor_;
  Mlp critic_;
  std::vector<double> params_;
};

}  // namespace orthant_gait::rl

#endif  // ORTHANT_GAIT_RL_POLICY_HPP_
