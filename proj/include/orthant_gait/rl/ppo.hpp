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

#ifndef ORTHANT_GAIT_RL_PPO_HPP_
#define ORTHANT_GAIT_RL_PPO_HPP_

// Clipped-surrogate policy optimization with GAE, written against the flat
// parameter vector of Policy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthant_gait/csv.hpp"
#include "orthant_gait/env.hpp"
#include "orthant_gait/rl/policy.hpp"

namespace orthant_gait::rl {

class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::int64_t total_steps = 500'000;
  std::int64_t n_steps = 2048;
  std::int64_t minibatch_size = 64;
  int epochs_per_update = 10;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double learning_rate = 3e-4;
  double max_grad_norm = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t hidden = 64;
  // Deterministic evaluation every this many updates (and after the last);
  // 0 disables evaluation.
  int eval_every_updates = 10;
  std::uint64_t seed = 0;

  void validate() const {
    if (total_steps < 1) throw std::invalid_argument("total_steps must be positive");
    if (n_steps < 1 || minibatch_size < 1) throw std::invalid_argument("bad rollout sizes");
    if (n_steps % minibatch_size != 0) {
      throw std::invalid_argument("n_steps must be divisible by minibatch_size");
    }
    if (epochs_per_update < 1) throw std::invalid_argument("epochs_per_update must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0, 1]");
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
      throw std::invalid_argument("gae_lambda must be in [0, 1]");
    }
    if (!(clip_eps > 0.0)) throw std::invalid_argument("clip_eps must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (hidden < 1) throw std::invalid_argument("hidden must be positive");
  }
};

struct RolloutBuffer {
  std::vector<Observation> observations;
  std::vector<Action> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> terminated;
  std::vector<std::uint8_t> truncated;
  // Critic value of the final observation of a truncated episode.
  std::vector<double> truncation_values;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }

  void clear() { *this = RolloutBuffer{}; }

  void add(const Observation& obs, const Action& act, double log_prob, double reward,
           double value, bool term, bool trunc, double trunc_value = 0.0) {
    observations.push_back(obs);
    actions.push_back(act);
    log_probs.push_back(log_prob);
    rewards.push_back(reward);
    values.push_back(value);
    terminated.push_back(term);
    truncated.push_back(trunc);
    truncation_values.push_back(trunc_value);
  }
};

// delta_t = r_t + gamma V(s_{t+1}) (1 - terminated_t) - V(s_t)
// A_t     = delta_t + gamma lambda A_{t+1}, with the recursion cut at every
//           episode boundary. Truncated steps bootstrap from the critic value
//           of their final observation; the last step of the buffer
//           bootstraps from bootstrap_value.
inline void compute_gae(RolloutBuffer& buf, double gamma, double lambda, double bootstrap_value) {
  const std::size_t n = buf.size();
  buf.advantages.assign(n, 0.0);
  buf.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    double next_value = 0.0;
    double carry = 0.0;
    if (buf.terminated[t]) {
      next_value = 0.0;
    } else if (buf.truncated[t]) {
      next_value = buf.truncation_values[t];
    } else {
      next_value = t + 1 < n ? buf.values[t + 1] : bootstrap_value;
      carry = t + 1 < n ? next_adv : 0.0;
    }
    const double delta = buf.rewards[t] + gamma * next_value - buf.values[t];
    next_adv = delta + gamma * lambda * carry;
    buf.advantages[t] = next_adv;
    buf.returns[t] = next_adv + buf.values[t];
  }
}

inline void normalize_advantages(std::vector<double>& adv) {
  if (adv.empty()) return;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (sd + 1e-8);
}

struct Minibatch {
  std::vector<Observation> observations;
  std::vector<Action> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return observations.size(); }
};

inline Minibatch gather(const RolloutBuffer& buf, const std::vector<double>& advantages,
                        std::span<const std::size_t> idx) {
  Minibatch mb;
  for (std::size_t i : idx) {
    mb.observations.push_back(buf.observations[i]);
    mb.actions.push_back(buf.actions[i]);
    mb.old_log_probs.push_back(buf.log_probs[i]);
    mb.advantages.push_back(advantages[i]);
    mb.returns.push_back(buf.returns[i]);
  }
  return mb;
}

struct LossResult {
  double total = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// Loss = -mean(min(rho A, clip(rho) A)) + value_coef mean((V - R)^2)
//        - entropy_coef entropy.
// If grad is non-empty, d(loss)/d(params) is accumulated into it.
inline LossResult ppo_loss(const Policy& policy, const Minibatch& mb, const TrainConfig& cfg,
                           std::span<double> grad = {}) {
  const std::size_t n = mb.size();
  if (n == 0) throw std::invalid_argument("empty minibatch");
  const bool want_grad = !grad.empty();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Action ls = policy.log_std();
  const Action sigma = {std::exp(ls[0]), std::exp(ls[1])};
  const auto raw_ls = policy.log_std_params();

  std::span<double> g_actor, g_logstd, g_critic;
  if (want_grad) {
    g_actor = grad.subspan(policy.actor_offset(), policy.actor().num_params());
    g_logstd = grad.subspan(policy.log_std_offset(), kActDim);
    g_critic = grad.subspan(policy.critic_offset(), policy.critic().num_params());
  }

  LossResult r;
  Mlp::Cache actor_cache;
  Mlp::Cache critic_cache;
  for (std::size_t k = 0; k < n; ++k) {
    const auto out = policy.actor().forward(policy.actor_params(), mb.observations[k], actor_cache);
    const Action mu = {out[0], out[1]};
    const Action& a = mb.actions[k];
    const double logp = gaussian_log_prob(a, mu, ls);
    const double log_ratio = logp - mb.old_log_probs[k];
    const double ratio = std::exp(log_ratio);
    const double adv = mb.advantages[k];
    const double surr1 = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double surr2 = clipped * adv;
    r.policy_loss -= std::min(surr1, surr2) * inv_n;
    r.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;
    if (std::abs(ratio - 1.0) > cfg.clip_eps) r.clip_fraction += inv_n;

    const double v = policy.critic().forward(policy.critic_params(), mb.observations[k],
                                             critic_cache)[0];
    const double verr = v - mb.returns[k];
    r.value_loss += verr * verr * inv_n;

    if (want_grad) {
      // The clipped branch only wins when the ratio is saturated, where its
      // gradient is zero.
      const double d_logp = surr1 <= surr2 ? -adv * ratio * inv_n : 0.0;
      std::array<double, kActDim> d_mu{};
      for (std::size_t i = 0; i < kActDim; ++i) {
        const double z = (a[i] - mu[i]) / sigma[i];
        d_mu[i] = d_logp * z / sigma[i];
        if (raw_ls[i] > kLogStdMin && raw_ls[i] < kLogStdMax) g_logstd[i] += d_logp * (z * z - 1.0);
      }
      policy.actor().backward(policy.actor_params(), actor_cache, d_mu, g_actor);
      const double d_v = cfg.value_coef * 2.0 * verr * inv_n;
      policy.critic().backward(policy.critic_params(), critic_cache, std::span<const double>(&d_v, 1),
                               g_critic);
    }
  }
  r.entropy = gaussian_entropy(ls);
  if (want_grad) {
    for (std::size_t i = 0; i < kActDim; ++i) {
      if (raw_ls[i] > kLogStdMin && raw_ls[i] < kLogStdMax) g_logstd[i] -= cfg.entropy_coef;
    }
  }
  r.total = r.policy_loss + cfg.value_coef * r.value_loss - cfg.entropy_coef * r.entropy;
  return r;
}

// Scales grad in place so its L2 norm is at most max_norm. Returns the norm
// before clipping.
inline double clip_grad_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  const double coef = max_norm / (norm + 1e-6);
  if (coef < 1.0) {
    for (double& g : grad) g *= coef;
  }
  return norm;
}

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m_[i] / c1;
      const double v_hat = v_[i] / c2;
      params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }

  std::int64_t steps() const { return t_; }

 private:
  double lr_ = 3e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

struct UpdateMetrics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// Runs epochs_per_update passes of shuffled minibatches over a buffer whose
// advantages and returns are already computed. Metrics are minibatch means.
inline UpdateMetrics ppo_update(Policy& policy, Adam& adam, const RolloutBuffer& buf,
                                const TrainConfig& cfg, std::mt19937_64& rng) {
  if (buf.advantages.size() != buf.size()) {
    throw std::invalid_argument("ppo_update needs computed advantages");
  }
  std::vector<double> adv = buf.advantages;
  normalize_advantages(adv);
  std::vector<std::size_t> order(buf.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(policy.params().size());
  const std::size_t mb_size = static_cast<std::size_t>(cfg.minibatch_size);

  UpdateMetrics m;
  int batches = 0;
  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += mb_size) {
      const std::size_t len = std::min(mb_size, order.size() - start);
      const Minibatch mb = gather(buf, adv, std::span(order).subspan(start, len));
      std::fill(grad.begin(), grad.end(), 0.0);
      const LossResult loss = ppo_loss(policy, mb, cfg, grad);
      if (!std::isfinite(loss.total)) {
        throw NonFiniteLossError("non-finite PPO loss");
      }
      clip_grad_norm(grad, cfg.max_grad_norm);
      adam.step(policy.params(), grad);
      policy.clamp_log_std();
      m.policy_loss += loss.policy_loss;
      m.value_loss += loss.value_loss;
      m.entropy += loss.entropy;
      m.approx_kl += loss.approx_kl;
      m.clip_fraction += loss.clip_fraction;
      ++batches;
    }
  }
  const double k = 1.0 / std::max(batches, 1);
  m.policy_loss *= k;
  m.value_loss *= k;
  m.entropy *= k;
  m.approx_kl *= k;
  m.clip_fraction *= k;
  if (!policy.finite()) throw NonFiniteLossError("non-finite policy parameters after update");
  return m;
}

struct EvalResult {
  double mean_return = 0.0;
  double mean_distance = 0.0;
  // Fraction of episodes that reached the horizon without falling.
  double completed_fraction = 0.0;
  std::vector<double> returns;
  std::vector<double> distances;
  std::vector<bool> completed;
};

// Runs the controller for full episodes and reports return and final hip x.
inline EvalResult evaluate_controller(const StateController& controller, const EnvConfig& env_config,
                                      int episodes) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  EvalResult r;
  for (int e = 0; e < episodes; ++e) {
    const EpisodeTrace trace = rollout(env_config, controller);
    r.returns.push_back(trace.total_return());
    r.distances.push_back(trace.distance());
    r.completed.push_back(trace.truncated);
  }
  const double n = static_cast<double>(episodes);
  r.mean_return = std::accumulate(r.returns.begin(), r.returns.end(), 0.0) / n;
  r.mean_distance = std::accumulate(r.distances.begin(), r.distances.end(), 0.0) / n;
  r.completed_fraction =
      static_cast<double>(std::count(r.completed.begin(), r.completed.end(), true)) / n;
  return r;
}

inline StateController deterministic_controller(const Policy& policy) {
  return [&policy](const WalkerState& s) { return to_control(policy.mean(observe(s))); };
}

// Deterministic (mean-action) evaluation.
inline EvalResult evaluate(const Policy& policy, const EnvConfig& env_config, int episodes = 1) {
  return evaluate_controller(deterministic_controller(policy), env_config, episodes);
}

// One row per finished episode (episode fields set) or per update (loss
// fields set).
struct LogRow {
  std::int64_t step = 0;
  std::int64_t episode = 0;
  std::optional<double> ret;
  std::optional<double> length;
  std::optional<double> distance;
  std::optional<double> policy_loss;
  std::optional<double> value_loss;
  std::optional<double> approx_kl;
  std::optional<double> clip_fraction;

  bool is_update() const { return policy_loss.has_value(); }
};

struct EvalRecord {
  std::int64_t update = 0;
  std::int64_t step = 0;
  double distance = 0.0;
  double ret = 0.0;
  bool completed = false;
};

struct LearningLog {
  std::vector<LogRow> rows;
  std::vector<EvalRecord> evals;

  std::int64_t update_count() const {
    return std::count_if(rows.begin(), rows.end(), [](const LogRow& r) { return r.is_update(); });
  }
};

inline CsvTable learning_log_table(const LearningLog& log) {
  CsvTable t;
  t.header = {"step",   "episode",     "return",     "length",   "distance",
              "policy_loss", "value_loss", "approx_kl", "clip_fraction"};
  for (const auto& r : log.rows) {
    t.add_row({std::to_string(r.step), std::to_string(r.episode), format_optional(r.ret),
               format_optional(r.length), format_optional(r.distance),
               format_optional(r.policy_loss), format_optional(r.value_loss),
               format_optional(r.approx_kl), format_optional(r.clip_fraction)});
  }
  return t;
}

inline std::vector<LogRow> parse_learning_log(const CsvTable& t) {
  const std::size_t c_step = t.column("step"), c_ep = t.column("episode"),
                    c_ret = t.column("return"), c_len = t.column("length"),
                    c_dist = t.column("distance"), c_pl = t.column("policy_loss"),
                    c_vl = t.column("value_loss"), c_kl = t.column("approx_kl"),
                    c_cf = t.column("clip_fraction");
  std::vector<LogRow> rows;
  for (const auto& cells : t.rows) {
    rows.push_back({parse_int(cells[c_step]), parse_int(cells[c_ep]), parse_optional(cells[c_ret]),
                    parse_optional(cells[c_len]), parse_optional(cells[c_dist]),
                    parse_optional(cells[c_pl]), parse_optional(cells[c_vl]),
                    parse_optional(cells[c_kl]), parse_optional(cells[c_cf])});
  }
  return rows;
}

inline CsvTable evals_table(const std::vector<EvalRecord>& evals) {
  CsvTable t;
  t.header = {"update", "step", "distance", "return", "completed"};
  for (const auto& e : evals) {
    t.add_row({std::to_string(e.update), std::to_string(e.step), format_double(e.distance),
               format_double(e.ret), e.completed ? "1" : "0"});
  }
  return t;
}

inline std::vector<EvalRecord> parse_evals(const CsvTable& t) {
  const std::size_t c_u = t.column("update"), c_s = t.column("step"), c_d = t.column("distance"),
                    c_r = t.column("return"), c_c = t.column("completed");
  std::vector<EvalRecord> out;
  for (const auto& cells : t.rows) {
    out.push_back({parse_int(cells[c_u]), parse_int(cells[c_s]), parse_double(cells[c_d]),
                   parse_double(cells[c_r]), parse_int(cells[c_c]) != 0});
  }
  return out;
}

struct TrainResult {
  Policy policy;
  LearningLog log;
};

// Called after every update with the log so far; used for progress output.
using TrainProgress = std::function<void(const LearningLog&)>;

inline std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Alternates n_steps of experience collection with one ppo_update until at
// least total_steps environment steps have been taken. Episodes auto-reset.
// If the update throws NonFiniteLossError, the log collected so far is handed
// to `on_failure` before the exception propagates.
inline TrainResult train(const EnvConfig& env_config, const TrainConfig& cfg,
                         const TrainProgress& progress = {},
                         const std::function<void(const LearningLog&)>& on_failure = {}) {
  cfg.validate();
  env_config.validate();
  std::mt19937_64 init_rng = derive_rng(cfg.seed, 0);
  std::mt19937_64 action_rng = derive_rng(cfg.seed, 1);
  std::mt19937_64 shuffle_rng = derive_rng(cfg.seed, 2);

  TrainResult result{Policy(cfg.hidden), {}};
  Policy& policy = result.policy;
  policy.initialize(init_rng);
  Adam adam(policy.params().size(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
            cfg.adam_eps);
  Environment env(env_config);
  Observation obs = env.reset();

  std::int64_t steps = 0;
  std::int64_t episodes = 0;
  std::int64_t updates = 0;
  double ep_return = 0.0;
  std::int64_t ep_length = 0;
  RolloutBuffer buf;
  LearningLog& log = result.log;
  const std::int64_t total_updates = (cfg.total_steps + cfg.n_steps - 1) / cfg.n_steps;

  while (steps < cfg.total_steps) {
    buf.clear();
    for (std::int64_t k = 0; k < cfg.n_steps; ++k) {
      const ActResult a = policy.act(obs, true, action_rng);
      const StepResult sr = env.step(to_control(a.action));
      ++steps;
      ep_return += sr.reward;
      ++ep_length;
      const double trunc_value = sr.truncated ? policy.value(sr.observation) : 0.0;
      buf.add(obs, a.action, a.log_prob, sr.reward, a.value, sr.terminated, sr.truncated,
              trunc_value);
      obs = sr.observation;
      if (sr.terminated || sr.truncated) {
        LogRow row;
        row.step = steps;
        row.episode = episodes++;
        row.ret = ep_return;
        row.length = static_cast<double>(ep_length);
        row.distance = sr.info.hip.px;
        log.rows.push_back(row);
        ep_return = 0.0;
        ep_length = 0;
        obs = env.reset();
      }
    }
    compute_gae(buf, cfg.gamma, cfg.gae_lambda, policy.value(obs));
    UpdateMetrics m;
    try {
      m = ppo_update(policy, adam, buf, cfg, shuffle_rng);
    } catch (const NonFiniteLossError&) {
      if (on_failure) on_failure(log);
      throw;
    }
    ++updates;
    LogRow row;
    row.step = steps;
    row.episode = episodes;
    row.policy_loss = m.policy_loss;
    row.value_loss = m.value_loss;
    row.approx_kl = m.approx_kl;
    row.clip_fraction = m.clip_fraction;
    log.rows.push_back(row);

    const bool last = updates == total_updates;
    if (cfg.eval_every_updates > 0 && (updates % cfg.eval_every_updates == 0 || last)) {
      const EvalResult ev = evaluate(policy, env_config, 1);
      log.evals.push_back({updates, steps, ev.distances[0], ev.returns[0], ev.completed[0]});
    }
    if (progress) progress(log);
  }
  return result;
}

}  // namespace orthant_gait::rl

#endif  // ORTHANT_GAIT_RL_PPO_HPP_
