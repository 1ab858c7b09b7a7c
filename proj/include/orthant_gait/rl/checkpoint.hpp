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

#ifndef ORTHANT_GAIT_RL_CHECKPOINT_HPP_
#define ORTHANT_GAIT_RL_CHECKPOINT_HPP_

// Policy checkpoint, a line-oriented text format:
//
//   orthant_gait_policy 1              magic and format version
//   <key> <value>                      training and environment settings
//   array <name> <rows> <cols>         followed by <rows> lines of <cols>
//   ...                                space-separated shortest round-trip
//   end                                floats
//
// Arrays appear in parameter order: actor layers (weight then bias),
// log_std, critic layers. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthant_gait/csv.hpp"
#include "orthant_gait/env.hpp"
#include "orthant_gait/rl/ppo.hpp"

namespace orthant_gait::rl {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointMagic = "orthant_gait_policy";

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  Policy policy;
  TrainConfig train;
  EnvConfig env;
};

namespace detail {

struct ArraySpec {
  std::string name;
  std::size_t offset;
  std::size_t rows;
  std::size_t cols;
};

inline std::vector<ArraySpec> array_layout(const Policy& policy) {
  std::vector<ArraySpec> specs;
  auto add_net = [&specs](const Mlp& net, const std::string& prefix, std::size_t base) {
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      const Mlp::Layer& L = net.layers()[i];
      const std::string stem = prefix + "." + std::to_string(i);
      specs.push_back({stem + ".weight", base + L.weight_offset, L.out, L.in});
      specs.push_back({stem + ".bias", base + L.bias_offset, 1, L.out});
    }
  };
  add_net(policy.actor(), "actor", policy.actor_offset());
  specs.push_back({"log_std", policy.log_std_offset(), 1, kActDim});
  add_net(policy.critic(), "critic", policy.critic_offset());
  return specs;
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  std::ostringstream out;
  const TrainConfig& t = ck.train;
  const EnvConfig& e = ck.env;
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "hidden " << ck.policy.hidden() << '\n';
  out << "train.seed " << t.seed << '\n';
  out << "train.total_steps " << t.total_steps << '\n';
  out << "train.n_steps " << t.n_steps << '\n';
  out << "train.minibatch_size " << t.minibatch_size << '\n';
  out << "train.epochs_per_update " << t.epochs_per_update << '\n';
  out << "train.gamma " << format_double(t.gamma) << '\n';
  out << "train.gae_lambda " << format_double(t.gae_lambda) << '\n';
  out << "train.clip_eps " << format_double(t.clip_eps) << '\n';
  out << "train.value_coef " << format_double(t.value_coef) << '\n';
  out << "train.entropy_coef " << format_double(t.entropy_coef) << '\n';
  out << "train.learning_rate " << format_double(t.learning_rate) << '\n';
  out << "train.max_grad_norm " << format_double(t.max_grad_norm) << '\n';
  out << "env.setup " << to_string(e.reward_setup) << '\n';
  out << "env.strict_orthant " << (e.strict_orthant_reward ? 1 : 0) << '\n';
  out << "env.dt_control " << format_double(e.dt_control) << '\n';
  out << "env.substeps " << e.substeps << '\n';
  out << "env.horizon " << format_double(e.horizon) << '\n';
  out << "env.u_max " << format_double(e.u_max) << '\n';
  const auto& p = ck.policy.params();
  for (const auto& spec : detail::array_layout(ck.policy)) {
    out << "array " << spec.name << ' ' << spec.rows << ' ' << spec.cols << '\n';
    for (std::size_t r = 0; r < spec.rows; ++r) {
      for (std::size_t c = 0; c < spec.cols; ++c) {
        if (c) out << ' ';
        out << format_double(p[spec.offset + r * spec.cols + c]);
      }
      out << '\n';
    }
  }
  out << "end\n";
  return out.str();
}

inline Checkpoint parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) {
    throw CheckpointError("not a policy checkpoint");
  }
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  std::map<std::string, std::string> kv;
  std::string key;
  std::size_t hidden = 0;
  while (in >> key && key != "array") {
    std::string value;
    if (!(in >> value)) throw CheckpointError("truncated checkpoint header");
    kv[key] = value;
  }
  if (key != "array") throw CheckpointError("checkpoint has no parameter arrays");
  auto take = [&kv](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw CheckpointError("checkpoint is missing '" + k + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  Checkpoint ck;
  try {
    hidden = static_cast<std::size_t>(parse_int(take("hidden")));
    TrainConfig& t = ck.train;
    t.hidden = hidden;
    t.seed = static_cast<std::uint64_t>(parse_int(take("train.seed")));
    t.total_steps = parse_int(take("train.total_steps"));
    t.n_steps = parse_int(take("train.n_steps"));
    t.minibatch_size = parse_int(take("train.minibatch_size"));
    t.epochs_per_update = static_cast<int>(parse_int(take("train.epochs_per_update")));
    t.gamma = parse_double(take("train.gamma"));
    t.gae_lambda = parse_double(take("train.gae_lambda"));
    t.clip_eps = parse_double(take("train.clip_eps"));
    t.value_coef = parse_double(take("train.value_coef"));
    t.entropy_coef = parse_double(take("train.entropy_coef"));
    t.learning_rate = parse_double(take("train.learning_rate"));
    t.max_grad_norm = parse_double(take("train.max_grad_norm"));
    EnvConfig& e = ck.env;
    const std::string setup = take("env.setup");
    const auto parsed = parse_reward_setup(setup);
    if (!parsed) throw CheckpointError("unknown reward setup '" + setup + "'");
    e.reward_setup = *parsed;
    e.strict_orthant_reward = parse_int(take("env.strict_orthant")) != 0;
    e.dt_control = parse_double(take("env.dt_control"));
    e.substeps = static_cast<int>(parse_int(take("env.substeps")));
    e.horizon = parse_double(take("env.horizon"));
    e.u_max = parse_double(take("env.u_max"));
  } catch (const CsvError& err) {
    throw CheckpointError(std::string("bad checkpoint header value: ") + err.what());
  }
  if (!kv.empty()) throw CheckpointError("unknown checkpoint key '" + kv.begin()->first + "'");
  if (hidden < 1 || hidden > 4096) throw CheckpointError("implausible hidden width");

  ck.policy = Policy(hidden);
  auto& p = ck.policy.params();
  bool first = true;
  for (const auto& spec : detail::array_layout(ck.policy)) {
    if (!first && !(in >> key && key == "array")) throw CheckpointError("expected 'array'");
    first = false;
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols)) throw CheckpointError("truncated array header");
    if (name != spec.name || rows != spec.rows || cols != spec.cols) {
      throw CheckpointError("array '" + name + "' does not match the expected layout");
    }
    for (std::size_t i = 0; i < rows * cols; ++i) {
      std::string tok;
      if (!(in >> tok)) throw CheckpointError("truncated array '" + name + "'");
      double v = 0.0;
      try {
        v = parse_double(tok);
      } catch (const CsvError&) {
        throw CheckpointError("bad value in array '" + name + "'");
      }
      if (!std::isfinite(v)) throw CheckpointError("non-finite value in array '" + name + "'");
      p[spec.offset + i] = v;
    }
  }
  if (!(in >> key) || key != "end") throw CheckpointError("missing checkpoint terminator");
  return ck;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  write_file_atomic(path, serialize_checkpoint(ck));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw CheckpointError(e.what());
  }
  return parse_checkpoint(text);
}

}  // namespace orthant_gait::rl

#endif  // ORTHANT_GAIT_RL_CHECKPOINT_HPP_
