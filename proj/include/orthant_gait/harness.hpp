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

#ifndef ORTHANT_GAIT_HARNESS_HPP_
#define ORTHANT_GAIT_HARNESS_HPP_

// Command implementations behind the orthant_gait CLI and the multi-seed
// experiment sweep. Every command takes plain option structs so that tests can
// drive them without a process boundary.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "orthant_gait/automaton.hpp"
#include "orthant_gait/csv.hpp"
#include "orthant_gait/env.hpp"
#include "orthant_gait/reward.hpp"
#include "orthant_gait/rl/checkpoint.hpp"
#include "orthant_gait/rl/ppo.hpp"

namespace orthant_gait::harness {

namespace fs = std::filesystem;

inline constexpr const char* kLearningLogFile = "learning_log.csv";
inline constexpr const char* kEvalsFile = "evals.csv";
inline constexpr const char* kCheckpointFile = "policy.ckpt";
inline constexpr const char* kErrorFile = "error.txt";

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  EnvConfig env;
  std::string controller = "vg";  // "vg" or "zero"
  double phi = kDefaultSlope;
  double max_time = std::numeric_limits<double>::infinity();
  std::optional<fs::path> trace_out;
};

struct SimulateSummary {
  EpisodeTrace trace;
  CycleReport monitor;
  std::int64_t steps = 0;
  double distance = 0.0;
  double total_return = 0.0;
  bool fell = false;
  int impacts = 0;
};

inline StateController make_controller(const std::string& name, const WalkerParams& params,
                                       double phi) {
  if (name == "vg") return virtual_gravity_controller(params, phi);
  if (name == "zero") return zero_controller();
  throw std::invalid_argument("unknown controller '" + name + "' (expected vg or zero)");
}

inline SimulateSummary run_simulate(const SimulateOptions& opt, std::ostream& out) {
  SimulateSummary s;
  s.trace = rollout(opt.env, make_controller(opt.controller, opt.env.params, opt.phi), opt.max_time);
  const std::vector<WalkerState> states = s.trace.states();
  s.monitor = cycle_monitor(states);
  s.steps = static_cast<std::int64_t>(s.trace.rows.size()) - 1;
  s.distance = s.trace.distance();
  s.total_return = s.trace.total_return();
  s.fell = s.trace.terminated;
  s.impacts = s.trace.impact_count();
  if (opt.trace_out) write_file_atomic(*opt.trace_out, trace_table(s.trace).serialize());

  out << "controller: " << opt.controller << " (phi = " << format_double(opt.phi) << ")\n"
      << "steps: " << s.steps << '\n'
      << "time: " << format_double(s.trace.rows.back().t) << " s\n"
      << "distance: " << format_double(s.distance) << " m\n"
      << "fell: " << (s.fell ? "yes" : "no") << '\n'
      << "impacts: " << s.impacts << '\n'
      << "return (" << to_string(opt.env.reward_setup) << "): " << format_double(s.total_return)
      << '\n';
  if (s.monitor.entered_at) {
    out << "cycle entered at step: " << *s.monitor.entered_at << '\n';
  } else {
    out << "cycle entered at step: never\n";
  }
  out << "cycle violations after entry: " << s.monitor.violations.size() << '\n';
  if (opt.trace_out) out << "trace: " << opt.trace_out->string() << '\n';
  return s;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  EnvConfig env;
  rl::TrainConfig train;
  fs::path out_dir;
  bool quiet = false;
};

// Writes learning_log.csv, evals.csv and finally policy.ckpt into out_dir.
// On NonFiniteLossError the learning log up to the failure is written before
// the exception propagates.
inline rl::TrainResult run_train(const TrainOptions& opt, std::ostream& out) {
  auto flush_log = [&opt](const rl::LearningLog& log) {
    write_file_atomic(opt.out_dir / kLearningLogFile, learning_log_table(log).serialize());
  };
  rl::TrainProgress progress;
  if (!opt.quiet) {
    progress = [&out](const rl::LearningLog& log) {
      const rl::LogRow& last = log.rows.back();
      out << "update " << log.update_count() << " step " << last.step << " episodes "
          << last.episode << " policy_loss " << format_optional(last.policy_loss) << " kl "
          << format_optional(last.approx_kl) << '\n';
    };
  }
  rl::TrainResult result = rl::train(opt.env, opt.train, progress, flush_log);
  flush_log(result.log);
  write_file_atomic(opt.out_dir / kEvalsFile, rl::evals_table(result.log.evals).serialize());
  rl::save_checkpoint(opt.out_dir / kCheckpointFile, {result.policy, opt.train, opt.env});
  return result;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  fs::path checkpoint;
  int episodes = 1;
  std::optional<fs::path> trace_out;
};

inline rl::EvalResult run_evaluate(const EvaluateOptions& opt, std::ostream& out) {
  const rl::Checkpoint ck = rl::load_checkpoint(opt.checkpoint);
  const rl::EvalResult r = rl::evaluate(ck.policy, ck.env, opt.episodes);
  out << "setup: " << to_string(ck.env.reward_setup) << '\n'
      << "episodes: " << opt.episodes << '\n'
      << "mean return: " << format_double(r.mean_return) << '\n'
      << "mean distance: " << format_double(r.mean_distance) << " m\n"
      << "completed fraction: " << format_double(r.completed_fraction) << '\n';
  if (opt.trace_out) {
    const EpisodeTrace trace = rollout(ck.env, rl::deterministic_controller(ck.policy));
    write_file_atomic(*opt.trace_out, trace_table(trace).serialize());
    out << "trace: " << opt.trace_out->string() << '\n';
  }
  return r;
}

// ---------------------------------------------------------------- experiment

struct ExperimentSpec {
  std::vector<RewardSetup> setups{kRewardSetups.begin(), kRewardSetups.end()};
  std::vector<std::uint64_t> seeds = [] {
    std::vector<std::uint64_t> s(15);
    std::iota(s.begin(), s.end(), std::uint64_t{0});
    return s;
  }();
  std::int64_t steps_per_run = 500'000;
  EnvConfig env;
  rl::TrainConfig train;  // seed and total_steps are overridden per run
  fs::path out_dir = "experiment";
  int jobs = 1;
  // Normalize every setup by the baseline's sparse-setup return instead of
  // its return under the setup's own weights.
  bool shared_baseline = false;
  bool quiet = false;

  void validate() const {
    if (setups.empty()) throw std::invalid_argument("experiment needs at least one setup");
    if (seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
    if (steps_per_run < 1) throw std::invalid_argument("steps_per_run must be positive");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  }
};

struct SetupAggregate {
  RewardSetup setup = RewardSetup::Sparse;
  double baseline_return = 0.0;
  double normalizer = 1.0;
  std::vector<std::uint64_t> seeds;  // completed runs only
  std::vector<double> best_distance;
  std::vector<double> best_reward;  // max of the normalized curve
  std::vector<std::int64_t> curve_steps;
  std::vector<double> mean_curve;  // normalized, averaged over seeds
  std::vector<int> curve_counts;
  double reward_std = std::nan("");
  double distance_std = std::nan("");
};

struct AggregateReport {
  std::vector<SetupAggregate> setups;
  double baseline_distance = 0.0;
  int runs_trained = 0;
  std::vector<std::string> failed_runs;
};

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return std::nan("");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline fs::path run_dir(const fs::path& root, RewardSetup setup, std::uint64_t seed) {
  return root / "runs" / std::string(to_string(setup)) / ("seed_" + std::to_string(seed));
}

inline bool run_complete(const fs::path& dir) {
  return fs::exists(dir / kCheckpointFile) && fs::exists(dir / kLearningLogFile) &&
         fs::exists(dir / kEvalsFile);
}

struct BaselineStats {
  double ret = 0.0;
  double distance = 0.0;
};

inline BaselineStats baseline_for(EnvConfig env, RewardSetup setup, double phi = kDefaultSlope) {
  env.reward_setup = setup;
  const EpisodeTrace trace = rollout(env, virtual_gravity_controller(env.params, phi));
  return {trace.total_return(), trace.distance()};
}

// Mean return of the episodes finished during each rollout, sampled at update
// boundaries. Rollouts without a finished episode carry the previous value.
inline std::vector<std::pair<std::int64_t, double>> learning_curve(
    const std::vector<rl::LogRow>& rows) {
  std::vector<std::pair<std::int64_t, double>> curve;
  double sum = 0.0;
  int count = 0;
  double last = std::nan("");
  for (const auto& r : rows) {
    if (r.is_update()) {
      if (count > 0) last = sum / count;
      curve.emplace_back(r.step, last);
      sum = 0.0;
      count = 0;
    } else if (r.ret) {
      sum += *r.ret;
      ++count;
    }
  }
  return curve;
}

// Best deterministic-evaluation distance among evaluations that reached the
// horizon; 0 if none did.
inline double best_distance(const std::vector<rl::EvalRecord>& evals) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : evals) {
    if (e.completed) best = std::max(best, e.distance);
  }
  return std::isfinite(best) ? best : 0.0;
}

// Builds the report from artifacts on disk.
inline AggregateReport aggregate(const ExperimentSpec& spec) {
  AggregateReport report;
  const BaselineStats shared = baseline_for(spec.env, RewardSetup::Sparse);
  report.baseline_distance = shared.distance;
  for (RewardSetup setup : spec.setups) {
    SetupAggregate agg;
    agg.setup = setup;
    agg.baseline_return = baseline_for(spec.env, setup).ret;
    agg.normalizer = spec.shared_baseline ? shared.ret : agg.baseline_return;
    std::vector<std::vector<std::pair<std::int64_t, double>>> curves;
    for (std::uint64_t seed : spec.seeds) {
      const fs::path dir = run_dir(spec.out_dir, setup, seed);
      if (!run_complete(dir)) continue;
      const auto rows = rl::parse_learning_log(read_csv(dir / kLearningLogFile));
      const auto evals = rl::parse_evals(read_csv(dir / kEvalsFile));
      auto curve = learning_curve(rows);
      double best = -std::numeric_limits<double>::infinity();
      for (auto& [step, v] : curve) {
        v /= agg.normalizer;
        if (std::isfinite(v)) best = std::max(best, v);
      }
      agg.seeds.push_back(seed);
      agg.best_distance.push_back(best_distance(evals));
      agg.best_reward.push_back(std::isfinite(best) ? best : std::nan(""));
      curves.push_back(std::move(curve));
    }
    std::size_t len = 0;
    for (const auto& c : curves) len = std::max(len, c.size());
    for (std::size_t i = 0; i < len; ++i) {
      double sum = 0.0;
      int n = 0;
      std::int64_t step = 0;
      for (const auto& c : curves) {
        if (i < c.size()) {
          step = c[i].first;
          if (std::isfinite(c[i].second)) {
            sum += c[i].second;
            ++n;
          }
        }
      }
      agg.curve_steps.push_back(step);
      agg.mean_curve.push_back(n > 0 ? sum / n : std::nan(""));
      agg.curve_counts.push_back(n);
    }
    agg.reward_std = sample_std(agg.best_reward);
    agg.distance_std = sample_std(agg.best_distance);
    report.setups.push_back(std::move(agg));
  }
  return report;
}

inline CsvTable learning_curves_table(const AggregateReport& r) {
  CsvTable t;
  t.header = {"setup", "step", "mean_normalized_return", "n_runs"};
  for (const auto& s : r.setups) {
    for (std::size_t i = 0; i < s.curve_steps.size(); ++i) {
      t.add_row({std::string(to_string(s.setup)), std::to_string(s.curve_steps[i]),
                 format_double(s.mean_curve[i]), std::to_string(s.curve_counts[i])});
    }
  }
  return t;
}

inline CsvTable distances_table(const AggregateReport& r) {
  CsvTable t;
  t.header = {"setup", "seed", "best_distance"};
  for (const auto& s : r.setups) {
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
      t.add_row({std::string(to_string(s.setup)), std::to_string(s.seeds[i]),
                 format_double(s.best_distance[i])});
    }
  }
  t.add_row({"baseline", "", format_double(r.baseline_distance)});
  return t;
}

inline CsvTable stddev_table(const AggregateReport& r) {
  CsvTable t;
  t.header = {"setup", "reward_std", "distance_std", "n_runs"};
  for (const auto& s : r.setups) {
    t.add_row({std::string(to_string(s.setup)), format_double(s.reward_std),
               format_double(s.distance_std), std::to_string(s.seeds.size())});
  }
  return t;
}

inline CsvTable baseline_table(const AggregateReport& r) {
  CsvTable t;
  t.header = {"setup", "baseline_return", "normalizer", "baseline_distance"};
  for (const auto& s : r.setups) {
    t.add_row({std::string(to_string(s.setup)), format_double(s.baseline_return),
               format_double(s.normalizer), format_double(r.baseline_distance)});
  }
  return t;
}

inline constexpr const char* kPlotLearningCurves = R"(#!/usr/bin/env python3
"""Plots mean normalized learning curves from learning_curves.csv."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = {}
with open(os.path.join(here, "learning_curves.csv")) as f:
    for row in csv.DictReader(f):
        curves.setdefault(row["setup"], ([], []))
        curves[row["setup"]][0].append(int(row["step"]))
        curves[row["setup"]][1].append(float(row["mean_normalized_return"]))

fig, ax = plt.subplots(figsize=(6, 4))
for setup, (steps, values) in curves.items():
    ax.plot(steps, values, label=setup)
ax.axhline(1.0, color="k", linestyle="--", linewidth=0.8, label="virtual gravity")
ax.set_xlabel("environment steps")
ax.set_ylabel("normalized return")
ax.legend()
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "learning_curves.png")
fig.savefig(out, dpi=150)
print(out)
)";

inline constexpr const char* kPlotDistances = R"(#!/usr/bin/env python3
"""Plots best walking distance per seed and setup from distances.csv."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
per_setup = {}
baseline = None
with open(os.path.join(here, "distances.csv")) as f:
    for row in csv.DictReader(f):
        if row["setup"] == "baseline":
            baseline = float(row["best_distance"])
        else:
            per_setup.setdefault(row["setup"], []).append(float(row["best_distance"]))

fig, ax = plt.subplots(figsize=(6, 4))
names = list(per_setup)
ax.boxplot([per_setup[n] for n in names], labels=names)
for i, n in enumerate(names, start=1):
    ax.scatter([i] * len(per_setup[n]), per_setup[n], s=10, color="tab:blue")
if baseline is not None:
    ax.axhline(baseline, color="k", linestyle="--", linewidth=0.8, label="virtual gravity")
    ax.legend()
ax.set_ylabel("best walking distance at t = 10 s [m]")
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "distances.png")
fig.savefig(out, dpi=150)
print(out)
)";

inline void write_report(const ExperimentSpec& spec, const AggregateReport& r) {
  write_file_atomic(spec.out_dir / "learning_curves.csv", learning_curves_table(r).serialize());
  write_file_atomic(spec.out_dir / "distances.csv", distances_table(r).serialize());
  write_file_atomic(spec.out_dir / "stddev.csv", stddev_table(r).serialize());
  write_file_atomic(spec.out_dir / "baseline.csv", baseline_table(r).serialize());
  write_file_atomic(spec.out_dir / "plot_learning_curves.py", kPlotLearningCurves);
  write_file_atomic(spec.out_dir / "plot_distances.py", kPlotDistances);
}

// Trains every (setup, seed) pair that has no complete artifacts yet, then
// aggregates all completed runs. Failed runs leave error.txt in their
// directory and are excluded from the aggregate.
inline AggregateReport run_experiment(const ExperimentSpec& spec, std::ostream& out) {
  spec.validate();
  spec.env.validate();

  struct Job {
    RewardSetup setup;
    std::uint64_t seed;
  };
  std::vector<Job> pending;
  for (RewardSetup setup : spec.setups) {
    for (std::uint64_t seed : spec.seeds) {
      if (!run_complete(run_dir(spec.out_dir, setup, seed))) pending.push_back({setup, seed});
    }
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::vector<std::string> failed;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      const Job job = pending[i];
      const fs::path dir = run_dir(spec.out_dir, job.setup, job.seed);
      const std::string label =
          std::string(to_string(job.setup)) + "/seed_" + std::to_string(job.seed);
      TrainOptions opt;
      opt.env = spec.env;
      opt.env.reward_setup = job.setup;
      opt.train = spec.train;
      opt.train.seed = job.seed;
      opt.train.total_steps = spec.steps_per_run;
      opt.out_dir = dir;
      opt.quiet = true;
      try {
        fs::remove(dir / kErrorFile);
        std::ostringstream sink;
        const rl::TrainResult res = run_train(opt, sink);
        std::lock_guard lock(mu);
        if (!spec.quiet) {
          out << "finished " << label << " best distance " << format_double(best_distance(res.log.evals))
              << '\n';
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        failed.push_back(label + ": " + e.what());
        try {
          write_file_atomic(dir / kErrorFile, std::string(e.what()) + "\n");
        } catch (const std::exception&) {
          // The run directory itself may be unusable; the failure is still reported.
        }
        out << "FAILED " << label << ": " << e.what() << '\n';
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    const int n = std::min<int>(spec.jobs, static_cast<int>(std::max<std::size_t>(pending.size(), 1)));
    for (int k = 0; k < n; ++k) threads.emplace_back(worker);
  }

  AggregateReport report = aggregate(spec);
  report.runs_trained = static_cast<int>(pending.size() - failed.size());
  std::sort(failed.begin(), failed.end());
  report.failed_runs = failed;
  write_report(spec, report);
  if (!failed.empty()) {
    out << "warning: " << failed.size() << " run(s) failed; aggregate covers completed runs only\n";
  }
  return report;
}

inline void print_report(const AggregateReport& r, std::ostream& out) {
  out << "baseline distance: " << format_double(r.baseline_distance) << " m\n";
  for (const auto& s : r.setups) {
    const double best =
        s.best_distance.empty() ? std::nan("")
                                : *std::max_element(s.best_distance.begin(), s.best_distance.end());
    out << to_string(s.setup) << ": runs " << s.seeds.size() << ", max best distance "
        << format_double(best) << ", median best distance " << format_double(median(s.best_distance))
        << ", reward std " << format_double(s.reward_std) << ", distance std "
        << format_double(s.distance_std) << '\n';
  }
}

}  // namespace orthant_gait::harness

#endif  // ORTHANT_GAIT_HARNESS_HPP_
