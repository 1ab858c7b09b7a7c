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

// Command-line front end: simulate | train | evaluate | experiment.
//
// All flags live on the top-level command so that a flat key=value config
// file (--config) can set any of them; flags given on the command line take
// precedence over the file.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orthant_gait/orthant_gait.hpp"

namespace {

namespace fs = std::filesystem;
namespace og = orthant_gait;

struct Flags {
  std::string setup = "sparse";
  std::uint64_t seed = 0;
  std::int64_t steps = 500'000;
  double phi = og::kDefaultSlope;
  double dt = 0.01;
  int substeps = 4;
  std::string out;
  int jobs = 1;
  bool strict_orthant = false;
  bool shared_baseline = false;
  std::string controller = "vg";
  double max_time = 10.0;
  std::string trace;
  std::string checkpoint;
  int episodes = 1;
  std::vector<std::string> setups;
  std::vector<std::uint64_t> seeds;
  int num_seeds = 15;
};

og::RewardSetup parse_setup_or_throw(const std::string& name) {
  const auto s = og::parse_reward_setup(name);
  if (!s) throw CLI::ValidationError("--setup", "unknown setup '" + name + "'");
  return *s;
}

og::EnvConfig env_from(const Flags& f) {
  og::EnvConfig env;
  env.dt_control = f.dt;
  env.substeps = f.substeps;
  env.strict_orthant_reward = f.strict_orthant;
  env.reward_setup = parse_setup_or_throw(f.setup);
  env.validate();
  return env;
}

fs::path out_root(const Flags& f, const std::string& fallback) {
  return f.out.empty() ? fs::path(fallback) : fs::path(f.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compass-gait walker with orthant-cycle rewards and PPO training"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file with flag values");

  Flags f;
  app.add_option("--setup", f.setup, "Reward setup: sparse | for | or | for_plus_or")
      ->check(CLI::IsMember({"sparse", "for", "or", "for_plus_or"}));
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--steps", f.steps, "Environment steps per training run");
  app.add_option("--phi", f.phi, "Virtual slope angle for the baseline controller [rad]");
  app.add_option("--dt", f.dt, "Control period [s]");
  app.add_option("--substeps", f.substeps, "RK4 substeps per control period");
  app.add_option("--out", f.out, "Output path (file for simulate, directory otherwise)")
      ->envname("ORTHANT_GAIT_OUT");
  app.add_option("--jobs", f.jobs, "Parallel training runs for experiment");
  app.add_flag("--strict-orthant", f.strict_orthant,
               "Orthant reward punishes staying in a location");
  app.add_flag("--shared-baseline", f.shared_baseline,
               "Normalize all setups by the baseline's sparse return");
  app.add_option("--controller", f.controller, "simulate: vg | zero")
      ->check(CLI::IsMember({"vg", "zero"}));
  app.add_option("--max-time", f.max_time, "simulate: maximum simulated time [s]");
  app.add_option("--trace", f.trace, "evaluate: write a trace CSV here");
  app.add_option("--checkpoint", f.checkpoint, "evaluate: checkpoint file");
  app.add_option("--episodes", f.episodes, "evaluate: number of episodes");
  app.add_option("--setups", f.setups, "experiment: setups to run (default: all four)")
      ->delimiter(',');
  app.add_option("--seeds", f.seeds, "experiment: explicit seed list")->delimiter(',');
  app.add_option("--num-seeds", f.num_seeds, "experiment: use seeds 0..N-1");

  auto* simulate = app.add_subcommand("simulate", "Roll out the baseline or zero controller");
  auto* train = app.add_subcommand("train", "Run one PPO training run");
  auto* evaluate = app.add_subcommand("evaluate", "Deterministically evaluate a checkpoint");
  auto* experiment = app.add_subcommand("experiment", "Run the multi-seed sweep and aggregate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      og::harness::SimulateOptions opt;
      opt.env = env_from(f);
      opt.controller = f.controller;
      opt.phi = f.phi;
      opt.max_time = f.max_time;
      opt.trace_out = out_root(f, "trace.csv");
      og::harness::run_simulate(opt, std::cout);
    } else if (train->parsed()) {
      og::harness::TrainOptions opt;
      opt.env = env_from(f);
      opt.train.seed = f.seed;
      opt.train.total_steps = f.steps;
      opt.out_dir = out_root(f, "train_" + f.setup + "_seed" + std::to_string(f.seed));
      const auto result = og::harness::run_train(opt, std::cout);
      std::cout << "updates: " << result.log.update_count() << '\n'
                << "best distance: "
                << og::format_double(og::harness::best_distance(result.log.evals)) << " m\n"
                << "artifacts: " << opt.out_dir.string() << '\n';
    } else if (evaluate->parsed()) {
      if (f.checkpoint.empty()) throw CLI::RequiredError("--checkpoint");
      og::harness::EvaluateOptions opt;
      opt.checkpoint = f.checkpoint;
      opt.episodes = f.episodes;
      if (!f.trace.empty()) opt.trace_out = fs::path(f.trace);
      og::harness::run_evaluate(opt, std::cout);
    } else if (experiment->parsed()) {
      og::harness::ExperimentSpec spec;
      spec.env = env_from(f);
      if (!f.setups.empty()) {
        spec.setups.clear();
        for (const auto& s : f.setups) spec.setups.push_back(parse_setup_or_throw(s));
      }
      spec.seeds.clear();
      if (!f.seeds.empty()) {
        spec.seeds = f.seeds;
      } else {
        for (int k = 0; k < f.num_seeds; ++k) spec.seeds.push_back(static_cast<std::uint64_t>(k));
      }
      spec.steps_per_run = f.steps;
      spec.out_dir = out_root(f, "experiment");
      spec.jobs = f.jobs;
      spec.shared_baseline = f.shared_baseline;
      const auto report = og::harness::run_experiment(spec, std::cout);
      std::cout << "runs trained: " << report.runs_trained << '\n';
      og::harness::print_report(report, std::cout);
      return report.failed_runs.empty() ? EXIT_SUCCESS : 3;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
