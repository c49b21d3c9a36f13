// Copyright 2026 The Gait Lab Authors
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

// gaitlab: train, evaluate, replay and export phase-oscillator locomotion
// policies.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitlab/checkpoint.hpp"
#include "gaitlab/config.hpp"
#include "gaitlab/lab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gaitlab;

struct Options {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  bool no_aug = false;
  bool no_cov = false;
  std::string out = "run";
  std::string checkpoint;
  std::string script;
  std::optional<std::string> gaits;
  std::optional<double> seconds;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "run configuration file, or 'default'");
  cmd->add_option("--seed", o.seed, "override the configured seed");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_aug) cfg.disable_augmentation = true;
  if (o.no_cov) cfg.disable_coverage_reward = true;
  cfg.validate();
  return cfg;
}

ActorCritic require_model(const Options& o) {
  if (o.checkpoint.empty()) throw CheckpointError("--checkpoint is required");
  return load_checkpoint(o.checkpoint).model;
}

int run_train(const Options& o) {
  const RunConfig cfg = resolve(o);
  std::optional<fs::path> resume;
  if (!o.checkpoint.empty()) resume = o.checkpoint;
  const TrainResult r = train(cfg, o.out, resume, o.quiet ? nullptr : &std::cerr);
  std::cout << r.checkpoint.string() << "\n";
  return 0;
}

int run_evaluate(const Options& o) {
  RunConfig cfg = resolve(o);
  const ActorCritic model = require_model(o);
  fs::create_directories(o.out);
  write_resolved_config(o.out, cfg);
  std::ofstream steps(fs::path(o.out) / "eval_steps.csv");
  const EvalReport report = evaluate(model, cfg, &steps);
  write_eval_report(fs::path(o.out) / "eval_report.csv", report);
  for (const auto& c : report.categories) {
    std::cout << name(c.category) << "  mu " << c.mu << "  var " << c.var << "\n";
  }
  return 0;
}

int run_replay(const Options& o) {
  RunConfig cfg = resolve(o);
  std::string run = "replay";
  if (!o.script.empty()) {
    cfg.replay_script = load_script(o.script);
    run = fs::path(o.script).stem().string();
  }
  const ActorCritic model = require_model(o);
  fs::create_directories(o.out);
  write_resolved_config(o.out, cfg);
  const auto steps = replay(model, cfg, cfg.replay_script);
  write_phase_log(fs::path(o.out) / ("phases_" + run + ".csv"), steps);
  write_trajectory(fs::path(o.out) / ("replay_" + run + ".csv"), steps);
  std::cout << steps.size() - 1 << " steps, max phase jump " << max_phase_jump(steps) << "\n";
  return 0;
}

int run_export(const Options& o) {
  RunConfig cfg = resolve(o);
  if (o.gaits) {
    std::istringstream in("export_gaits = " + *o.gaits);
    cfg = parse_config(in, cfg);
  }
  if (o.seconds) cfg.export_seconds = *o.seconds;
  cfg.validate();
  const ActorCritic model = require_model(o);
  fs::create_directories(o.out);
  write_resolved_config(o.out, cfg);
  const auto files = export_trajectories(model, cfg, cfg.export_gaits, cfg.export_seconds, o.out);
  for (const auto& f : files) std::cout << f.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-oscillator gait learning lab"};
  app.require_subcommand(1);
  Options o;

  auto* train_cmd = app.add_subcommand("train", "train a policy");
  add_common(train_cmd, o);
  train_cmd->add_flag("--no-aug", o.no_aug, "identity-only augmentation");
  train_cmd->add_flag("--no-cov", o.no_cov, "zero the coverage reward weight");
  train_cmd->add_option("--checkpoint", o.checkpoint, "resume from this checkpoint");
  train_cmd->add_flag("--quiet", o.quiet, "suppress per-update progress");

  auto* eval_cmd = app.add_subcommand("evaluate", "cumulative reward over all gaits");
  add_common(eval_cmd, o);
  eval_cmd->add_option("--checkpoint", o.checkpoint, "policy checkpoint")->required();

  auto* replay_cmd = app.add_subcommand("replay", "run a command script without resets");
  add_common(replay_cmd, o);
  replay_cmd->add_option("--checkpoint", o.checkpoint, "policy checkpoint")->required();
  replay_cmd->add_option("--script", o.script, "file of gait:seconds segments");

  auto* export_cmd = app.add_subcommand("export", "per-gait trajectories from the origin");
  add_common(export_cmd, o);
  export_cmd->add_option("--checkpoint", o.checkpoint, "policy checkpoint")->required();
  export_cmd->add_option("--gaits", o.gaits, "comma-separated gait numbers (may be empty)");
  export_cmd->add_option("--seconds", o.seconds, "rollout duration per gait");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gaitlab: error: " << e.what() << "\n";
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    if (*train_cmd) return run_train(o);
    if (*eval_cmd) return run_evaluate(o);
    if (*replay_cmd) return run_replay(o);
    if (*export_cmd) return run_export(o);
  } catch (const std::exception& e) {
    std::cerr << "gaitlab: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
