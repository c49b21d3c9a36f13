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

#ifndef GAITLAB_LAB_HPP_
#define GAITLAB_LAB_HPP_

// Training loop, evaluation protocol, gait-transition replay and trajectory
// export, shared by the command-line tool and the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitlab/checkpoint.hpp"
#include "gaitlab/commands.hpp"
#include "gaitlab/config.hpp"
#include "gaitlab/environment.hpp"
#include "gaitlab/policy.hpp"
#include "gaitlab/ppo.hpp"
#include "gaitlab/symmetry.hpp"

namespace gaitlab {

namespace fs = std::filesystem;

// splitmix64 over (seed, stream, index): independent seeds for every worker
// and protocol without sharing generator state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

enum SeedStream : std::uint64_t {
  kInitStream = 1,
  kWorkerStream = 2,
  kUpdateStream = 3,
  kEvalStream = 4,
  kReplayStream = 5,
  kExportStream = 6,
  kProbeStream = 7,
};

inline std::string csv_number(double v) { return config_detail::format_double(v); }

// Step times are multiples of the control interval; ten digits avoid
// binary noise in the output.
inline std::string csv_time(double t) {
  std::ostringstream os;
  os << std::setprecision(10) << t;
  return os.str();
}

inline ActorCritic make_initial_model(const RunConfig& cfg) {
  std::mt19937_64 rng(derive_seed(cfg.seed, kInitStream));
  return init_policy(rng, static_cast<Eigen::Index>(kObsDim), cfg.hidden,
                     static_cast<Eigen::Index>(kActDim), cfg.env.trajectory.max_phase_speed);
}

inline Action mean_action(const ActorCritic& ac, const Observation& o) {
  const Eigen::MatrixXd m = policy_forward(ac, observations_to_matrix(std::span<const Observation>(&o, 1))).mean;
  Action a{};
  for (std::size_t i = 0; i < kActDim; ++i) a[i] = m(static_cast<Eigen::Index>(i), 0);
  return a;
}

// ---------------------------------------------------------------------------
// Training

struct UpdateRecord {
  std::size_t update = 0;
  std::size_t env_steps = 0;        // cumulative, before augmentation
  std::size_t episodes = 0;         // cumulative completed episodes
  std::size_t batch_episodes = 0;   // episodes completed in this batch
  std::size_t samples = 0;          // samples consumed by the update
  double mean_return = 0.0;
  std::array<double, kNumRewardTerms> term_means{};  // per-episode sums, averaged
  double mean_displacement_x = 0.0;
  double entropy = 0.0;
  std::array<double, 3> defect{};   // g1, g2, g12
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double clamp_fraction = 0.0;
};

inline nlohmann::json to_json(const UpdateRecord& r) {
  nlohmann::json j;
  j["update"] = r.update;
  j["env_steps"] = r.env_steps;
  j["episodes"] = r.episodes;
  j["batch_episodes"] = r.batch_episodes;
  j["samples"] = r.samples;
  j["mean_return"] = r.mean_return;
  for (std::size_t i = 0; i < kNumRewardTerms; ++i) j[kRewardTermNames[i]] = r.term_means[i];
  j["mean_displacement_x"] = r.mean_displacement_x;
  j["entropy"] = r.entropy;
  j["defect_g1"] = r.defect[0];
  j["defect_g2"] = r.defect[1];
  j["defect_g12"] = r.defect[2];
  j["loss"] = r.loss;
  j["policy_loss"] = r.policy_loss;
  j["value_loss"] = r.value_loss;
  j["clip_fraction"] = r.clip_fraction;
  j["approx_kl"] = r.approx_kl;
  j["clamp_fraction"] = r.clamp_fraction;
  return j;
}

struct TrainResult {
  ActorCritic model;
  std::vector<UpdateRecord> history;
  fs::path checkpoint;
};

inline std::vector<GroupElement> training_group(const RunConfig& cfg) {
  if (cfg.disable_augmentation) return {GroupElement::e};
  return {kGroupElements.begin(), kGroupElements.end()};
}

inline void write_resolved_config(const fs::path& dir, const RunConfig& cfg) {
  std::ofstream out(dir / "config.cfg");
  if (!out) throw ConfigError("cannot write " + (dir / "config.cfg").string());
  write_config(out, cfg);
}

// Runs PPO until `cfg.episodes` episodes have been collected. `resume` loads
// parameters, optimizer state and the update counter from a checkpoint.
inline TrainResult train(const RunConfig& cfg, const fs::path& out_dir,
                         const std::optional<fs::path>& resume = std::nullopt,
                         std::ostream* log = nullptr) {
  cfg.validate();
  fs::create_directories(out_dir);
  write_resolved_config(out_dir, cfg);

  TrainResult result;
  Adam opt;
  std::size_t first_update = 0;
  if (resume) {
    Checkpoint ck = load_checkpoint(*resume);
    if (ck.model.obs_dim() != static_cast<Eigen::Index>(kObsDim) ||
        ck.model.act_dim() != static_cast<Eigen::Index>(kActDim) ||
        ck.model.policy.hidden_sizes() != cfg.hidden) {
      throw CheckpointError("checkpoint architecture does not match the configuration");
    }
    result.model = std::move(ck.model);
    if (ck.optimizer) opt = *ck.optimizer;
    first_update = ck.update;
  } else {
    result.model = make_initial_model(cfg);
  }
  ActorCritic& ac = result.model;
  opt.learning_rate = cfg.ppo.learning_rate;

  EnvConfig env_cfg = cfg.env;
  env_cfg.reward = cfg.effective_reward();
  std::vector<EnvWorker> workers;
  workers.reserve(cfg.num_envs);
  for (std::size_t k = 0; k < cfg.num_envs; ++k) {
    CommandSampler sampler = cfg.train_gaits.empty() ? CommandSampler{} : CommandSampler{cfg.train_gaits};
    workers.emplace_back(env_cfg, std::move(sampler),
                         derive_seed(cfg.seed, kWorkerStream, (first_update << 20) + k));
  }

  const std::vector<GroupElement> group = training_group(cfg);
  const std::size_t updates = cfg.num_updates();
  std::ofstream metrics(out_dir / "metrics.jsonl", resume ? std::ios::app : std::ios::trunc);
  if (!metrics) throw ConfigError("cannot write " + (out_dir / "metrics.jsonl").string());
  std::size_t episodes = 0;
  std::size_t env_steps = first_update * cfg.batch_size;

  auto save = [&](const fs::path& p, std::size_t completed) {
    save_checkpoint(p, Checkpoint{ac, opt, completed});
  };

  for (std::size_t u = first_update; u < updates; ++u) {
    RolloutBatch batch = collect_rollouts(workers, ac, cfg.steps_per_env());
    compute_gae(batch, cfg.ppo.gamma, cfg.ppo.gae_lambda);
    env_steps += batch.transitions.size();

    UpdateRecord rec;
    rec.update = u;
    rec.env_steps = env_steps;
    rec.batch_episodes = batch.episodes.size();
    episodes += batch.episodes.size();
    rec.episodes = episodes;
    if (!batch.episodes.empty()) {
      const double inv = 1.0 / static_cast<double>(batch.episodes.size());
      for (const auto& e : batch.episodes) {
        rec.mean_return += e.episode_return * inv;
        rec.mean_displacement_x += e.displacement_x * inv;
        for (std::size_t i = 0; i < kNumRewardTerms; ++i) rec.term_means[i] += e.term_sums[i] * inv;
      }
    }
    rec.clamp_fraction = static_cast<double>(batch.clamped_actions) /
                         static_cast<double>(batch.transitions.size() * kActDim);
    {
      std::vector<Observation> probe;
      const std::size_t n = std::min(cfg.defect_states, batch.transitions.size());
      for (std::size_t i = 0; i < n; ++i)
        probe.push_back(batch.transitions[i * batch.transitions.size() / n].observation);
      for (std::size_t k = 0; k < kNonIdentityElements.size(); ++k)
        rec.defect[k] = equivariance_defect(ac, probe, kNonIdentityElements[k]);
    }

    const auto old_policy = [&](std::span<const Transition> t) { return batch_log_probs(ac, t); };
    std::vector<Transition> augmented =
        augment_transitions(std::span<const Transition>(batch.transitions), old_policy, group);
    normalize_advantages(augmented);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, kUpdateStream, u));
    const UpdateStats st = ppo_update(ac, opt, std::span<const Transition>(augmented), cfg.ppo, shuffle_rng);
    rec.samples = st.samples;
    rec.loss = st.mean_loss.total;
    rec.policy_loss = st.mean_loss.policy;
    rec.value_loss = st.mean_loss.value;
    rec.entropy = gaussian_entropy(ac.log_std);
    rec.clip_fraction = st.mean_loss.clip_fraction;
    rec.approx_kl = st.mean_loss.approx_kl;

    metrics << to_json(rec).dump() << "\n" << std::flush;
    result.history.push_back(rec);
    if (log) {
      *log << "update " << (u + 1) << "/" << updates << "  return " << rec.mean_return << "  r_toward "
           << rec.term_means[0] << "  dx " << rec.mean_displacement_x << "  entropy " << rec.entropy
           << "\n";
    }
    if (cfg.checkpoint_every > 0 && (u + 1) % cfg.checkpoint_every == 0 && u + 1 < updates) {
      save(out_dir / ("checkpoint_" + std::to_string(u + 1) + ".json"), u + 1);
    }
  }
  result.checkpoint = out_dir / "checkpoint.json";
  save(result.checkpoint, std::max(updates, first_update));
  return result;
}

// ---------------------------------------------------------------------------
// Deterministic rollouts

struct RolloutStep {
  double t = 0.0;
  int gait = 0;
  PhaseState phases;
  BodyPose pose;
  RewardTerms reward;  // zero on the initial row
};

template <typename Rng>
PhaseState random_phases(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  PhaseState p;
  for (double& v : p.phi) v = wrap_phase(u(rng));
  return p;
}

inline std::size_t segment_steps(const ReplaySegment& s, const TrajectoryConfig& tc) {
  return static_cast<std::size_t>(std::llround(s.seconds / tc.control_interval));
}

// Executes the segments back to back with the mean action and no reset
// between them. The first row is the initial state at t = 0.
inline std::vector<RolloutStep> run_script(const ActorCritic& ac, const EnvConfig& base,
                                           std::span<const ReplaySegment> script,
                                           const PhaseState& initial) {
  for (const auto& s : script) command_entry(s.gait);
  std::size_t total = 0;
  for (const auto& s : script) total += segment_steps(s, base.trajectory);
  EnvConfig cfg = base;
  cfg.episode_length = std::max<std::size_t>(total, 1);
  Environment env(cfg);
  std::vector<RolloutStep> out;
  out.reserve(total + 1);
  if (script.empty()) return out;
  Observation obs = env.reset_to(initial, command_lookup(script.front().gait), script.front().gait);
  out.push_back({0.0, env.gait(), env.phases(), env.body_pose(), RewardTerms{}});
  for (const auto& seg : script) {
    env.set_command(command_lookup(seg.gait), seg.gait);
    obs = env.observation();
    for (std::size_t k = 0; k < segment_steps(seg, cfg.trajectory); ++k) {
      const StepResult r = env.step(mean_action(ac, obs));
      obs = r.observation;
      out.push_back({static_cast<double>(env.step_count()) * cfg.trajectory.control_interval, env.gait(),
                     env.phases(), env.body_pose(), r.reward});
    }
  }
  return out;
}

inline void write_phase_log(const fs::path& path, std::span<const RolloutStep> steps) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "t,phi_lf,phi_lh,phi_rf,phi_rh,phi_s\n";
  for (const auto& s : steps) {
    out << csv_time(s.t);
    for (double p : s.phases.phi) out << "," << csv_number(p);
    out << "\n";
  }
}

// t, x, y, psi first; phases, command and reward terms follow.
inline void write_trajectory(const fs::path& path, std::span<const RolloutStep> steps) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "t,x,y,psi,gait,phi_lf,phi_lh,phi_rf,phi_rh,phi_s";
  for (const char* n : kRewardTermNames) out << "," << n;
  out << ",reward\n";
  for (const auto& s : steps) {
    out << csv_time(s.t) << "," << csv_number(s.pose.x) << "," << csv_number(s.pose.y) << ","
        << csv_number(s.pose.psi) << "," << s.gait;
    for (double p : s.phases.phi) out << "," << csv_number(p);
    for (double r : s.reward.terms) out << "," << csv_number(r);
    out << "," << csv_number(s.reward.total) << "\n";
  }
}

// Largest circular phase jump between consecutive rows, over all parts.
inline double max_phase_jump(std::span<const RolloutStep> steps) {
  double worst = 0.0;
  for (std::size_t i = 1; i < steps.size(); ++i)
    for (std::size_t p = 0; p < kNumParts; ++p)
      worst = std::max(worst, circular_distance(steps[i - 1].phases.phi[p], steps[i].phases.phi[p]));
  return worst;
}

inline std::vector<RolloutStep> replay(const ActorCritic& ac, const RunConfig& cfg,
                                       std::span<const ReplaySegment> script) {
  std::mt19937_64 rng(derive_seed(cfg.seed, kReplayStream));
  return run_script(ac, cfg.env, script, random_phases(rng));
}

// One trajectory file per gait, each starting from the origin. Returns the
// written paths.
inline std::vector<fs::path> export_trajectories(const ActorCritic& ac, const RunConfig& cfg,
                                                 std::span<const int> gaits, double seconds,
                                                 const fs::path& out_dir) {
  for (int g : gaits) command_entry(g);
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (int g : gaits) {
    std::mt19937_64 rng(derive_seed(cfg.seed, kExportStream, static_cast<std::uint64_t>(g)));
    const ReplaySegment seg{g, seconds};
    const auto steps = run_script(ac, cfg.env, std::span<const ReplaySegment>(&seg, 1), random_phases(rng));
    const fs::path p = out_dir / ("traj_" + std::to_string(g) + ".csv");
    write_trajectory(p, steps);
    written.push_back(p);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalRollout {
  int gait = 0;
  int rep = 0;
  double cum_reward = 0.0;
};

struct CategoryStats {
  Category category = Category::Linear;
  std::vector<int> gaits;
  double mu = 0.0;
  double var = 0.0;  // sample variance of the per-gait means
};

struct EvalReport {
  std::vector<EvalRollout> rollouts;
  std::vector<CategoryStats> categories;
};

// Mean and sample variance of per-gait scores within each category.
inline std::vector<CategoryStats> category_stats(const std::map<int, double>& per_gait) {
  std::vector<CategoryStats> out;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    CategoryStats s;
    s.category = static_cast<Category>(c);
    std::vector<double> values;
    for (int g : gaits_in(s.category)) {
      const auto it = per_gait.find(g);
      if (it == per_gait.end()) continue;
      s.gaits.push_back(g);
      values.push_back(it->second);
    }
    if (values.empty()) continue;
    for (double v : values) s.mu += v;
    s.mu /= static_cast<double>(values.size());
    if (values.size() > 1) {
      for (double v : values) s.var += (v - s.mu) * (v - s.mu);
      s.var /= static_cast<double>(values.size() - 1);
    }
    out.push_back(s);
  }
  return out;
}

// 22 gaits x repetitions, each a fresh episode of `eval_steps` steps with the
// mean action and the full (unablated) reward. `step_log`, when given,
// receives gait,rep,step,reward rows.
inline EvalReport evaluate(const ActorCritic& ac, const RunConfig& cfg, std::ostream* step_log = nullptr) {
  EnvConfig env_cfg = cfg.env;
  env_cfg.episode_length = cfg.eval_steps;
  EvalReport report;
  std::map<int, double> per_gait;
  if (step_log) *step_log << "gait,rep,step,reward\n";
  for (const CommandEntry& entry : command_table()) {
    double sum = 0.0;
    for (std::size_t rep = 0; rep < cfg.eval_repetitions; ++rep) {
      std::mt19937_64 rng(derive_seed(cfg.seed, kEvalStream,
                                      static_cast<std::uint64_t>(entry.gait) * 1000 + rep));
      Environment env(env_cfg);
      Observation obs = env.reset_to(random_phases(rng), entry.command(), entry.gait);
      double cum = 0.0;
      while (!env.done()) {
        const StepResult r = env.step(mean_action(ac, obs));
        obs = r.observation;
        cum += r.reward.total;
        if (step_log) {
          *step_log << entry.gait << "," << rep << "," << env.step_count() << "," << csv_number(r.reward.total)
                    << "\n";
        }
      }
      report.rollouts.push_back({entry.gait, static_cast<int>(rep), cum});
      sum += cum;
    }
    per_gait[entry.gait] = sum / static_cast<double>(cfg.eval_repetitions);
  }
  report.categories = category_stats(per_gait);
  return report;
}

inline void write_eval_report(const fs::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "gait,rep,cum_reward\n";
  for (const auto& r : report.rollouts) out << r.gait << "," << r.rep << "," << csv_number(r.cum_reward) << "\n";
  out << "\ncategory,gaits,mu,var\n";
  for (const auto& c : report.categories) {
    out << name(c.category) << ",";
    for (std::size_t i = 0; i < c.gaits.size(); ++i) out << (i ? ";" : "") << c.gaits[i];
    out << "," << csv_number(c.mu) << "," << csv_number(c.var) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Probing

// Observations visited by uniformly random phase velocities from random
// resets over the full command repertoire, sampled every `stride` steps.
inline std::vector<Observation> reachable_states(const EnvConfig& cfg, std::size_t count, std::uint64_t seed,
                                                 std::size_t stride = 30) {
  std::mt19937_64 rng(derive_seed(seed, kProbeStream));
  const double w = cfg.trajectory.max_phase_speed;
  std::uniform_real_distribution<double> act(-w, w);
  CommandSampler sampler;
  Environment env(cfg);
  std::vector<Observation> out;
  out.reserve(count);
  while (out.size() < count) {
    Observation obs = env.reset(sampler, rng);
    while (!env.done() && out.size() < count) {
      if (env.step_count() % stride == 0) out.push_back(obs);
      Action a{};
      for (double& v : a) v = act(rng);
      obs = env.step(a).observation;
    }
  }
  return out;
}

}  // namespace gaitlab

#endif  // GAITLAB_LAB_HPP_
