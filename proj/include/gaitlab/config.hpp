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

#ifndef GAITLAB_CONFIG_HPP_
#define GAITLAB_CONFIG_HPP_

// Flat `key = value` run configuration. Lines starting with '#' are comments.
// Unlisted keys keep their defaults; unknown keys are rejected. The resolved
// configuration written by `write_config` reproduces a run exactly.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gaitlab/environment.hpp"
#include "gaitlab/errors.hpp"
#include "gaitlab/ppo.hpp"

namespace gaitlab {

struct ReplaySegment {
  int gait = 1;
  double seconds = 15.0;

  bool operator==(const ReplaySegment&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 1;
  EnvConfig env;
  PpoConfig ppo;
  std::vector<Eigen::Index> hidden = {1024, 512, 256};
  std::size_t num_envs = 140;
  std::size_t batch_size = 42000;
  std::size_t episodes = 100000;
  std::vector<int> train_gaits;  // empty: full repertoire with category cycling
  bool disable_augmentation = false;
  bool disable_coverage_reward = false;
  std::size_t checkpoint_every = 10;  // updates; 0 writes only the final checkpoint
  std::size_t defect_states = 256;    // states per metrics record for the equivariance defect
  std::size_t eval_steps = 250;
  std::size_t eval_repetitions = 3;
  std::vector<int> export_gaits = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  double export_seconds = 60.0;
  std::vector<ReplaySegment> replay_script = {{1, 15.0}, {4, 15.0}, {2, 15.0},
                                              {3, 15.0}, {5, 15.0}, {6, 15.0}};

  std::size_t steps_per_env() const { return batch_size / num_envs; }

  // One update per collected batch until `episodes` episodes have been run.
  std::size_t num_updates() const {
    const std::size_t total_steps = episodes * env.episode_length;
    return (total_steps + batch_size - 1) / batch_size;
  }

  // Reward configuration seen by the learner after ablations.
  RewardConfig effective_reward() const {
    RewardConfig r = env.reward;
    if (disable_coverage_reward) r.weights[static_cast<std::size_t>(RewardTerm::Coverage)] = 0.0;
    return r;
  }

  void validate() const {
    env.validate();
    if (hidden.empty()) throw ConfigError("hidden must list at least one layer size");
    for (auto h : hidden)
      if (h <= 0) throw ConfigError("hidden layer sizes must be positive");
    if (num_envs == 0) throw ConfigError("num_envs must be positive");
    if (batch_size == 0 || batch_size % num_envs != 0) {
      throw ConfigError("batch_size must be a positive multiple of num_envs");
    }
    if (episodes == 0) throw ConfigError("episodes must be positive");
    if (ppo.epochs == 0 || ppo.minibatches == 0) throw ConfigError("epochs and minibatches must be positive");
    if (!(ppo.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(ppo.clip > 0.0)) throw ConfigError("clip must be positive");
    if (!(ppo.gamma >= 0.0 && ppo.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (!(ppo.gae_lambda >= 0.0 && ppo.gae_lambda <= 1.0)) throw ConfigError("gae_lambda must lie in [0, 1]");
    if (eval_steps == 0 || eval_repetitions == 0) throw ConfigError("eval_steps and eval_repetitions must be positive");
    if (!(export_seconds > 0.0)) throw ConfigError("export_seconds must be positive");
    for (int g : train_gaits) command_entry(g);
    for (int g : export_gaits) command_entry(g);
    for (const auto& s : replay_script) {
      command_entry(s.gait);
      if (!(s.seconds > 0.0)) throw ConfigError("replay segment durations must be positive");
    }
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("config key '" + key + "': value must be finite");
  }
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

struct Field {
  std::string key;
  std::string doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline Field real(std::string key, std::string doc, std::function<double&(RunConfig&)> ref) {
  return {key, std::move(doc),
          [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, const std::string& t) { ref(c) = parse_number<double>(key, t); }};
}

inline Field count(std::string key, std::string doc, std::function<std::size_t&(RunConfig&)> ref) {
  return {key, std::move(doc),
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, const std::string& t) { ref(c) = parse_number<std::size_t>(key, t); }};
}

inline Field flag(std::string key, std::string doc, std::function<bool&(RunConfig&)> ref) {
  return {key, std::move(doc),
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [ref, key](RunConfig& c, const std::string& t) { ref(c) = parse_bool(key, t); }};
}

inline Field gait_list(std::string key, std::string doc, std::function<std::vector<int>&(RunConfig&)> ref) {
  return {key, std::move(doc),
          [ref](const RunConfig& c) { return join(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, const std::string& t) {
            std::vector<int> out;
            for (const auto& item : split(t, ',')) out.push_back(parse_number<int>(key, item));
            ref(c) = std::move(out);
          }};
}

inline std::string format_script(const std::vector<ReplaySegment>& script) {
  std::ostringstream os;
  for (std::size_t i = 0; i < script.size(); ++i)
    os << (i ? "," : "") << script[i].gait << ":" << format_double(script[i].seconds);
  return os.str();
}

// "gait:seconds" items separated by commas or newlines; '#' starts a comment.
inline std::vector<ReplaySegment> parse_script(const std::string& key, const std::string& text) {
  std::vector<ReplaySegment> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = line.substr(0, line.find('#'));
    for (const auto& item : split(line, ',')) {
      if (item.empty()) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError(key + ": expected gait:seconds, got '" + item + "'");
      ReplaySegment s;
      s.gait = parse_number<int>(key, trim(item.substr(0, colon)));
      s.seconds = parse_number<double>(key, trim(item.substr(colon + 1)));
      command_entry(s.gait);
      if (!(s.seconds > 0.0)) throw ConfigError(key + ": segment duration must be positive");
      out.push_back(s);
    }
  }
  return out;
}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"seed", "master random seed",
                 [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& t) { c.seed = parse_number<std::uint64_t>("seed", t); }});
    f.push_back(count("num_envs", "parallel environments per rollout", [](RunConfig& c) -> auto& { return c.num_envs; }));
    f.push_back(count("batch_size", "environment steps per update before augmentation", [](RunConfig& c) -> auto& { return c.batch_size; }));
    f.push_back(count("episodes", "total training episodes", [](RunConfig& c) -> auto& { return c.episodes; }));
    f.push_back(count("episode_length", "control steps per training episode", [](RunConfig& c) -> auto& { return c.env.episode_length; }));
    f.push_back({"hidden", "hidden layer sizes, comma separated",
                 [](const RunConfig& c) { return join(c.hidden); },
                 [](RunConfig& c, const std::string& t) {
                   std::vector<Eigen::Index> h;
                   for (const auto& item : split(t, ',')) h.push_back(parse_number<Eigen::Index>("hidden", item));
                   c.hidden = std::move(h);
                 }});
    f.push_back(count("epochs", "passes over each update batch", [](RunConfig& c) -> auto& { return c.ppo.epochs; }));
    f.push_back(count("minibatches", "minibatches per epoch", [](RunConfig& c) -> auto& { return c.ppo.minibatches; }));
    f.push_back(real("clip", "surrogate clip range", [](RunConfig& c) -> auto& { return c.ppo.clip; }));
    f.push_back(real("entropy_coef", "entropy bonus coefficient", [](RunConfig& c) -> auto& { return c.ppo.entropy_coef; }));
    f.push_back(real("value_coef", "value loss coefficient", [](RunConfig& c) -> auto& { return c.ppo.value_coef; }));
    f.push_back(real("gamma", "discount", [](RunConfig& c) -> auto& { return c.ppo.gamma; }));
    f.push_back(real("gae_lambda", "GAE lambda", [](RunConfig& c) -> auto& { return c.ppo.gae_lambda; }));
    f.push_back(real("learning_rate", "Adam step size", [](RunConfig& c) -> auto& { return c.ppo.learning_rate; }));
    f.push_back(real("amplitude", "joint amplitude A (rad)", [](RunConfig& c) -> auto& { return c.env.trajectory.amplitude; }));
    f.push_back(real("theta_offset", "lift joint offset (rad)", [](RunConfig& c) -> auto& { return c.env.trajectory.offset; }));
    f.push_back(real("control_interval", "control step (s)", [](RunConfig& c) -> auto& { return c.env.trajectory.control_interval; }));
    f.push_back(real("max_phase_speed", "phase velocity bound (rad/s)", [](RunConfig& c) -> auto& { return c.env.trajectory.max_phase_speed; }));
    f.push_back(real("gait_period", "sliding window length (s)", [](RunConfig& c) -> auto& { return c.env.trajectory.gait_period; }));
    f.push_back(real("spine_link_length", "spine link length (m)", [](RunConfig& c) -> auto& { return c.env.geometry.spine_link_length; }));
    f.push_back(real("hip_offset", "girdle to hip lateral offset (m)", [](RunConfig& c) -> auto& { return c.env.geometry.hip_offset; }));
    f.push_back(real("leg_length", "planar leg length (m)", [](RunConfig& c) -> auto& { return c.env.geometry.leg_length; }));
    f.push_back(real("reward_alpha", "toward-reward base gain", [](RunConfig& c) -> auto& { return c.env.reward.alpha; }));
    f.push_back(real("reward_beta", "toward-reward lateral gain", [](RunConfig& c) -> auto& { return c.env.reward.beta; }));
    f.push_back(real("reward_zeta", "perpendicular penalty base gain", [](RunConfig& c) -> auto& { return c.env.reward.zeta; }));
    f.push_back(real("reward_epsilon", "perpendicular penalty forward gain", [](RunConfig& c) -> auto& { return c.env.reward.epsilon; }));
    f.push_back(real("reward_delta", "turn reward gain", [](RunConfig& c) -> auto& { return c.env.reward.delta; }));
    for (std::size_t i = 0; i < kNumRewardTerms; ++i) {
      f.push_back(real(std::string("w_") + (kRewardTermNames[i] + 2), std::string("weight of ") + kRewardTermNames[i],
                       [i](RunConfig& c) -> auto& { return c.env.reward.weights[i]; }));
    }
    f.push_back(gait_list("train_gaits", "restrict training commands to these gaits (empty: all)",
                          [](RunConfig& c) -> auto& { return c.train_gaits; }));
    f.push_back(flag("disable_augmentation", "train on identity copies only", [](RunConfig& c) -> auto& { return c.disable_augmentation; }));
    f.push_back(flag("disable_coverage_reward", "zero the coverage reward weight", [](RunConfig& c) -> auto& { return c.disable_coverage_reward; }));
    f.push_back(count("checkpoint_every", "updates between checkpoints (0: final only)", [](RunConfig& c) -> auto& { return c.checkpoint_every; }));
    f.push_back(count("defect_states", "states used for the logged equivariance defect", [](RunConfig& c) -> auto& { return c.defect_states; }));
    f.push_back(count("eval_steps", "steps per evaluation rollout", [](RunConfig& c) -> auto& { return c.eval_steps; }));
    f.push_back(count("eval_repetitions", "evaluation rollouts per gait", [](RunConfig& c) -> auto& { return c.eval_repetitions; }));
    f.push_back(gait_list("export_gaits", "gaits exported as trajectories", [](RunConfig& c) -> auto& { return c.export_gaits; }));
    f.push_back(real("export_seconds", "duration of each exported trajectory (s)", [](RunConfig& c) -> auto& { return c.export_seconds; }));
    f.push_back({"replay_script", "gait:seconds segments replayed without reset",
                 [](const RunConfig& c) { return format_script(c.replay_script); },
                 [](RunConfig& c, const std::string& t) { c.replay_script = parse_script("replay_script", t); }});
    return f;
  }();
  return table;
}

}  // namespace config_detail

// Applies `key = value` lines on top of `base`.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  const auto& table = config_detail::fields();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = config_detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = config_detail::trim(t.substr(0, eq));
    const std::string value = config_detail::trim(t.substr(eq + 1));
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->set(base, value);
  }
  base.validate();
  return base;
}

// `default` selects the built-in configuration.
inline RunConfig load_config(const std::string& path) {
  if (path.empty() || path == "default") {
    RunConfig c;
    c.validate();
    return c;
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline void write_config(std::ostream& out, const RunConfig& c) {
  for (const auto& f : config_detail::fields()) {
    out << "# " << f.doc << "\n" << f.key << " = " << f.get(c) << "\n";
  }
}

inline std::vector<ReplaySegment> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto script = config_detail::parse_script("script", ss.str());
  if (script.empty()) throw ConfigError("script '" + path + "' has no segments");
  return script;
}

}  // namespace gaitlab

#endif  // GAITLAB_CONFIG_HPP_
