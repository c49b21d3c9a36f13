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

#ifndef GAITLAB_CHECKPOINT_HPP_
#define GAITLAB_CHECKPOINT_HPP_

// JSON checkpoints. Top-level fields:
//   format        "gaitlab-checkpoint"
//   version       integer, currently 1
//   obs_dim, act_dim, hidden, action_scale
//   update        number of completed updates
//   tensors       name -> {"shape": [rows, cols], "data": [...]} in row-major order
//                 names: policy.<i>.weight, policy.<i>.bias, value.<i>.weight,
//                 value.<i>.bias, log_std
//   adam          optional {"t", "m", "v"} over the flattened parameter vector

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gaitlab/errors.hpp"
#include "gaitlab/policy.hpp"
#include "gaitlab/ppo.hpp"

namespace gaitlab {

inline constexpr const char* kCheckpointFormat = "gaitlab-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ActorCritic model;
  std::optional<Adam> optimizer;
  std::size_t update = 0;
};

namespace checkpoint_detail {

using nlohmann::json;

inline json tensor(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

inline Eigen::MatrixXd read_tensor(const json& tensors, const std::string& name, Eigen::Index rows,
                                   Eigen::Index cols) {
  if (!tensors.contains(name)) throw CheckpointError("checkpoint is missing tensor '" + name + "'");
  const json& t = tensors.at(name);
  const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2 || shape[0] != rows || shape[1] != cols) {
    throw CheckpointError("checkpoint tensor '" + name + "' has an unexpected shape");
  }
  const auto data = t.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw CheckpointError("checkpoint tensor '" + name + "' has the wrong element count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  return m;
}

inline void write_net(json& tensors, const std::string& prefix, const Mlp& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const std::string base = prefix + "." + std::to_string(i);
    tensors[base + ".weight"] = tensor(net.layers[i].weight);
    tensors[base + ".bias"] = tensor(net.layers[i].bias);
  }
}

inline void read_net(const json& tensors, const std::string& prefix, Mlp& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const std::string base = prefix + "." + std::to_string(i);
    auto& l = net.layers[i];
    l.weight = read_tensor(tensors, base + ".weight", l.weight.rows(), l.weight.cols());
    l.bias = read_tensor(tensors, base + ".bias", l.bias.size(), 1);
  }
}

}  // namespace checkpoint_detail

inline nlohmann::json checkpoint_to_json(const Checkpoint& ck) {
  using checkpoint_detail::json;
  const ActorCritic& ac = ck.model;
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["obs_dim"] = ac.obs_dim();
  j["act_dim"] = ac.act_dim();
  j["hidden"] = ac.policy.hidden_sizes();
  j["action_scale"] = ac.action_scale;
  j["update"] = ck.update;
  json tensors = json::object();
  checkpoint_detail::write_net(tensors, "policy", ac.policy);
  checkpoint_detail::write_net(tensors, "value", ac.value);
  tensors["log_std"] = checkpoint_detail::tensor(ac.log_std);
  j["tensors"] = std::move(tensors);
  if (ck.optimizer) {
    const Adam& a = *ck.optimizer;
    j["adam"] = {{"t", a.t},
                 {"m", std::vector<double>(a.m.data(), a.m.data() + a.m.size())},
                 {"v", std::vector<double>(a.v.data(), a.v.data() + a.v.size())}};
  }
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string{}) != kCheckpointFormat) {
      throw CheckpointError("not a gaitlab checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                            " (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint ck;
    ck.model = ActorCritic(j.at("obs_dim").get<Eigen::Index>(),
                           j.at("hidden").get<std::vector<Eigen::Index>>(),
                           j.at("act_dim").get<Eigen::Index>(), j.at("action_scale").get<double>());
    const auto& tensors = j.at("tensors");
    checkpoint_detail::read_net(tensors, "policy", ck.model.policy);
    checkpoint_detail::read_net(tensors, "value", ck.model.value);
    ck.model.log_std = checkpoint_detail::read_tensor(tensors, "log_std", ck.model.log_std.size(), 1);
    ck.update = j.at("update").get<std::size_t>();
    if (j.contains("adam")) {
      Adam a;
      a.t = j["adam"].at("t").get<std::int64_t>();
      const auto m = j["adam"].at("m").get<std::vector<double>>();
      const auto v = j["adam"].at("v").get<std::vector<double>>();
      if (m.size() != ck.model.num_params() || v.size() != m.size()) {
        throw CheckpointError("checkpoint optimizer state does not match the model");
      }
      a.m = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
      a.v = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      ck.optimizer = a;
    }
    if (!ck.model.flatten().allFinite()) throw CheckpointError("checkpoint contains non-finite parameters");
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path.string() + "'");
    out << checkpoint_to_json(ck).dump();
    if (!out) throw CheckpointError("failed writing checkpoint '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("malformed checkpoint '" + path.string() + "': " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace gaitlab

#endif  // GAITLAB_CHECKPOINT_HPP_
