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

#ifndef GAITLAB_POLICY_HPP_
#define GAITLAB_POLICY_HPP_

// Diagonal Gaussian policy with tanh-bounded mean and a separate value
// network of the same architecture.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/errors.hpp"
#include "gaitlab/mlp.hpp"
#include "gaitlab/symmetry.hpp"

namespace gaitlab {

inline const double kLogTwoPi = std::log(2.0 * std::numbers::pi);

struct PolicyOutput {
  Eigen::MatrixXd mean;  // act_dim x batch
  Eigen::VectorXd std;   // act_dim, shared by all samples
};

struct ActorCritic {
  Mlp policy;
  Mlp value;
  Eigen::VectorXd log_std;
  double action_scale = 1.0;  // mean = action_scale * tanh(head)

  ActorCritic() = default;
  ActorCritic(Eigen::Index obs_dim, const std::vector<Eigen::Index>& hidden, Eigen::Index act_dim,
              double scale)
      : policy(obs_dim, hidden, act_dim),
        value(obs_dim, hidden, 1),
        log_std(Eigen::VectorXd::Zero(act_dim)),
        action_scale(scale) {}

  Eigen::Index obs_dim() const { return policy.input_dim(); }
  Eigen::Index act_dim() const { return policy.output_dim(); }

  ActorCritic zeros_like() const {
    ActorCritic z = *this;
    z.policy = policy.zeros_like();
    z.value = value.zeros_like();
    z.log_std.setZero();
    return z;
  }

  std::size_t num_params() const {
    return policy.num_params() + static_cast<std::size_t>(log_std.size()) + value.num_params();
  }

  // Policy layers, log-std, value layers.
  Eigen::VectorXd flatten() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(num_params()));
    double* p = policy.write_params(out.data());
    p = std::copy(log_std.data(), log_std.data() + log_std.size(), p);
    value.write_params(p);
    return out;
  }

  void unflatten(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != num_params()) {
      throw LayoutError("ActorCritic::unflatten: parameter count mismatch");
    }
    const double* p = policy.read_params(flat.data());
    std::copy(p, p + log_std.size(), log_std.data());
    value.read_params(p + log_std.size());
  }
};

// Hidden layers orthogonal with gain sqrt(2), heads orthogonal with gain
// 0.01, all biases zero, initial std = 0.5 * action_scale.
template <typename Rng>
ActorCritic init_policy(Rng& rng, Eigen::Index obs_dim, const std::vector<Eigen::Index>& hidden,
                        Eigen::Index act_dim, double action_scale) {
  ActorCritic ac(obs_dim, hidden, act_dim, action_scale);
  for (Mlp* net : {&ac.policy, &ac.value}) {
    for (std::size_t i = 0; i < net->layers.size(); ++i) {
      auto& l = net->layers[i];
      const double gain = i + 1 == net->layers.size() ? 0.01 : std::sqrt(2.0);
      l.weight = orthogonal_matrix(l.weight.rows(), l.weight.cols(), gain, rng);
      l.bias.setZero();
    }
  }
  ac.log_std.setConstant(std::log(0.5 * action_scale));
  return ac;
}

inline PolicyOutput policy_forward(const ActorCritic& ac, const Eigen::MatrixXd& obs) {
  if (!obs.allFinite()) throw NumericalError("policy_forward: non-finite observation");
  PolicyOutput out;
  out.mean = ac.action_scale * ac.policy.forward(obs).array().tanh().matrix();
  out.std = ac.log_std.array().exp().matrix();
  return out;
}

inline Eigen::VectorXd value_forward(const ActorCritic& ac, const Eigen::MatrixXd& obs) {
  return ac.value.forward(obs).row(0).transpose();
}

inline double log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& std,
                       const Eigen::VectorXd& action) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) / std[i];
    lp += -0.5 * z * z - std::log(std[i]) - 0.5 * kLogTwoPi;
  }
  return lp;
}

// Column-wise log-probabilities.
inline Eigen::VectorXd log_prob(const Eigen::MatrixXd& mean, const Eigen::VectorXd& log_std,
                                const Eigen::MatrixXd& actions) {
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  const Eigen::ArrayXXd z = (actions - mean).array().colwise() * inv_std;
  const double norm = -log_std.sum() - 0.5 * kLogTwoPi * static_cast<double>(mean.rows());
  return ((-0.5 * z.square().colwise().sum()).transpose() + norm).matrix();
}

inline double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * (1.0 + kLogTwoPi);
}

inline Eigen::MatrixXd observations_to_matrix(std::span<const Observation> obs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(kObsDim), static_cast<Eigen::Index>(obs.size()));
  for (std::size_t j = 0; j < obs.size(); ++j)
    for (std::size_t i = 0; i < kObsDim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = obs[j][i];
  return m;
}

// Log-probabilities of the stored (observation, action) pairs under `ac`,
// evaluated in fixed-size chunks.
inline std::vector<double> batch_log_probs(const ActorCritic& ac, std::span<const Transition> batch,
                                           std::size_t chunk = 4096) {
  std::vector<double> out(batch.size());
  for (std::size_t start = 0; start < batch.size(); start += chunk) {
    const std::size_t n = std::min(chunk, batch.size() - start);
    Eigen::MatrixXd obs(static_cast<Eigen::Index>(kObsDim), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd act(static_cast<Eigen::Index>(kActDim), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const Transition& t = batch[start + j];
      for (std::size_t i = 0; i < kObsDim; ++i) obs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.observation[i];
      for (std::size_t i = 0; i < kActDim; ++i) act(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.action[i];
    }
    const PolicyOutput po = policy_forward(ac, obs);
    const Eigen::VectorXd lp = log_prob(po.mean, ac.log_std, act);
    for (std::size_t j = 0; j < n; ++j) out[start + j] = lp[static_cast<Eigen::Index>(j)];
  }
  return out;
}

// Mean over states of ||rho_A(g) mu(s) - mu(rho_S(g) s)||.
inline double equivariance_defect(const ActorCritic& ac, std::span<const Observation> states,
                                  GroupElement g) {
  if (states.empty()) return 0.0;
  std::vector<Observation> mirrored(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) mirrored[i] = apply_obs(g, states[i]);
  const Eigen::MatrixXd mu = policy_forward(ac, observations_to_matrix(states)).mean;
  const Eigen::MatrixXd mu_g = policy_forward(ac, observations_to_matrix(mirrored)).mean;
  const auto& rep = act_representation()[static_cast<std::size_t>(g)];
  double total = 0.0;
  for (Eigen::Index j = 0; j < mu.cols(); ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < kActDim; ++i) {
      const double transformed = rep.sign[i] * mu(rep.source[i], j);
      const double d = transformed - mu_g(static_cast<Eigen::Index>(i), j);
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(mu.cols());
}

}  // namespace gaitlab

#endif  // GAITLAB_POLICY_HPP_
