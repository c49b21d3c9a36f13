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

#ifndef GAITLAB_PPO_HPP_
#define GAITLAB_PPO_HPP_

// Rollout collection, generalized advantage estimation and clipped-surrogate
// PPO updates with hand-derived gradients.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/environment.hpp"
#include "gaitlab/errors.hpp"
#include "gaitlab/policy.hpp"
#include "gaitlab/symmetry.hpp"

namespace gaitlab {

struct PpoConfig {
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 1.0;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double learning_rate = 1e-3;
  std::size_t epochs = 20;
  std::size_t minibatches = 4;
};

// ---------------------------------------------------------------------------
// Rollouts

struct EpisodeStats {
  double episode_return = 0.0;
  std::array<double, kNumRewardTerms> term_sums{};
  double displacement_x = 0.0;  // world x of the body frame at episode end
  double displacement_y = 0.0;
  int gait = 0;
  std::size_t length = 0;
};

// A contiguous run of one environment's transitions. `bootstrap` is V(s) of
// the state following the last transition when that transition is not
// terminal.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  double bootstrap = 0.0;
};

struct RolloutBatch {
  std::vector<Transition> transitions;
  std::vector<std::uint8_t> done;
  std::vector<Segment> segments;
  std::vector<EpisodeStats> episodes;  // episodes completed during collection
  std::size_t clamped_actions = 0;
};

struct EnvWorker {
  Environment env;
  CommandSampler sampler;
  std::mt19937_64 rng;
  Observation obs{};
  EpisodeStats running;
  bool needs_reset = true;

  EnvWorker(const EnvConfig& cfg, CommandSampler s, std::uint64_t seed)
      : env(cfg), sampler(std::move(s)), rng(seed) {}

  void reset() {
    obs = env.reset(sampler, rng);
    running = EpisodeStats{};
    running.gait = env.gait();
    needs_reset = false;
  }
};

// Steps every worker `steps_per_env` times with actions sampled from the
// Gaussian policy. Stored actions are the raw samples; the environment clamps.
inline RolloutBatch collect_rollouts(std::vector<EnvWorker>& workers, const ActorCritic& ac,
                                     std::size_t steps_per_env) {
  const std::size_t n = workers.size();
  std::vector<std::vector<Transition>> per_env(n);
  std::vector<std::vector<std::uint8_t>> per_env_done(n);
  RolloutBatch batch;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd obs(static_cast<Eigen::Index>(kObsDim), static_cast<Eigen::Index>(n));

  for (std::size_t t = 0; t < steps_per_env; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      if (workers[k].needs_reset) workers[k].reset();
      for (std::size_t i = 0; i < kObsDim; ++i) {
        obs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = workers[k].obs[i];
      }
    }
    const PolicyOutput po = policy_forward(ac, obs);
    const Eigen::VectorXd values = value_forward(ac, obs);
    for (std::size_t k = 0; k < n; ++k) {
      EnvWorker& w = workers[k];
      const auto col = static_cast<Eigen::Index>(k);
      Transition tr;
      tr.observation = w.obs;
      Eigen::VectorXd a(static_cast<Eigen::Index>(kActDim));
      for (std::size_t i = 0; i < kActDim; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        a[ii] = po.mean(ii, col) + po.std[ii] * normal(w.rng);
        tr.action[i] = a[ii];
      }
      tr.old_log_prob = log_prob(Eigen::VectorXd(po.mean.col(col)), po.std, a);
      tr.value = values[col];

      const StepResult r = w.env.step(tr.action);
      tr.reward = r.reward.total;
      if (r.clamped) ++batch.clamped_actions;
      w.running.episode_return += r.reward.total;
      for (std::size_t i = 0; i < kNumRewardTerms; ++i) w.running.term_sums[i] += r.reward.terms[i];
      ++w.running.length;
      w.obs = r.observation;
      per_env[k].push_back(tr);
      per_env_done[k].push_back(r.done ? 1 : 0);
      if (r.done) {
        w.running.displacement_x = w.env.body_pose().x;
        w.running.displacement_y = w.env.body_pose().y;
        batch.episodes.push_back(w.running);
        w.needs_reset = true;
      }
    }
  }

  // Bootstrap values for cut-off segments.
  std::vector<double> bootstrap(n, 0.0);
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < n; ++k) {
    if (!workers[k].needs_reset) open.push_back(k);
  }
  if (!open.empty()) {
    Eigen::MatrixXd tail(static_cast<Eigen::Index>(kObsDim), static_cast<Eigen::Index>(open.size()));
    for (std::size_t j = 0; j < open.size(); ++j)
      for (std::size_t i = 0; i < kObsDim; ++i)
        tail(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = workers[open[j]].obs[i];
    const Eigen::VectorXd v = value_forward(ac, tail);
    for (std::size_t j = 0; j < open.size(); ++j) bootstrap[open[j]] = v[static_cast<Eigen::Index>(j)];
  }

  for (std::size_t k = 0; k < n; ++k) {
    Segment s;
    s.begin = batch.transitions.size();
    batch.transitions.insert(batch.transitions.end(), per_env[k].begin(), per_env[k].end());
    batch.done.insert(batch.done.end(), per_env_done[k].begin(), per_env_done[k].end());
    s.end = batch.transitions.size();
    s.bootstrap = bootstrap[k];
    batch.segments.push_back(s);
  }
  return batch;
}

// ---------------------------------------------------------------------------
// Advantages

// delta_t = r_t + gamma V(s_{t+1}) (1 - done_t) - V(s_t)
// A_t     = delta_t + gamma lambda (1 - done_t) A_{t+1}
// return_t = A_t + V(s_t)
inline void compute_gae(RolloutBatch& batch, double gamma, double lambda) {
  auto& tr = batch.transitions;
  for (const Segment& seg : batch.segments) {
    double next_value = seg.bootstrap;
    double next_adv = 0.0;
    for (std::size_t t = seg.end; t-- > seg.begin;) {
      const double not_done = batch.done[t] ? 0.0 : 1.0;
      const double delta = tr[t].reward + gamma * next_value * not_done - tr[t].value;
      tr[t].advantage = delta + gamma * lambda * not_done * next_adv;
      tr[t].ret = tr[t].advantage + tr[t].value;
      next_value = tr[t].value;
      next_adv = tr[t].advantage;
    }
  }
}

inline void normalize_advantages(std::span<Transition> batch) {
  if (batch.size() < 2) return;
  double mean = 0.0;
  for (const auto& t : batch) mean += t.advantage;
  mean /= static_cast<double>(batch.size());
  double var = 0.0;
  for (const auto& t : batch) var += (t.advantage - mean) * (t.advantage - mean);
  var /= static_cast<double>(batch.size());
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (auto& t : batch) t.advantage = (t.advantage - mean) * inv;
}

// ---------------------------------------------------------------------------
// Loss

struct LossBatch {
  Eigen::MatrixXd obs;  // obs_dim x B
  Eigen::MatrixXd act;  // act_dim x B
  Eigen::VectorXd old_log_prob;
  Eigen::VectorXd advantage;
  Eigen::VectorXd ret;

  Eigen::Index size() const { return obs.cols(); }
};

inline LossBatch make_loss_batch(std::span<const Transition> all, std::span<const std::size_t> idx) {
  const auto b = static_cast<Eigen::Index>(idx.size());
  LossBatch lb;
  lb.obs.resize(static_cast<Eigen::Index>(kObsDim), b);
  lb.act.resize(static_cast<Eigen::Index>(kActDim), b);
  lb.old_log_prob.resize(b);
  lb.advantage.resize(b);
  lb.ret.resize(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& t = all[idx[static_cast<std::size_t>(j)]];
    for (std::size_t i = 0; i < kObsDim; ++i) lb.obs(static_cast<Eigen::Index>(i), j) = t.observation[i];
    for (std::size_t i = 0; i < kActDim; ++i) lb.act(static_cast<Eigen::Index>(i), j) = t.action[i];
    lb.old_log_prob[j] = t.old_log_prob;
    lb.advantage[j] = t.advantage;
    lb.ret[j] = t.ret;
  }
  return lb;
}

struct LossTerms {
  double total = 0.0;
  double policy = 0.0;   // clipped surrogate part, -mean(min(...))
  double value = 0.0;    // mean squared error
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// Surrogate for one sample and the branch that governs it.
inline double clipped_surrogate(double ratio, double advantage, double clip) {
  const double unclipped = ratio * advantage;
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage;
  return std::min(unclipped, clipped);
}

// total = -mean(min(r A, clip(r) A)) - entropy_coef * H + value_coef * mean((V - R)^2)
// Gradients are accumulated into `grad` (shaped like `ac`) when non-null.
inline LossTerms ppo_loss(const ActorCritic& ac, const LossBatch& b, const PpoConfig& cfg,
                          ActorCritic* grad = nullptr) {
  const Eigen::Index n = b.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  LossTerms out;

  Mlp::Cache pcache;
  const Eigen::MatrixXd raw = ac.policy.forward(b.obs, grad ? &pcache : nullptr);
  const Eigen::ArrayXXd th = raw.array().tanh();
  const Eigen::MatrixXd mean = ac.action_scale * th.matrix();
  const Eigen::ArrayXd inv_std = (-ac.log_std.array()).exp();
  const Eigen::ArrayXXd z = (b.act - mean).array().colwise() * inv_std;
  const Eigen::VectorXd logp = log_prob(mean, ac.log_std, b.act);

  Eigen::VectorXd d_logp(n);
  double surrogate_sum = 0.0;
  double clipped = 0.0;
  double kl = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double log_ratio = logp[j] - b.old_log_prob[j];
    const double ratio = std::exp(log_ratio);
    const double adv = b.advantage[j];
    const double unclipped_term = ratio * adv;
    const double s = clipped_surrogate(ratio, adv, cfg.clip);
    surrogate_sum += s;
    // d s / d logp = ratio * A while the unclipped branch is the minimum.
    d_logp[j] = unclipped_term <= s ? -inv_n * unclipped_term : 0.0;
    if (std::abs(ratio - 1.0) > cfg.clip) clipped += 1.0;
    kl += -log_ratio;
  }
  out.policy = -surrogate_sum * inv_n;
  out.entropy = gaussian_entropy(ac.log_std);
  out.clip_fraction = clipped * inv_n;
  out.approx_kl = kl * inv_n;

  Mlp::Cache vcache;
  const Eigen::MatrixXd v = ac.value.forward(b.obs, grad ? &vcache : nullptr);
  const Eigen::VectorXd err = v.row(0).transpose() - b.ret;
  out.value = err.squaredNorm() * inv_n;
  out.total = out.policy - cfg.entropy_coef * out.entropy + cfg.value_coef * out.value;

  if (!std::isfinite(out.total)) {
    std::ostringstream msg;
    msg << "ppo_loss: non-finite loss (policy " << out.policy << ", value " << out.value
        << ", entropy " << out.entropy << ", max |log_std| " << ac.log_std.cwiseAbs().maxCoeff()
        << ")";
    throw NumericalError(msg.str());
  }
  if (!grad) return out;

  // d logp / d mean_i = z_i / sigma_i ; d logp / d log_sigma_i = z_i^2 - 1
  const Eigen::ArrayXXd d_mean = (z.colwise() * inv_std).rowwise() * d_logp.transpose().array();
  const Eigen::MatrixXd d_raw = (d_mean * ac.action_scale * (1.0 - th.square())).matrix();
  ac.policy.backward(pcache, d_raw, grad->policy);
  grad->log_std += ((z.square() - 1.0).matrix() * d_logp) -
                   Eigen::VectorXd::Constant(ac.log_std.size(), cfg.entropy_coef);

  const Eigen::MatrixXd d_v = (2.0 * cfg.value_coef * inv_n) * err.transpose();
  ac.value.backward(vcache, d_v, grad->value);
  return out;
}

// ---------------------------------------------------------------------------
// Optimizer

struct Adam {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (m.size() != params.size()) {
      m = Eigen::VectorXd::Zero(params.size());
      v = Eigen::VectorXd::Zero(params.size());
      t = 0;
    }
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
  }
};

struct UpdateStats {
  LossTerms mean_loss;  // averaged over all minibatch steps
  std::size_t samples = 0;
  std::size_t steps = 0;
};

// `epochs` passes over `batch`, each split into `minibatches` shuffled chunks,
// one Adam step per chunk.
template <typename Rng>
UpdateStats ppo_update(ActorCritic& ac, Adam& opt, std::span<const Transition> batch,
                       const PpoConfig& cfg, Rng& rng) {
  UpdateStats stats;
  stats.samples = batch.size();
  if (batch.empty()) return stats;
  opt.learning_rate = cfg.learning_rate;
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t parts = std::max<std::size_t>(1, std::min(cfg.minibatches, batch.size()));
  Eigen::VectorXd params = ac.flatten();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t p = 0; p < parts; ++p) {
      const std::size_t lo = p * batch.size() / parts;
      const std::size_t hi = (p + 1) * batch.size() / parts;
      const LossBatch lb =
          make_loss_batch(batch, std::span<const std::size_t>(order.data() + lo, hi - lo));
      ActorCritic grad = ac.zeros_like();
      const LossTerms lt = ppo_loss(ac, lb, cfg, &grad);
      const Eigen::VectorXd g = grad.flatten();
      if (!g.allFinite()) throw NumericalError("ppo_update: non-finite gradient");
      opt.step(params, g);
      ac.unflatten(params);
      stats.mean_loss.total += lt.total;
      stats.mean_loss.policy += lt.policy;
      stats.mean_loss.value += lt.value;
      stats.mean_loss.entropy += lt.entropy;
      stats.mean_loss.clip_fraction += lt.clip_fraction;
      stats.mean_loss.approx_kl += lt.approx_kl;
      ++stats.steps;
    }
  }
  const double k = 1.0 / static_cast<double>(stats.steps);
  stats.mean_loss.total *= k;
  stats.mean_loss.policy *= k;
  stats.mean_loss.value *= k;
  stats.mean_loss.entropy *= k;
  stats.mean_loss.clip_fraction *= k;
  stats.mean_loss.approx_kl *= k;
  return stats;
}

}  // namespace gaitlab

#endif  // GAITLAB_PPO_HPP_
