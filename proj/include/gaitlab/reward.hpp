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

#ifndef GAITLAB_REWARD_HPP_
#define GAITLAB_REWARD_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "gaitlab/commands.hpp"

namespace gaitlab {

enum class RewardTerm : std::size_t { Toward = 0, Perp, Turn, UndesiredTurn, UndesiredMove, Coverage };

inline constexpr std::size_t kNumRewardTerms = 6;
inline constexpr std::array<const char*, kNumRewardTerms> kRewardTermNames = {
    "r_toward", "r_perp", "r_turn", "r_u_turn", "r_u_move", "r_coverage"};

struct RewardConfig {
  double alpha = 1.0;
  double beta = 1.5;
  double zeta = 0.5;
  double epsilon = 2.2;
  double delta = 0.75;
  std::array<double, kNumRewardTerms> weights = {0.1, 0.1, 0.1, 0.1, 0.1, 0.01};
};

// Latest windowed pose expressed in the frame of the earliest windowed pose.
struct PoseDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dpsi = 0.0;
};

struct RewardTerms {
  std::array<double, kNumRewardTerms> terms{};
  double total = 0.0;

  double operator[](RewardTerm t) const { return terms[static_cast<std::size_t>(t)]; }
};

inline RewardTerms compute_reward(const Command& cmd, const PoseDelta& d,
                                  const std::array<double, kNumLegs>& cov,
                                  const RewardConfig& cfg) {
  RewardTerms r;
  auto& t = r.terms;
  t[0] = (d.dx * cmd.vx + d.dy * cmd.vy) * (cfg.alpha + cfg.beta * std::abs(cmd.vy));
  t[1] = -std::abs(d.dx * (-cmd.vy) + d.dy * cmd.vx) * (cfg.zeta + cfg.epsilon * std::abs(cmd.vx));
  t[2] = cfg.delta * cmd.turn * d.dpsi;
  t[3] = -(1.0 - std::abs(cmd.turn)) * std::abs(d.dpsi) / 2.0;
  t[4] = -(1.0 - std::sqrt(cmd.vx * cmd.vx + cmd.vy * cmd.vy)) * (std::abs(d.dx) + std::abs(d.dy)) / 2.0;
  const double mean = (cov[0] + cov[1] + cov[2] + cov[3]) / 4.0;
  t[5] = mean + std::min({cov[0], cov[1], cov[2], cov[3]});
  for (std::size_t i = 0; i < kNumRewardTerms; ++i) r.total += cfg.weights[i] * t[i];
  return r;
}

}  // namespace gaitlab

#endif  // GAITLAB_REWARD_HPP_
