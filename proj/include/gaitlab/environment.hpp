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

#ifndef GAITLAB_ENVIRONMENT_HPP_
#define GAITLAB_ENVIRONMENT_HPP_

// Quasi-static planar locomotion environment. Stance feet stay pinned to
// their touch-down points and the body pose is recovered each step by rigid
// registration of the current foot layout onto those anchors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "gaitlab/commands.hpp"
#include "gaitlab/errors.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/phase_core.hpp"
#include "gaitlab/reward.hpp"
#include "gaitlab/ring_window.hpp"
#include "gaitlab/symmetry.hpp"

namespace gaitlab {

using PoseWindow = RingWindow<BodyPose>;

struct EnvConfig {
  TrajectoryConfig trajectory;
  RobotGeometry geometry;
  RewardConfig reward;
  std::size_t episode_length = 300;

  void validate() const {
    trajectory.validate();
    geometry.validate();
    if (episode_length == 0) throw ConfigError("episode_length must be positive");
  }
};

// Per leg: anchor present iff the leg is in stance.
struct ContactState {
  std::array<std::optional<Vec2>, kNumLegs> anchors;

  bool in_stance(std::size_t leg) const { return anchors[leg].has_value(); }
  std::size_t stance_count() const {
    return static_cast<std::size_t>(
        std::count_if(anchors.begin(), anchors.end(), [](const auto& a) { return a.has_value(); }));
  }
};

inline PoseDelta pose_delta(const PoseWindow& window) {
  if (window.empty()) throw LifecycleError("pose_delta: empty pose window");
  const BodyPose& first = window.earliest();
  const BodyPose& last = window.latest();
  const Vec2 d = rotate(-first.psi, last.position() - first.position());
  return {d.x(), d.y(), last.psi - first.psi};
}

struct StepResult {
  Observation observation{};
  RewardTerms reward;
  bool done = false;
  bool clamped = false;
  double registration_residual = 0.0;
};

class Environment {
 public:
  explicit Environment(EnvConfig cfg = {}) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const std::size_t cap = cfg_.trajectory.window_capacity();
    pose_window_ = PoseWindow(cap);
    phase_windows_.fill(PhaseWindow(cap));
  }

  const EnvConfig& config() const { return cfg_; }

  // Random reset: uniform phases, command from the sampler.
  template <typename Rng>
  Observation reset(CommandSampler& sampler, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    PhaseState phases;
    for (double& p : phases.phi) p = wrap_phase(uniform(rng));
    const int gait = sampler.next_gait(rng);
    return reset_to(phases, command_lookup(gait), gait);
  }

  // Deterministic reset; `gait` is informational (0 when the command is ad hoc).
  Observation reset_to(const PhaseState& phases, const Command& cmd, int gait = 0) {
    for (std::size_t i = 0; i < kNumParts; ++i) phases_.phi[i] = wrap_phase(phases.phi[i]);
    gait_ = gait;
    command_ = cmd;
    steps_ = 0;
    pose_ = BodyPose{};
    targets_ = joint_targets(phases_, cfg_.trajectory);
    const auto feet = foot_positions_body_frame(targets_, cfg_.geometry);
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      contacts_.anchors[leg].reset();
      if (is_stance(phases_.phi[leg])) contacts_.anchors[leg] = pose_.transform(feet[leg]);
    }
    pose_window_.clear();
    pose_window_.push(pose_);
    for (std::size_t i = 0; i < kNumParts; ++i) {
      phase_windows_[i].clear();
      phase_windows_[i].push(phases_.phi[i]);
    }
    last_reward_ = reward_now();
    started_ = true;
    return observation();
  }

  // Changes the active command without touching the rest of the state.
  void set_command(const Command& cmd, int gait = 0) {
    command_ = cmd;
    gait_ = gait;
  }

  StepResult step(const Action& action) {
    if (!started_) throw LifecycleError("step: environment has not been reset");
    if (done()) throw LifecycleError("step: episode already finished; reset first");

    StepResult out;
    PhaseVelocity vel;
    const double limit = cfg_.trajectory.max_phase_speed;
    for (std::size_t i = 0; i < kNumParts; ++i) {
      vel.omega[i] = std::clamp(action[i], -limit, limit);
      if (vel.omega[i] != action[i]) out.clamped = true;
    }
    phases_ = advance_phases(phases_, vel, cfg_.trajectory);
    targets_ = joint_targets(phases_, cfg_.trajectory);
    const auto feet = foot_positions_body_frame(targets_, cfg_.geometry);

    // Legs that stay in stance drive the registration; legs lifting off
    // release their anchors; touch-downs are anchored at the solved pose.
    std::array<Vec2, kNumLegs> body_pts;
    std::array<Vec2, kNumLegs> world_pts;
    std::size_t n = 0;
    std::array<bool, kNumLegs> touchdown{};
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      const bool stance = is_stance(phases_.phi[leg]);
      if (stance && contacts_.anchors[leg]) {
        body_pts[n] = feet[leg];
        world_pts[n] = *contacts_.anchors[leg];
        ++n;
      } else if (stance) {
        touchdown[leg] = true;
      } else {
        contacts_.anchors[leg].reset();
      }
    }
    const Registration reg = solve_body_motion(pose_, std::span<const Vec2>(body_pts.data(), n),
                                               std::span<const Vec2>(world_pts.data(), n));
    pose_ = reg.pose;
    out.registration_residual = reg.rms_residual;
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      if (touchdown[leg]) contacts_.anchors[leg] = pose_.transform(feet[leg]);
    }

    pose_window_.push(pose_);
    for (std::size_t i = 0; i < kNumParts; ++i) phase_windows_[i].push(phases_.phi[i]);
    ++steps_;

    last_reward_ = reward_now();
    out.reward = last_reward_;
    out.observation = observation();
    out.done = done();
    return out;
  }

  // [v*x, v*y, w*, dx, dy, dpsi, (sin, cos) x 5 phases, coverage x 4 legs]
  Observation observation() const {
    Observation o{};
    o[obs_slot::kCmdVx] = command_.vx;
    o[obs_slot::kCmdVy] = command_.vy;
    o[obs_slot::kCmdTurn] = command_.turn;
    const PoseDelta d = pose_delta(pose_window_);
    o[obs_slot::kDeltaX] = d.dx;
    o[obs_slot::kDeltaY] = d.dy;
    o[obs_slot::kDeltaPsi] = d.dpsi;
    for (std::size_t i = 0; i < kNumParts; ++i) {
      o[obs_slot::kPhase + 2 * i] = std::sin(phases_.phi[i]);
      o[obs_slot::kPhase + 2 * i + 1] = std::cos(phases_.phi[i]);
    }
    const auto cov = coverage();
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) o[obs_slot::kCoverage + leg] = cov[leg];
    return o;
  }

  std::array<double, kNumLegs> coverage() const {
    std::array<double, kNumLegs> cov{};
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) cov[leg] = phase_coverage(phase_windows_[leg]);
    return cov;
  }

  PoseDelta delta() const { return pose_delta(pose_window_); }

  bool done() const { return steps_ >= cfg_.episode_length; }
  std::size_t step_count() const { return steps_; }
  const PhaseState& phases() const { return phases_; }
  const JointTargets& targets() const { return targets_; }
  const Command& command() const { return command_; }
  int gait() const { return gait_; }
  const BodyPose& body_pose() const { return pose_; }
  const ContactState& contacts() const { return contacts_; }
  const PoseWindow& pose_window() const { return pose_window_; }
  const PhaseWindow& phase_window(BodyPart p) const { return phase_windows_[index(p)]; }
  const RewardTerms& last_reward() const { return last_reward_; }

  // World pose of the hind-girdle segment.
  BodyPose hind_pose() const {
    const BodyPose body_in_hind =
        body_frame(BodyPose{}, spine_angles(targets_), cfg_.geometry);
    return pose_.compose(body_in_hind.inverse());
  }

  // Current world foot positions, LF, LH, RF, RH.
  std::array<Vec2, kNumLegs> world_feet() const {
    auto feet = foot_positions_body_frame(targets_, cfg_.geometry);
    for (Vec2& f : feet) f = pose_.transform(f);
    return feet;
  }

 private:
  RewardTerms reward_now() const {
    return compute_reward(command_, pose_delta(pose_window_), coverage(), cfg_.reward);
  }

  EnvConfig cfg_;
  PhaseState phases_;
  JointTargets targets_{};
  Command command_;
  int gait_ = 0;
  BodyPose pose_;
  ContactState contacts_;
  PoseWindow pose_window_;
  std::array<PhaseWindow, kNumParts> phase_windows_;
  RewardTerms last_reward_;
  std::size_t steps_ = 0;
  bool started_ = false;
};

}  // namespace gaitlab

#endif  // GAITLAB_ENVIRONMENT_HPP_
