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

#ifndef GAITLAB_PHASE_CORE_HPP_
#define GAITLAB_PHASE_CORE_HPP_

// Phase oscillators and the fixed trajectory generator that maps the five
// body-part phases onto the 15 joint targets of the robot.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gaitlab/errors.hpp"
#include "gaitlab/ring_window.hpp"

namespace gaitlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Body parts in the canonical order used by phases, actions and joint targets.
enum class BodyPart : std::size_t { LF = 0, LH = 1, RF = 2, RH = 3, S = 4 };

inline constexpr std::size_t kNumParts = 5;
inline constexpr std::size_t kNumLegs = 4;
inline constexpr std::size_t kNumJoints = 15;

inline constexpr std::array<const char*, kNumParts> kPartNames = {"lf", "lh", "rf", "rh", "s"};

constexpr std::size_t index(BodyPart p) { return static_cast<std::size_t>(p); }

struct TrajectoryConfig {
  double amplitude = kPi / 12.0;
  double offset = 31.0 * kPi / 180.0;
  double control_interval = 0.1;   // s
  double max_phase_speed = kPi / 2.0;  // rad/s
  double gait_period = 5.0;        // s

  // Number of control steps per gait period; sizes the phase and pose windows.
  std::size_t window_capacity() const {
    return static_cast<std::size_t>(std::llround(gait_period / control_interval));
  }

  void validate() const {
    if (!(amplitude > 0.0)) throw ConfigError("amplitude must be positive");
    if (!(control_interval > 0.0)) throw ConfigError("control_interval must be positive");
    if (!(max_phase_speed > 0.0)) throw ConfigError("max_phase_speed must be positive");
    const double steps = gait_period / control_interval;
    if (!(gait_period > 0.0) || std::abs(steps - std::round(steps)) > 1e-9 * steps) {
      throw ConfigError("gait_period must be a positive integer multiple of control_interval");
    }
  }
};

// Five phases in [0, 2pi), ordered LF, LH, RF, RH, S.
struct PhaseState {
  std::array<double, kNumParts> phi{};

  double& operator[](BodyPart p) { return phi[index(p)]; }
  double operator[](BodyPart p) const { return phi[index(p)]; }
};

// Signed phase velocities in rad/s, same ordering as PhaseState.
struct PhaseVelocity {
  std::array<double, kNumParts> omega{};

  double& operator[](BodyPart p) { return omega[index(p)]; }
  double operator[](BodyPart p) const { return omega[index(p)]; }
};

using LegAngles = std::array<double, 3>;
using JointTargets = std::array<double, kNumJoints>;
using PhaseWindow = RingWindow<double>;

// Reduces any angle to [0, 2pi).
inline double wrap_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Reduces any angle to (-pi, pi].
inline double wrap_pi(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

// Shortest arc between two phases, in [0, pi].
inline double circular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

inline PhaseState advance_phases(const PhaseState& state, const PhaseVelocity& vel,
                                 const TrajectoryConfig& cfg) {
  PhaseState next;
  for (std::size_t i = 0; i < kNumParts; ++i) {
    const double w = vel.omega[i];
    if (!(std::abs(w) <= cfg.max_phase_speed)) {
      throw BoundsError("advance_phases: phase velocity " + std::to_string(w) + " of part " +
                        kPartNames[i] + " outside [-max_phase_speed, max_phase_speed]");
    }
    next.phi[i] = wrap_phase(state.phi[i] + w * cfg.control_interval);
  }
  return next;
}

inline LegAngles leg_joint_angles(double phi, const TrajectoryConfig& cfg) {
  const double c = cfg.amplitude * std::cos(phi);
  return {c, cfg.amplitude * std::sin(phi) + cfg.offset, c};
}

inline LegAngles spine_joint_angles(double phi_s, const TrajectoryConfig& cfg) {
  const double c = cfg.amplitude * std::cos(phi_s);
  return {c, c, c};
}

inline JointTargets joint_targets(const PhaseState& state, const TrajectoryConfig& cfg) {
  JointTargets out{};
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const LegAngles a = leg_joint_angles(state.phi[leg], cfg);
    std::copy(a.begin(), a.end(), out.begin() + 3 * leg);
  }
  const LegAngles s = spine_joint_angles(state[BodyPart::S], cfg);
  std::copy(s.begin(), s.end(), out.begin() + 12);
  return out;
}

// Swing on [0, pi), stance on [pi, 2pi).
inline bool is_stance(double phi) { return phi >= kPi; }

// Fraction of the phase circle not inside the largest empty gap between
// stored samples: (2pi - d_max) / 2pi.
inline double phase_coverage(std::span<const double> samples) {
  if (samples.empty()) throw LifecycleError("phase_coverage: empty window (episode not reset)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double d_max = kTwoPi - (sorted.back() - sorted.front());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    d_max = std::max(d_max, sorted[i] - sorted[i - 1]);
  }
  return (kTwoPi - d_max) / kTwoPi;
}

inline double phase_coverage(const PhaseWindow& window) {
  return phase_coverage(std::span<const double>(window.raw()));
}

}  // namespace gaitlab

#endif  // GAITLAB_PHASE_CORE_HPP_
