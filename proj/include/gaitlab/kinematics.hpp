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

#ifndef GAITLAB_KINEMATICS_HPP_
#define GAITLAB_KINEMATICS_HPP_

// Planar surrogate kinematics: spine chain, feet, and the rigid registration
// that recovers body motion from pinned stance feet.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "gaitlab/errors.hpp"
#include "gaitlab/phase_core.hpp"

namespace gaitlab {

using Vec2 = Eigen::Vector2d;

inline Vec2 rotate(double angle, const Vec2& v) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Planar pose. psi is kept unwrapped.
struct BodyPose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  Vec2 position() const { return {x, y}; }

  // Maps a point from this frame into the parent frame.
  Vec2 transform(const Vec2& local) const { return rotate(psi, local) + position(); }

  BodyPose compose(const BodyPose& child) const {
    const Vec2 p = transform(child.position());
    return {p.x(), p.y(), psi + child.psi};
  }

  BodyPose inverse() const {
    const Vec2 p = rotate(-psi, -position());
    return {p.x(), p.y(), -psi};
  }
};

struct RobotGeometry {
  double spine_link_length = 0.1;  // m, per link, three links
  double hip_offset = 0.06;        // m, lateral girdle-to-hip distance
  double leg_length = 0.09;        // m, effective planar leg length

  double girdle_spacing() const { return 3.0 * spine_link_length; }

  void validate() const {
    if (!(spine_link_length > 0.0 && hip_offset > 0.0 && leg_length > 0.0)) {
      throw ConfigError("robot geometry lengths must be positive");
    }
  }
};

using SpineAngles = std::array<double, 3>;

// Front girdle pose relative to the hind girdle. The spine is a half link,
// two full links and a half link separated by the three joints, which keeps
// the chain identical when read from either end.
inline BodyPose front_girdle(const BodyPose& hind, const SpineAngles& spine,
                             const RobotGeometry& geom) {
  const double len = geom.spine_link_length;
  const std::array<double, 4> lengths = {0.5 * len, len, len, 0.5 * len};
  Vec2 p = hind.position();
  double heading = hind.psi;
  for (std::size_t k = 0; k < 4; ++k) {
    if (k > 0) heading += spine[k - 1];
    p += lengths[k] * Vec2(std::cos(heading), std::sin(heading));
  }
  return {p.x(), p.y(), heading};
}

// Body frame: origin at the girdle midpoint, x-axis from hind toward front girdle.
inline BodyPose body_frame(const BodyPose& hind, const SpineAngles& spine,
                           const RobotGeometry& geom) {
  const BodyPose local_front = front_girdle(BodyPose{}, spine, geom);
  const Vec2 mid = 0.5 * local_front.position();
  const double heading = std::atan2(local_front.y, local_front.x);
  return hind.compose(BodyPose{mid.x(), mid.y(), heading});
}

inline SpineAngles spine_angles(const JointTargets& targets) {
  return {targets[12], targets[13], targets[14]};
}

// Feet in the hind-segment frame, ordered LF, LH, RF, RH.
inline std::array<Vec2, kNumLegs> foot_positions_body(const JointTargets& targets,
                                                      const RobotGeometry& geom) {
  const BodyPose front = front_girdle(BodyPose{}, spine_angles(targets), geom);
  const BodyPose hind{};
  std::array<Vec2, kNumLegs> feet;
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const bool is_front = leg == index(BodyPart::LF) || leg == index(BodyPart::RF);
    const double side = leg < 2 ? 1.0 : -1.0;
    const double yaw = targets[3 * leg];
    const Vec2 offset(geom.leg_length * std::sin(yaw),
                      side * (geom.hip_offset + geom.leg_length * std::cos(yaw)));
    feet[leg] = (is_front ? front : hind).transform(offset);
  }
  return feet;
}

// Feet expressed in the body frame rather than the hind-segment frame.
inline std::array<Vec2, kNumLegs> foot_positions_body_frame(const JointTargets& targets,
                                                            const RobotGeometry& geom) {
  const BodyPose to_body = body_frame(BodyPose{}, spine_angles(targets), geom).inverse();
  auto feet = foot_positions_body(targets, geom);
  for (Vec2& f : feet) f = to_body.transform(f);
  return feet;
}

struct Registration {
  BodyPose pose;
  double rms_residual = 0.0;
  bool degenerate = false;
};

// Rigid planar transform taking body-frame points onto their world anchors in
// the least-squares sense. One point keeps the previous heading and pins the
// point; zero points keep the previous pose. The heading is unwrapped against
// prev.psi.
inline Registration solve_body_motion(const BodyPose& prev, std::span<const Vec2> body_points,
                                      std::span<const Vec2> anchors) {
  if (body_points.size() != anchors.size()) {
    throw LayoutError("solve_body_motion: body points and anchors differ in count");
  }
  const std::size_t n = body_points.size();
  Registration out;
  out.pose = prev;
  if (n == 0) return out;

  double theta = prev.psi;
  Vec2 p_mean = Vec2::Zero();
  Vec2 q_mean = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    p_mean += body_points[i];
    q_mean += anchors[i];
  }
  p_mean /= static_cast<double>(n);
  q_mean /= static_cast<double>(n);

  if (n >= 2) {
    double s_cross = 0.0;
    double s_dot = 0.0;
    double spread = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 pc = body_points[i] - p_mean;
      const Vec2 qc = anchors[i] - q_mean;
      s_cross += cross(pc, qc);
      s_dot += pc.dot(qc);
      spread += pc.squaredNorm();
      scale += body_points[i].squaredNorm();
    }
    if (spread <= 1e-30 * (1.0 + scale) || (s_cross == 0.0 && s_dot == 0.0)) {
      out.degenerate = true;
    } else {
      const double abs_theta = std::atan2(s_cross, s_dot);
      theta = prev.psi + wrap_pi(abs_theta - prev.psi);
    }
  }

  const Vec2 t = q_mean - rotate(theta, p_mean);
  out.pose = {t.x(), t.y(), theta};
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sq += (out.pose.transform(body_points[i]) - anchors[i]).squaredNorm();
  }
  out.rms_residual = std::sqrt(sq / static_cast<double>(n));
  return out;
}

}  // namespace gaitlab

#endif  // GAITLAB_KINEMATICS_HPP_
