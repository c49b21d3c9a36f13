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

#include "gaitlab/kinematics.hpp"

#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace gaitlab {
namespace {

const RobotGeometry kGeom{};
const TrajectoryConfig kTraj{};

// Independent chain evaluation with complex arithmetic.
std::complex<double> chain_vector(const SpineAngles& s, double link) {
  using namespace std::complex_literals;
  const double lengths[4] = {0.5 * link, link, link, 0.5 * link};
  const double headings[4] = {0.0, s[0], s[0] + s[1], s[0] + s[1] + s[2]};
  std::complex<double> z = 0.0;
  for (int k = 0; k < 4; ++k) z += lengths[k] * std::exp(1i * headings[k]);
  return z;
}

TEST(BodyFrameTest, StraightChain) {
  const BodyPose front = front_girdle(BodyPose{}, {0, 0, 0}, kGeom);
  EXPECT_NEAR(front.x, 0.3, 1e-15);
  EXPECT_NEAR(front.y, 0.0, 1e-15);
  const BodyPose body = body_frame(BodyPose{}, {0, 0, 0}, kGeom);
  EXPECT_NEAR(body.x, 0.15, 1e-15);
  EXPECT_NEAR(body.y, 0.0, 1e-15);
  EXPECT_NEAR(body.psi, 0.0, 1e-15);
}

TEST(BodyFrameTest, CurvedChainMatchesComplexSummation) {
  const double a = kTraj.amplitude;
  const SpineAngles s = {a, a, a};
  const BodyPose body = body_frame(BodyPose{}, s, kGeom);
  const std::complex<double> z = chain_vector(s, kGeom.spine_link_length);
  EXPECT_GT(body.y, 0.0);  // curves left
  EXPECT_NEAR(body.x, 0.5 * z.real(), 1e-14);
  EXPECT_NEAR(body.y, 0.5 * z.imag(), 1e-14);
  EXPECT_NEAR(body.psi, std::arg(z), 1e-14);

  // Same chain from an arbitrary hind pose.
  const BodyPose hind{0.4, -1.2, 2.0};
  const BodyPose moved = body_frame(hind, s, kGeom);
  const std::complex<double> zw =
      std::complex<double>(hind.x, hind.y) + std::polar(1.0, hind.psi) * (0.5 * z);
  EXPECT_NEAR(moved.x, zw.real(), 1e-14);
  EXPECT_NEAR(moved.y, zw.imag(), 1e-14);
  EXPECT_NEAR(moved.psi, hind.psi + std::arg(z), 1e-14);
}

TEST(BodyFrameTest, NegatedSpineMirrorsFrame) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-0.3, 0.3);
  for (int i = 0; i < 100; ++i) {
    const SpineAngles s = {ang(rng), ang(rng), ang(rng)};
    const BodyPose b = body_frame(BodyPose{}, s, kGeom);
    const BodyPose m = body_frame(BodyPose{}, {-s[0], -s[1], -s[2]}, kGeom);
    ASSERT_NEAR(m.x, b.x, 1e-15);
    ASSERT_NEAR(m.y, -b.y, 1e-15);
    ASSERT_NEAR(m.psi, -b.psi, 1e-15);
  }
}

JointTargets targets_for(const PhaseState& s) { return joint_targets(s, kTraj); }

TEST(FootPositionsTest, LeftFrontFootWithStraightSpine) {
  PhaseState s;
  s[BodyPart::S] = kPi / 2;  // spine angles A cos(pi/2) ~ 0
  const auto feet = foot_positions_body(targets_for(s), kGeom);
  const double a = kTraj.amplitude;
  const double l = kGeom.leg_length;
  const double w = kGeom.hip_offset;
  EXPECT_NEAR(feet[0].x(), 0.3 + l * std::sin(a), 1e-12);
  EXPECT_NEAR(feet[0].y(), w + l * std::cos(a), 1e-12);
  EXPECT_NEAR(feet[1].x(), l * std::sin(a), 1e-12);
  EXPECT_NEAR(feet[1].y(), w + l * std::cos(a), 1e-12);
  EXPECT_NEAR(feet[2].y(), -(w + l * std::cos(a)), 1e-12);
}

TEST(FootPositionsTest, ZeroYawPutsFeetLateralOfHips) {
  JointTargets t{};
  const auto feet = foot_positions_body(t, kGeom);
  const double lat = kGeom.hip_offset + kGeom.leg_length;
  EXPECT_NEAR((feet[0] - Vec2(0.3, lat)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((feet[1] - Vec2(0.0, lat)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((feet[2] - Vec2(0.3, -lat)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((feet[3] - Vec2(0.0, -lat)).norm(), 0.0, 1e-15);
}

TEST(FootPositionsTest, LeftRightSwapMirrorsFeet) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    PhaseState s;
    for (auto& p : s.phi) p = phase(rng);
    s[BodyPart::S] = kPi / 2;
    PhaseState swapped = s;
    std::swap(swapped.phi[0], swapped.phi[2]);
    std::swap(swapped.phi[1], swapped.phi[3]);
    const auto f = foot_positions_body(targets_for(s), kGeom);
    const auto g = foot_positions_body(targets_for(swapped), kGeom);
    const std::size_t mirror[4] = {2, 3, 0, 1};
    for (std::size_t leg = 0; leg < 4; ++leg) {
      ASSERT_NEAR(g[leg].x(), f[mirror[leg]].x(), 1e-15);
      ASSERT_NEAR(g[leg].y(), -f[mirror[leg]].y(), 1e-15);
    }
  }
}

TEST(FootPositionsTest, BodyFrameFeetAreRigidTransformOfHindFeet) {
  PhaseState s;
  s.phi = {0.3, 1.7, 4.0, 5.5, 0.9};
  const JointTargets t = targets_for(s);
  const auto hind = foot_positions_body(t, kGeom);
  const auto body = foot_positions_body_frame(t, kGeom);
  const BodyPose b = body_frame(BodyPose{}, spine_angles(t), kGeom);
  for (std::size_t leg = 0; leg < 4; ++leg) {
    EXPECT_NEAR((b.transform(body[leg]) - hind[leg]).norm(), 0.0, 1e-15);
  }
}

TEST(RegistrationTest, Examples) {
  const std::vector<Vec2> p = {{1, 0}, {-1, 0}};
  const std::vector<Vec2> q_shift = {{2, 0}, {0, 0}};
  Registration r = solve_body_motion(BodyPose{}, p, q_shift);
  EXPECT_NEAR(r.pose.psi, 0.0, 1e-15);
  EXPECT_NEAR(r.pose.x, 1.0, 1e-15);
  EXPECT_NEAR(r.pose.y, 0.0, 1e-15);

  const std::vector<Vec2> q_rot = {{0, 1}, {0, -1}};
  r = solve_body_motion(BodyPose{}, p, q_rot);
  EXPECT_NEAR(r.pose.psi, kPi / 2, 1e-15);
  EXPECT_NEAR(r.pose.x, 0.0, 1e-15);
  EXPECT_NEAR(r.pose.y, 0.0, 1e-15);

  const std::vector<Vec2> one = {{0.5, 0.1}};
  r = solve_body_motion(BodyPose{}, one, one);
  EXPECT_EQ(r.pose.x, 0.0);
  EXPECT_EQ(r.pose.y, 0.0);
  EXPECT_EQ(r.pose.psi, 0.0);
}

TEST(RegistrationTest, NoStanceKeepsPreviousPose) {
  const BodyPose prev{1.0, 2.0, 0.3};
  const Registration r = solve_body_motion(prev, {}, {});
  EXPECT_EQ(r.pose.x, 1.0);
  EXPECT_EQ(r.pose.y, 2.0);
  EXPECT_EQ(r.pose.psi, 0.3);
}

TEST(RegistrationTest, SinglePointKeepsHeadingAndPins) {
  const BodyPose prev{0.0, 0.0, 0.7};
  const std::vector<Vec2> p = {{0.2, -0.1}};
  const std::vector<Vec2> q = {{3.0, 4.0}};
  const Registration r = solve_body_motion(prev, p, q);
  EXPECT_EQ(r.pose.psi, 0.7);
  EXPECT_NEAR((r.pose.transform(p[0]) - q[0]).norm(), 0.0, 1e-15);
}

TEST(RegistrationTest, CoincidentPointsFallBackToPreviousHeading) {
  const BodyPose prev{0.0, 0.0, -0.4};
  const std::vector<Vec2> p = {{0.2, 0.2}, {0.2, 0.2}};
  const std::vector<Vec2> q = {{1.0, 0.0}, {1.0, 0.0}};
  const Registration r = solve_body_motion(prev, p, q);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.pose.psi, -0.4);
  EXPECT_NEAR((r.pose.transform(p[0]) - q[0]).norm(), 0.0, 1e-15);
}

TEST(RegistrationTest, MismatchedCountsAreLayoutError) {
  const std::vector<Vec2> p = {{1, 0}, {0, 1}};
  const std::vector<Vec2> q = {{1, 0}};
  EXPECT_THROW(solve_body_motion(BodyPose{}, p, q), LayoutError);
}

TEST(RegistrationTest, HeadingIsUnwrappedAgainstPrevious) {
  const std::vector<Vec2> p = {{1, 0}, {-1, 0}};
  const double target = 3.0 * kPi - 0.1;  // absolute angle pi - 0.1 after wrapping
  std::vector<Vec2> q = {rotate(target, p[0]), rotate(target, p[1])};
  const Registration r = solve_body_motion(BodyPose{0, 0, 3.0 * kPi}, p, q);
  EXPECT_NEAR(r.pose.psi, target, 1e-12);
}

TEST(RegistrationTest, RecoversRandomRigidMotions) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_int_distribution<int> count(2, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    const BodyPose truth{coord(rng) * 10, coord(rng) * 10, angle(rng)};
    std::vector<Vec2> p(static_cast<std::size_t>(count(rng)));
    for (auto& v : p) v = {coord(rng), coord(rng)};
    std::vector<Vec2> q;
    for (const auto& v : p) q.push_back(truth.transform(v));
    const BodyPose prev{0, 0, truth.psi + 0.2 * angle(rng)};
    const Registration r = solve_body_motion(prev, p, q);
    ASSERT_NEAR(r.pose.x, truth.x, 1e-10);
    ASSERT_NEAR(r.pose.y, truth.y, 1e-10);
    ASSERT_NEAR(r.pose.psi, truth.psi, 1e-10);
    ASSERT_LE(r.rms_residual, 1e-10);
  }
}

TEST(BodyPoseTest, ComposeInverse) {
  const BodyPose a{0.3, -0.2, 1.1};
  const BodyPose id = a.compose(a.inverse());
  EXPECT_NEAR(id.x, 0.0, 1e-15);
  EXPECT_NEAR(id.y, 0.0, 1e-15);
  EXPECT_NEAR(id.psi, 0.0, 1e-15);
}

}  // namespace
}  // namespace gaitlab
