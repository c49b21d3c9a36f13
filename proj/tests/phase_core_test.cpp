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

#include "gaitlab/phase_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace gaitlab {
namespace {

constexpr double kTol = 1e-12;
const TrajectoryConfig kCfg{};

// Largest empty arc measured on a fine discretization of the circle,
// independent of sorting: the arc between two occupied bins i < j spans
// (j - i) bins.
double brute_force_coverage(const std::vector<double>& samples, std::size_t bins = 100000) {
  std::vector<char> occupied(bins, 0);
  for (double s : samples) {
    auto b = static_cast<std::size_t>(s / kTwoPi * static_cast<double>(bins));
    occupied[std::min(b, bins - 1)] = 1;
  }
  std::size_t first = bins;
  for (std::size_t i = 0; i < bins; ++i) {
    if (occupied[i]) {
      first = i;
      break;
    }
  }
  std::size_t longest = 0;
  std::size_t previous = first;
  for (std::size_t k = 1; k <= bins; ++k) {
    const std::size_t i = (first + k) % bins;
    if (occupied[i]) {
      const std::size_t span = (i + bins - previous) % bins;
      longest = std::max(longest, span == 0 ? bins : span);
      previous = i;
    }
  }
  const double d_max = static_cast<double>(longest) * kTwoPi / static_cast<double>(bins);
  return (kTwoPi - d_max) / kTwoPi;
}

TEST(TrajectoryConfigTest, DefaultsAndWindow) {
  EXPECT_DOUBLE_EQ(kCfg.amplitude, kPi / 12);
  EXPECT_DOUBLE_EQ(kCfg.offset, 31 * kPi / 180);
  EXPECT_DOUBLE_EQ(kCfg.control_interval, 0.1);
  EXPECT_DOUBLE_EQ(kCfg.max_phase_speed, kPi / 2);
  EXPECT_EQ(kCfg.window_capacity(), 50u);
  EXPECT_NO_THROW(kCfg.validate());
  TrajectoryConfig bad = kCfg;
  bad.gait_period = 5.05;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = kCfg;
  bad.amplitude = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(AdvancePhasesTest, Examples) {
  PhaseState s;
  PhaseVelocity v;
  s.phi = {3 * kPi / 2, 2 * kPi - 0.01, 0.1, 0.0, 0.0};
  v.omega = {kPi / 2, kPi / 2, -kPi / 2, 0.0, 0.0};
  const PhaseState n = advance_phases(s, v, kCfg);
  EXPECT_NEAR(n.phi[0], 3 * kPi / 2 + 0.05 * kPi, kTol);
  EXPECT_NEAR(n.phi[0], 4.8695, 1e-4);
  EXPECT_NEAR(n.phi[1], 0.05 * kPi - 0.01, kTol);
  EXPECT_NEAR(n.phi[1], 0.1471, 1e-4);
  EXPECT_NEAR(n.phi[2], 2 * kPi + 0.1 - 0.05 * kPi, kTol);
  EXPECT_NEAR(n.phi[2], 6.2261, 1e-4);
  EXPECT_EQ(n.phi[3], 0.0);
}

TEST(AdvancePhasesTest, RejectsOutOfBoundsVelocity) {
  PhaseState s;
  PhaseVelocity v;
  v[BodyPart::RH] = kPi / 2 + 1e-9;
  EXPECT_THROW(advance_phases(s, v, kCfg), BoundsError);
  v[BodyPart::RH] = std::nan("");
  EXPECT_THROW(advance_phases(s, v, kCfg), BoundsError);
}

TEST(AdvancePhasesTest, RangeAndStepBoundProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> speed(-kCfg.max_phase_speed, kCfg.max_phase_speed);
  for (int trial = 0; trial < 10000; ++trial) {
    PhaseState s;
    PhaseVelocity v;
    for (auto& p : s.phi) p = phase(rng);
    for (auto& w : v.omega) w = speed(rng);
    if (trial % 10 == 0) s.phi[0] = std::nextafter(kTwoPi, 0.0);
    const PhaseState n = advance_phases(s, v, kCfg);
    for (std::size_t i = 0; i < kNumParts; ++i) {
      ASSERT_GE(n.phi[i], 0.0);
      ASSERT_LT(n.phi[i], kTwoPi);
      ASSERT_LE(circular_distance(n.phi[i], s.phi[i]),
                kCfg.max_phase_speed * kCfg.control_interval + 1e-12);
    }
  }
}

TEST(WrapTest, EdgeValues) {
  EXPECT_EQ(wrap_phase(kTwoPi), 0.0);
  EXPECT_EQ(wrap_phase(0.0), 0.0);
  EXPECT_LT(wrap_phase(-1e-18), kTwoPi);
  EXPECT_NEAR(wrap_phase(-kPi / 2), 3 * kPi / 2, kTol);
  EXPECT_NEAR(wrap_pi(3 * kPi / 2), -kPi / 2, kTol);
  EXPECT_NEAR(circular_distance(0.1, kTwoPi - 0.1), 0.2, kTol);
}

TEST(TrajectoryGeneratorTest, LegExamples) {
  const double a = kPi / 12;
  const double off = 31 * kPi / 180;
  auto l0 = leg_joint_angles(0.0, kCfg);
  EXPECT_NEAR(l0[0], 0.261799, 1e-6);
  EXPECT_NEAR(l0[1], 0.541052, 1e-6);
  EXPECT_NEAR(l0[2], 0.261799, 1e-6);
  EXPECT_NEAR(l0[0], a, kTol);
  EXPECT_NEAR(l0[1], off, kTol);
  auto l1 = leg_joint_angles(kPi / 2, kCfg);
  EXPECT_NEAR(l1[0], 0.0, kTol);
  EXPECT_NEAR(l1[1], a + off, kTol);
  EXPECT_NEAR(l1[1], 0.802851, 1e-6);
  auto l2 = leg_joint_angles(kPi, kCfg);
  EXPECT_NEAR(l2[0], -a, kTol);
  EXPECT_NEAR(l2[1], off, kTol);
  EXPECT_NEAR(l2[2], -a, kTol);
}

TEST(TrajectoryGeneratorTest, SpineExamples) {
  const double a = kPi / 12;
  for (double v : spine_joint_angles(0.0, kCfg)) EXPECT_NEAR(v, a, kTol);
  for (double v : spine_joint_angles(kPi / 2, kCfg)) EXPECT_NEAR(v, 0.0, kTol);
  for (double v : spine_joint_angles(kPi, kCfg)) EXPECT_NEAR(v, -a, kTol);
}

TEST(TrajectoryGeneratorTest, JointTargetExamples) {
  const double a = kPi / 12;
  const double off = 31 * kPi / 180;
  PhaseState s;
  JointTargets t = joint_targets(s, kCfg);
  for (std::size_t leg = 0; leg < 4; ++leg) {
    EXPECT_NEAR(t[3 * leg], a, kTol);
    EXPECT_NEAR(t[3 * leg + 1], off, kTol);
    EXPECT_NEAR(t[3 * leg + 2], a, kTol);
  }
  for (std::size_t k = 12; k < 15; ++k) EXPECT_NEAR(t[k], a, kTol);

  s[BodyPart::LF] = kPi / 2;
  t = joint_targets(s, kCfg);
  EXPECT_NEAR(t[0], 0.0, kTol);
  EXPECT_NEAR(t[1], a + off, kTol);
  EXPECT_NEAR(t[2], 0.0, kTol);
  EXPECT_NEAR(t[3], a, kTol);

  s.phi.fill(kPi);
  t = joint_targets(s, kCfg);
  for (std::size_t leg = 0; leg < 4; ++leg) {
    EXPECT_NEAR(t[3 * leg], -a, kTol);
    EXPECT_NEAR(t[3 * leg + 1], off, kTol);
  }
  for (std::size_t k = 12; k < 15; ++k) EXPECT_NEAR(t[k], -a, kTol);
}

TEST(TrajectoryGeneratorTest, PeriodicityAndBounds) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const double a = kCfg.amplitude;
  for (int trial = 0; trial < 1000; ++trial) {
    PhaseState s;
    for (auto& p : s.phi) p = phase(rng);
    PhaseState shifted = s;
    for (auto& p : shifted.phi) p += kTwoPi;
    const JointTargets t = joint_targets(s, kCfg);
    const JointTargets u = joint_targets(shifted, kCfg);
    for (std::size_t k = 0; k < kNumJoints; ++k) ASSERT_NEAR(t[k], u[k], 1e-12);
    for (std::size_t leg = 0; leg < 4; ++leg) {
      ASSERT_EQ(t[3 * leg], t[3 * leg + 2]);
      ASSERT_GE(t[3 * leg + 1], -a + std::min(0.0, kCfg.offset));
      ASSERT_LE(t[3 * leg + 1], a + std::max(0.0, kCfg.offset));
    }
    for (std::size_t k = 12; k < 15; ++k) ASSERT_LE(std::abs(t[k]), a);
  }
}

TEST(StanceTest, Examples) {
  EXPECT_FALSE(is_stance(kPi / 2));
  EXPECT_TRUE(is_stance(3 * kPi / 2));
  EXPECT_FALSE(is_stance(0.0));
  EXPECT_TRUE(is_stance(kPi));
  EXPECT_FALSE(is_stance(std::nextafter(kPi, 0.0)));
}

TEST(StanceTest, MatchesNonPositiveSineAwayFromBoundary) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (int i = 0; i < 10000; ++i) {
    const double p = phase(rng);
    if (std::abs(std::sin(p)) < 1e-12) continue;
    ASSERT_EQ(is_stance(p), std::sin(p) <= 0.0) << p;
  }
}

TEST(CoverageTest, Examples) {
  EXPECT_EQ(phase_coverage(std::vector<double>(50, 0.0)), 0.0);
  std::vector<double> even;
  for (int i = 0; i < 50; ++i) even.push_back(i * kTwoPi / 50);
  EXPECT_NEAR(phase_coverage(even), 0.98, kTol);
  EXPECT_NEAR(phase_coverage(std::vector<double>{0.0, kPi}), 0.5, kTol);
  EXPECT_EQ(phase_coverage(std::vector<double>{1.3}), 0.0);
}

TEST(CoverageTest, EmptyWindowIsLifecycleError) {
  PhaseWindow w(50);
  EXPECT_THROW(phase_coverage(w), LifecycleError);
  EXPECT_THROW(phase_coverage(std::vector<double>{}), LifecycleError);
}

TEST(CoverageTest, PartialWindowAndEviction) {
  PhaseWindow w(3);
  w.push(0.0);
  EXPECT_EQ(phase_coverage(w), 0.0);
  w.push(kPi);
  EXPECT_NEAR(phase_coverage(w), 0.5, kTol);
  w.push(kPi / 2);
  w.push(kPi / 2);  // evicts 0.0: samples {pi, pi/2, pi/2}
  EXPECT_EQ(w.size(), 3u);
  EXPECT_NEAR(phase_coverage(w), 0.25, kTol);
  EXPECT_EQ(w.earliest(), kPi);
  EXPECT_EQ(w.latest(), kPi / 2);
}

TEST(CoverageTest, PermutationAndRotationInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_int_distribution<int> len(1, 50);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(len(rng)));
    for (auto& v : s) v = phase(rng);
    const double base = phase_coverage(s);
    std::shuffle(s.begin(), s.end(), rng);
    ASSERT_EQ(phase_coverage(s), base);
    const double shift = phase(rng);
    for (auto& v : s) v = wrap_phase(v + shift);
    ASSERT_NEAR(phase_coverage(s), base, 1e-12);
  }
}

TEST(CoverageTest, AgreesWithBruteForceArcScan) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_int_distribution<int> len(1, 50);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(len(rng)));
    // Half the windows clustered, like slowly moving phases.
    const double centre = phase(rng);
    std::normal_distribution<double> near(0.0, 0.5);
    for (auto& v : s) v = trial % 2 ? phase(rng) : wrap_phase(centre + near(rng));
    ASSERT_NEAR(phase_coverage(s), brute_force_coverage(s), 2e-4);
  }
}

}  // namespace
}  // namespace gaitlab
