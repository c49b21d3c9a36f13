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

#ifndef GAITLAB_SYMMETRY_HPP_
#define GAITLAB_SYMMETRY_HPP_

// Morphological reflection group {e, g1, g2, g1∘g2} of the robot: g1 mirrors
// front/back, g2 mirrors left/right. Both act on observations and actions
// as signed permutations.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaitlab/errors.hpp"
#include "gaitlab/phase_core.hpp"

namespace gaitlab {

inline constexpr std::size_t kObsDim = 20;
inline constexpr std::size_t kActDim = 5;

using Observation = std::array<double, kObsDim>;
using Action = std::array<double, kActDim>;

// Observation slot offsets.
namespace obs_slot {
inline constexpr std::size_t kCmdVx = 0;
inline constexpr std::size_t kCmdVy = 1;
inline constexpr std::size_t kCmdTurn = 2;
inline constexpr std::size_t kDeltaX = 3;
inline constexpr std::size_t kDeltaY = 4;
inline constexpr std::size_t kDeltaPsi = 5;
inline constexpr std::size_t kPhase = 6;      // (sin, cos) pairs for LF, LH, RF, RH, S
inline constexpr std::size_t kCoverage = 16;  // LF, LH, RF, RH
}  // namespace obs_slot

// Encoded so that composition is bitwise xor.
enum class GroupElement : std::uint8_t { e = 0, g1 = 1, g2 = 2, g12 = 3 };

inline constexpr std::array<GroupElement, 4> kGroupElements = {
    GroupElement::e, GroupElement::g1, GroupElement::g2, GroupElement::g12};
inline constexpr std::array<GroupElement, 3> kNonIdentityElements = {
    GroupElement::g1, GroupElement::g2, GroupElement::g12};

inline const char* name(GroupElement g) {
  switch (g) {
    case GroupElement::e: return "e";
    case GroupElement::g1: return "g1";
    case GroupElement::g2: return "g2";
    case GroupElement::g12: return "g12";
  }
  return "?";
}

constexpr GroupElement compose(GroupElement a, GroupElement b) {
  return static_cast<GroupElement>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}

// Every element is an involution.
constexpr GroupElement inverse(GroupElement g) { return g; }

// out[i] = sign[i] * in[source[i]]
template <std::size_t N>
struct SignedPermutation {
  std::array<std::uint8_t, N> source{};
  std::array<std::int8_t, N> sign{};

  template <typename Vec>
  Vec apply(const Vec& in) const {
    Vec out = in;
    for (std::size_t i = 0; i < N; ++i) out[i] = sign[i] * in[source[i]];
    return out;
  }

  // (this ∘ other)(x) = this(other(x))
  SignedPermutation compose(const SignedPermutation& other) const {
    SignedPermutation r;
    for (std::size_t i = 0; i < N; ++i) {
      r.source[i] = other.source[source[i]];
      r.sign[i] = static_cast<std::int8_t>(sign[i] * other.sign[source[i]]);
    }
    return r;
  }

  bool operator==(const SignedPermutation&) const = default;

  static SignedPermutation identity() {
    SignedPermutation r;
    for (std::size_t i = 0; i < N; ++i) {
      r.source[i] = static_cast<std::uint8_t>(i);
      r.sign[i] = 1;
    }
    return r;
  }
};

using ObsRepresentation = std::array<SignedPermutation<kObsDim>, 4>;
using ActRepresentation = std::array<SignedPermutation<kActDim>, 4>;

// State-space rows:
//   g1:  [-vx,  vy, -w, -dx,  dy, -dpsi, sLH,-cLH, sLF,-cLF, sRH,-cRH, sRF,-cRF, sS, cS, covLH,covLF,covRH,covRF]
//   g2:  [ vx, -vy, -w,  dx, -dy, -dpsi, sRF, cRF, sRH, cRH, sLF, cLF, sLH, cLH, sS,-cS, covRF,covRH,covLF,covLH]
//   g12: [-vx, -vy,  w, -dx, -dy,  dpsi, sRH,-cRH, sRF,-cRF, sLH,-cLH, sLF,-cLF, sS,-cS, covRH,covRF,covLH,covLF]
inline const ObsRepresentation& obs_representation() {
  static const ObsRepresentation rep = [] {
    ObsRepresentation r;
    r[0] = SignedPermutation<kObsDim>::identity();
    r[1] = {{0, 1, 2, 3, 4, 5, 8, 9, 6, 7, 12, 13, 10, 11, 14, 15, 17, 16, 19, 18},
            {-1, 1, -1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1}};
    r[2] = {{0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 6, 7, 8, 9, 14, 15, 18, 19, 16, 17},
            {1, -1, -1, 1, -1, -1, 1, 1, 1, 1, 1, 1, 1, 1, 1, -1, 1, 1, 1, 1}};
    r[3] = {{0, 1, 2, 3, 4, 5, 12, 13, 10, 11, 8, 9, 6, 7, 14, 15, 19, 18, 17, 16},
            {-1, -1, 1, -1, -1, 1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, 1, 1, 1}};
    return r;
  }();
  return rep;
}

// Action rows:
//   g1:  [-wLH, -wLF, -wRH, -wRF,  wS]
//   g2:  [ wRF,  wRH,  wLF,  wLH, -wS]
//   g12: [-wRH, -wRF, -wLH, -wLF, -wS]
inline const ActRepresentation& act_representation() {
  static const ActRepresentation rep = [] {
    ActRepresentation r;
    r[0] = SignedPermutation<kActDim>::identity();
    r[1] = {{1, 0, 3, 2, 4}, {-1, -1, -1, -1, 1}};
    r[2] = {{2, 3, 0, 1, 4}, {1, 1, 1, 1, -1}};
    r[3] = {{3, 2, 1, 0, 4}, {-1, -1, -1, -1, -1}};
    return r;
  }();
  return rep;
}

inline Observation apply_obs(GroupElement g, const Observation& obs) {
  return obs_representation()[static_cast<std::size_t>(g)].apply(obs);
}

inline Action apply_act(GroupElement g, const Action& act) {
  return act_representation()[static_cast<std::size_t>(g)].apply(act);
}

inline std::vector<double> apply_obs(GroupElement g, std::span<const double> obs) {
  if (obs.size() != kObsDim) {
    throw LayoutError("apply_obs: expected " + std::to_string(kObsDim) + " slots, got " +
                      std::to_string(obs.size()));
  }
  return obs_representation()[static_cast<std::size_t>(g)].apply(
      std::vector<double>(obs.begin(), obs.end()));
}

inline std::vector<double> apply_act(GroupElement g, std::span<const double> act) {
  if (act.size() != kActDim) {
    throw LayoutError("apply_act: expected " + std::to_string(kActDim) + " slots, got " +
                      std::to_string(act.size()));
  }
  return act_representation()[static_cast<std::size_t>(g)].apply(
      std::vector<double>(act.begin(), act.end()));
}

inline PhaseVelocity apply_velocity(GroupElement g, const PhaseVelocity& v) {
  PhaseVelocity out;
  out.omega = apply_act(g, v.omega);
  return out;
}

// Action on raw phases. A (sin, -cos) pair is the encoding of pi - phi, so a
// reflected body part runs its cycle mirrored; otherwise phases are relabeled.
inline PhaseState apply_phases(GroupElement g, const PhaseState& s) {
  const auto& perm = act_representation()[static_cast<std::size_t>(g)];
  const bool mirror_legs = g == GroupElement::g1 || g == GroupElement::g12;
  const bool mirror_spine = g == GroupElement::g2 || g == GroupElement::g12;
  PhaseState out;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const double src = s.phi[perm.source[i]];
    out.phi[i] = mirror_legs ? wrap_phase(kPi - src) : src;
  }
  out.phi[4] = mirror_spine ? wrap_phase(kPi - s.phi[4]) : s.phi[4];
  return out;
}

// Swaps per-leg quantities (LF, LH, RF, RH order) the way g relabels legs.
template <typename Vec4>
Vec4 permute_legs(GroupElement g, const Vec4& v) {
  const auto& perm = act_representation()[static_cast<std::size_t>(g)];
  Vec4 out = v;
  for (std::size_t i = 0; i < kNumLegs; ++i) out[i] = v[perm.source[i]];
  return out;
}

struct Transition {
  Observation observation{};
  Action action{};
  double reward = 0.0;
  double value = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
  double old_log_prob = 0.0;
};

// Expands each transition into one copy per group element, ordered
// [all g0 copies, all g1 copies, ...]. Reward, value, advantage and return are
// invariant and copied. Non-identity copies get their old log-probability
// recomputed by `old_log_prob` on the transformed (state, action); identity
// copies keep the stored value so {e}-only augmentation is the plain batch.
//
// `old_log_prob` maps a span of transitions to their log-probabilities under
// the frozen behavior policy.
template <typename LogProbEvaluator>
std::vector<Transition> augment_transitions(std::span<const Transition> batch,
                                            LogProbEvaluator&& old_log_prob,
                                            std::span<const GroupElement> group = kGroupElements) {
  std::vector<Transition> out;
  out.reserve(batch.size() * group.size());
  for (const GroupElement g : group) {
    const std::size_t first = out.size();
    for (const Transition& t : batch) {
      Transition c = t;
      if (g != GroupElement::e) {
        c.observation = apply_obs(g, t.observation);
        c.action = apply_act(g, t.action);
      }
      out.push_back(c);
    }
    if (g != GroupElement::e) {
      std::span<Transition> copies(out.data() + first, batch.size());
      const std::vector<double> lp = old_log_prob(std::span<const Transition>(copies));
      for (std::size_t i = 0; i < copies.size(); ++i) copies[i].old_log_prob = lp[i];
    }
  }
  return out;
}

}  // namespace gaitlab

#endif  // GAITLAB_SYMMETRY_HPP_
