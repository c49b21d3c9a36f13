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

#ifndef GAITLAB_COMMANDS_HPP_
#define GAITLAB_COMMANDS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaitlab/errors.hpp"
#include "gaitlab/phase_core.hpp"

namespace gaitlab {

// Task-level directive: commanded direction in the body frame (unit vector or
// zero) and turning sense in {-1, 0, +1}.
struct Command {
  double vx = 0.0;
  double vy = 0.0;
  double turn = 0.0;

  bool operator==(const Command&) const = default;
};

enum class Category : std::size_t {
  Linear = 0,
  Lateral,
  Rotational,
  Curved,
  Diagonal,
  ObliqueI,
  ObliqueII,
};

inline constexpr std::size_t kNumCategories = 7;
inline constexpr int kNumGaits = 22;

inline const char* name(Category c) {
  static constexpr std::array<const char*, kNumCategories> names = {
      "linear", "lateral", "rotational", "curved", "diagonal", "oblique_1", "oblique_2"};
  return names[static_cast<std::size_t>(c)];
}

struct CommandEntry {
  int gait;
  Category category;
  const char* label;
  std::optional<double> heading;  // commanded direction; empty = no translation
  int turn;

  Command command() const {
    if (!heading) return {0.0, 0.0, static_cast<double>(turn)};
    return {std::cos(*heading), std::sin(*heading), static_cast<double>(turn)};
  }
};

// The 22-command repertoire in seven categories.
inline const std::array<CommandEntry, kNumGaits>& command_table() {
  using C = Category;
  static const std::array<CommandEntry, kNumGaits> table = {{
      {1, C::Linear, "forward", 0.0, 0},
      {2, C::Linear, "backward", kPi, 0},
      {3, C::Lateral, "left_lateral", kPi / 2, 0},
      {4, C::Lateral, "right_lateral", 3 * kPi / 2, 0},
      {5, C::Rotational, "clockwise_rotational", std::nullopt, -1},
      {6, C::Rotational, "counterclockwise_rotational", std::nullopt, 1},
      {7, C::Curved, "forward_clockwise_curved", 0.0, -1},
      {8, C::Curved, "forward_counterclockwise_curved", 0.0, 1},
      {9, C::Curved, "backward_clockwise_curved", kPi, -1},
      {10, C::Curved, "backward_counterclockwise_curved", kPi, 1},
      {11, C::Diagonal, "forward_left_diagonal", kPi / 4, 0},
      {12, C::Diagonal, "backward_left_diagonal", 3 * kPi / 4, 0},
      {13, C::Diagonal, "backward_right_diagonal", 5 * kPi / 4, 0},
      {14, C::Diagonal, "forward_right_diagonal", 7 * kPi / 4, 0},
      {15, C::ObliqueI, "forward_left_oblique", kPi / 8, 0},
      {16, C::ObliqueI, "backward_left_oblique", 7 * kPi / 8, 0},
      {17, C::ObliqueI, "backward_right_oblique", 9 * kPi / 8, 0},
      {18, C::ObliqueI, "forward_right_oblique", 15 * kPi / 8, 0},
      {19, C::ObliqueII, "forward_left_oblique", 3 * kPi / 8, 0},
      {20, C::ObliqueII, "backward_left_oblique", 5 * kPi / 8, 0},
      {21, C::ObliqueII, "backward_right_oblique", 11 * kPi / 8, 0},
      {22, C::ObliqueII, "forward_right_oblique", 13 * kPi / 8, 0},
  }};
  return table;
}

inline const CommandEntry& command_entry(int gait) {
  if (gait < 1 || gait > kNumGaits) {
    throw BoundsError("gait number " + std::to_string(gait) + " outside 1.." +
                      std::to_string(kNumGaits));
  }
  return command_table()[static_cast<std::size_t>(gait - 1)];
}

inline Command command_lookup(int gait) { return command_entry(gait).command(); }

inline std::vector<int> gaits_in(Category c) {
  std::vector<int> out;
  for (const auto& e : command_table()) {
    if (e.category == c) out.push_back(e.gait);
  }
  return out;
}

// Reset-time command selection. By default categories are visited in a
// shuffled order (reshuffled once exhausted) and a gait is drawn uniformly
// inside the current category. A non-empty restriction list replaces this
// with a uniform draw from the listed gaits.
class CommandSampler {
 public:
  CommandSampler() = default;
  explicit CommandSampler(std::vector<int> restrict_to) : restricted_(std::move(restrict_to)) {
    for (int g : restricted_) command_entry(g);
  }

  template <typename Rng>
  Category next_category(Rng& rng) {
    if (cursor_ >= order_.size()) {
      for (std::size_t i = 0; i < kNumCategories; ++i) order_[i] = static_cast<Category>(i);
      std::shuffle(order_.begin(), order_.end(), rng);
      cursor_ = 0;
    }
    return order_[cursor_++];
  }

  template <typename Rng>
  int next_gait(Rng& rng) {
    if (!restricted_.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, restricted_.size() - 1);
      return restricted_[pick(rng)];
    }
    const std::vector<int> gaits = gaits_in(next_category(rng));
    std::uniform_int_distribution<std::size_t> pick(0, gaits.size() - 1);
    return gaits[pick(rng)];
  }

 private:
  std::vector<int> restricted_;
  std::array<Category, kNumCategories> order_{};
  std::size_t cursor_ = kNumCategories;
};

}  // namespace gaitlab

#endif  // GAITLAB_COMMANDS_HPP_
