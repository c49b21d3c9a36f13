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

#ifndef GAITLAB_ERRORS_HPP_
#define GAITLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gaitlab {

// A velocity, gait number or other scalar outside its admissible range.
class BoundsError : public std::out_of_range {
 public:
  explicit BoundsError(const std::string& what) : std::out_of_range(what) {}
};

// A vector whose length does not match the expected observation/action layout.
class LayoutError : public std::invalid_argument {
 public:
  explicit LayoutError(const std::string& what) : std::invalid_argument(what) {}
};

// Operation invoked in the wrong episode state (empty window, stepping a
// finished episode).
class LifecycleError : public std::logic_error {
 public:
  explicit LifecycleError(const std::string& what) : std::logic_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values encountered during optimization.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gaitlab

#endif  // GAITLAB_ERRORS_HPP_
