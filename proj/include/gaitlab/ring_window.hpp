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

#ifndef GAITLAB_RING_WINDOW_HPP_
#define GAITLAB_RING_WINDOW_HPP_

#include <cstddef>
#include <vector>

#include "gaitlab/errors.hpp"

namespace gaitlab {

// Fixed-capacity sliding window. Grows from empty to capacity, then each push
// evicts the oldest entry. Indexing is chronological: at(0) is the earliest.
template <typename T>
class RingWindow {
 public:
  explicit RingWindow(std::size_t capacity = 1) : capacity_(capacity) {
    if (capacity_ == 0) throw BoundsError("RingWindow: capacity must be positive");
    data_.reserve(capacity_);
  }

  void push(const T& value) {
    if (data_.size() < capacity_) {
      data_.push_back(value);
    } else {
      data_[head_] = value;
      head_ = (head_ + 1) % capacity_;
    }
  }

  void clear() {
    data_.clear();
    head_ = 0;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }
  bool full() const { return data_.size() == capacity_; }

  const T& at(std::size_t i) const {
    if (i >= data_.size()) throw LifecycleError("RingWindow: index past end of window");
    return data_[(head_ + i) % data_.size()];
  }

  const T& earliest() const {
    if (empty()) throw LifecycleError("RingWindow: window is empty");
    return at(0);
  }

  const T& latest() const {
    if (empty()) throw LifecycleError("RingWindow: window is empty");
    return at(data_.size() - 1);
  }

  // Storage order, not chronological. Fine for order-free statistics.
  const std::vector<T>& raw() const { return data_; }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<T> data_;
};

}  // namespace gaitlab

#endif  // GAITLAB_RING_WINDOW_HPP_
