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

#ifndef GAITLAB_MLP_HPP_
#define GAITLAB_MLP_HPP_

// Fully connected network with ELU hidden activations and a linear output
// layer. Samples are columns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/errors.hpp"

namespace gaitlab {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

inline Eigen::MatrixXd elu(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

inline Eigen::MatrixXd elu_grad(const Eigen::MatrixXd& pre) {
  return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
}

// Orthogonal matrix scaled by gain (rows or columns orthonormal, whichever
// is the shorter side).
template <typename Rng>
Eigen::MatrixXd orthogonal_matrix(Eigen::Index rows, Eigen::Index cols, double gain, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index big = std::max(rows, cols);
  const Eigen::Index small = std::min(rows, cols);
  Eigen::MatrixXd g(big, small);
  for (Eigen::Index j = 0; j < small; ++j)
    for (Eigen::Index i = 0; i < big; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < small; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  if (rows < cols) return gain * q.transpose();
  return gain * q;
}

class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input of each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each hidden layer
  };

  Mlp() = default;

  Mlp(Eigen::Index in, const std::vector<Eigen::Index>& hidden, Eigen::Index out) {
    Eigen::Index prev = in;
    for (Eigen::Index h : hidden) {
      layers.push_back({Eigen::MatrixXd::Zero(h, prev), Eigen::VectorXd::Zero(h)});
      prev = h;
    }
    layers.push_back({Eigen::MatrixXd::Zero(out, prev), Eigen::VectorXd::Zero(out)});
  }

  Eigen::Index input_dim() const { return layers.front().weight.cols(); }
  Eigen::Index output_dim() const { return layers.back().weight.rows(); }

  std::vector<Eigen::Index> hidden_sizes() const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) out.push_back(layers[i].weight.rows());
    return out;
  }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const {
    if (x.rows() != input_dim()) throw LayoutError("Mlp::forward: input dimension mismatch");
    if (cache) {
      cache->inputs.clear();
      cache->pre.clear();
    }
    Eigen::MatrixXd h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (cache) cache->inputs.push_back(h);
      Eigen::MatrixXd z = layers[i].weight * h;
      z.colwise() += layers[i].bias;
      if (i + 1 == layers.size()) return z;
      if (cache) cache->pre.push_back(z);
      h = elu(z);
    }
    return h;
  }

  // Accumulates parameter gradients of sum(d_out .* output) into `grad`.
  void backward(const Cache& cache, const Eigen::MatrixXd& d_out, Mlp& grad) const {
    Eigen::MatrixXd delta = d_out;
    for (std::size_t k = layers.size(); k-- > 0;) {
      grad.layers[k].weight.noalias() += delta * cache.inputs[k].transpose();
      grad.layers[k].bias += delta.rowwise().sum();
      if (k == 0) break;
      Eigen::MatrixXd back = layers[k].weight.transpose() * delta;
      delta = back.cwiseProduct(elu_grad(cache.pre[k - 1]));
    }
  }

  Mlp zeros_like() const {
    Mlp z = *this;
    for (auto& l : z.layers) {
      l.weight.setZero();
      l.bias.setZero();
    }
    return z;
  }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  // Layer by layer: weight (column-major) then bias.
  double* write_params(double* out) const {
    for (const auto& l : layers) {
      out = std::copy(l.weight.data(), l.weight.data() + l.weight.size(), out);
      out = std::copy(l.bias.data(), l.bias.data() + l.bias.size(), out);
    }
    return out;
  }

  const double* read_params(const double* in) {
    for (auto& l : layers) {
      std::copy(in, in + l.weight.size(), l.weight.data());
      in += l.weight.size();
      std::copy(in, in + l.bias.size(), l.bias.data());
      in += l.bias.size();
    }
    return in;
  }

  std::vector<DenseLayer> layers;
};

}  // namespace gaitlab

#endif  // GAITLAB_MLP_HPP_
