// Copyright 2026 The orthant_gait Authors
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

#ifndef ORTHANT_GAIT_RL_MLP_HPP_
#define ORTHANT_GAIT_RL_MLP_HPP_

// Fully connected tanh network over a flat parameter span. The network owns
// only its shape; parameters live in the caller's storage so that optimizers,
// gradient clipping and checkpoints can treat them as one vector.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace orthant_gait::rl {

class Mlp {
 public:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;  // row-major out x in
    std::size_t bias_offset = 0;
  };

  // Per-sample activations kept for backprop. acts[0] is the input,
  // acts.back() the (linear) output.
  struct Cache {
    std::vector<std::vector<double>> acts;
  };

  Mlp() = default;

  explicit Mlp(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw std::invalid_argument("an MLP needs at least two widths");
    std::size_t offset = 0;
    for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
      Layer layer{widths_[i], widths_[i + 1], offset, offset + widths_[i] * widths_[i + 1]};
      offset = layer.bias_offset + layer.out;
      layers_.push_back(layer);
    }
    num_params_ = offset;
  }

  std::size_t num_params() const { return num_params_; }
  std::size_t input_size() const { return widths_.front(); }
  std::size_t output_size() const { return widths_.back(); }
  const std::vector<std::size_t>& widths() const { return widths_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::span<const double> forward(std::span<const double> params, std::span<const double> x,
                                  Cache& cache) const {
    assert(params.size() == num_params_);
    assert(x.size() == input_size());
    cache.acts.resize(layers_.size() + 1);
    cache.acts[0].assign(x.begin(), x.end());
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const Layer& L = layers_[li];
      const std::vector<double>& in = cache.acts[li];
      std::vector<double>& out = cache.acts[li + 1];
      out.resize(L.out);
      const bool hidden = li + 1 < layers_.size();
      for (std::size_t o = 0; o < L.out; ++o) {
        const double* w = params.data() + L.weight_offset + o * L.in;
        double z = params[L.bias_offset + o];
        for (std::size_t i = 0; i < L.in; ++i) z += w[i] * in[i];
        out[o] = hidden ? std::tanh(z) : z;
      }
    }
    return cache.acts.back();
  }

  // Adds d(loss)/d(params) to grad given d(loss)/d(output) for one sample.
  void backward(std::span<const double> params, const Cache& cache,
                std::span<const double> d_out, std::span<double> grad) const {
    assert(grad.size() == num_params_);
    std::vector<double> delta(d_out.begin(), d_out.end());
    std::vector<double> d_in;
    for (std::size_t li = layers_.size(); li-- > 0;) {
      const Layer& L = layers_[li];
      const std::vector<double>& in = cache.acts[li];
      for (std::size_t o = 0; o < L.out; ++o) {
        const double d = delta[o];
        grad[L.bias_offset + o] += d;
        double* gw = grad.data() + L.weight_offset + o * L.in;
        for (std::size_t i = 0; i < L.in; ++i) gw[i] += d * in[i];
      }
      if (li == 0) break;
      d_in.assign(L.in, 0.0);
      for (std::size_t o = 0; o < L.out; ++o) {
        const double* w = params.data() + L.weight_offset + o * L.in;
        const double d = delta[o];
        for (std::size_t i = 0; i < L.in; ++i) d_in[i] += w[i] * d;
      }
      // Input of this layer is the tanh output of the previous one.
      for (std::size_t i = 0; i < L.in; ++i) d_in[i] *= 1.0 - in[i] * in[i];
      delta.swap(d_in);
    }
  }

  // Orthogonal weights (Gram-Schmidt on a Gaussian matrix) scaled by gain,
  // zero biases. The last layer uses output_gain.
  void init_orthogonal(std::span<double> params, std::mt19937_64& rng, double hidden_gain,
                       double output_gain) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const Layer& L = layers_[li];
      const double gain = li + 1 < layers_.size() ? hidden_gain : output_gain;
      // Orthonormalize along the longer dimension.
      const bool rows_long = L.out >= L.in;
      const std::size_t n_vec = rows_long ? L.in : L.out;
      const std::size_t dim = rows_long ? L.out : L.in;
      std::vector<std::vector<double>> q(n_vec, std::vector<double>(dim));
      for (std::size_t k = 0; k < n_vec; ++k) {
        for (auto& v : q[k]) v = normal(rng);
        for (int pass = 0; pass < 2; ++pass) {
          for (std::size_t j = 0; j < k; ++j) {
            double d = 0.0;
            for (std::size_t i = 0; i < dim; ++i) d += q[k][i] * q[j][i];
            for (std::size_t i = 0; i < dim; ++i) q[k][i] -= d * q[j][i];
          }
        }
        double norm = 0.0;
        for (double v : q[k]) norm += v * v;
        norm = std::sqrt(norm);
        for (auto& v : q[k]) v /= norm;
      }
      for (std::size_t o = 0; o < L.out; ++o) {
        for (std::size_t i = 0; i < L.in; ++i) {
          const double v = rows_long ? q[i][o] : q[o][i];
          params[L.weight_offset + o * L.in + i] = gain * v;
        }
        params[L.bias_offset + o] = 0.0;
      }
    }
  }

 private:
  std::vector<std::size_t> widths_;
  std::vector<Layer> layers_;
  std::size_t num_params_ = 0;
};

}  // namespace orthant_gait::rl

#endif  // ORTHANT_GAIT_RL_MLP_HPP_
