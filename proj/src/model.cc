// Copyright 2026 The hflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hflsim/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hflsim/errors.h"

namespace hflsim {
namespace {

void check_batch(const Model& m, const LabeledBatch& batch) {
  if (batch.empty()) throw ConfigError("empty batch");
  if (batch.dim != static_cast<std::size_t>(m.input_dim)) {
    throw ConfigError("feature dim " + std::to_string(batch.dim) +
                      " does not match model input dim " +
                      std::to_string(m.input_dim));
  }
  for (int y : batch.labels) {
    if (y < 0 || y >= m.num_classes)
      throw ConfigError("label out of range: " + std::to_string(y));
  }
}

// softmax(logits) in place, numerically stabilized.
void softmax(std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct LinearViews {
  std::span<const double> w;  // C x D row-major
  std::span<const double> b;  // C
};

struct MlpViews {
  std::span<const double> w1;  // H x D
  std::span<const double> b1;  // H
  std::span<const double> w2;  // C x H
  std::span<const double> b2;  // C
};

LinearViews linear_views(const ParamVector& p) {
  return {p.layer(0), p.layer(1)};
}

MlpViews mlp_views(const ParamVector& p) {
  return {p.layer(0), p.layer(1), p.layer(2), p.layer(3)};
}

std::vector<double> linear_logits(const Model& m, const LinearViews& v,
                                  std::span<const double> x) {
  std::vector<double> logits(m.num_classes);
  for (int c = 0; c < m.num_classes; ++c) {
    double acc = v.b[c];
    const double* wrow = v.w.data() + static_cast<std::size_t>(c) * m.input_dim;
    for (int d = 0; d < m.input_dim; ++d) acc += wrow[d] * x[d];
    logits[c] = acc;
  }
  return logits;
}

// Returns hidden activations through `hidden` and the logits.
std::vector<double> mlp_logits(const Model& m, const MlpViews& v,
                               std::span<const double> x,
                               std::vector<double>& hidden) {
  hidden.resize(m.hidden_dim);
  for (int h = 0; h < m.hidden_dim; ++h) {
    double acc = v.b1[h];
    const double* wrow = v.w1.data() + static_cast<std::size_t>(h) * m.input_dim;
    for (int d = 0; d < m.input_dim; ++d) acc += wrow[d] * x[d];
    hidden[h] = std::tanh(acc);
  }
  std::vector<double> logits(m.num_classes);
  for (int c = 0; c < m.num_classes; ++c) {
    double acc = v.b2[c];
    const double* wrow = v.w2.data() + static_cast<std::size_t>(c) * m.hidden_dim;
    for (int h = 0; h < m.hidden_dim; ++h) acc += wrow[h] * hidden[h];
    logits[c] = acc;
  }
  return logits;
}

}  // namespace

void Model::validate() const {
  if (input_dim <= 0) throw ConfigError("model input dim must be positive");
  if (num_classes <= 0) throw ConfigError("model classes must be positive");
  if (kind == ModelKind::kMlp1Hidden && hidden_dim <= 0)
    throw ConfigError("mlp hidden dim must be positive");
  if (kind == ModelKind::kLinearSoftmax && hidden_dim != 0)
    throw ConfigError("linear model must have hidden dim 0");
}

std::size_t Model::param_count() const {
  const std::size_t d = input_dim, h = hidden_dim, c = num_classes;
  if (kind == ModelKind::kLinearSoftmax) return c * d + c;
  return h * d + h + c * h + c;
}

ParamVector Model::zero_params() const {
  validate();
  const std::size_t d = input_dim, h = hidden_dim, c = num_classes;
  ParamVector out;
  if (kind == ModelKind::kLinearSoftmax) {
    out.shape = {{"w", c, d}, {"b", c, 1}};
  } else {
    out.shape = {{"w1", h, d}, {"b1", h, 1}, {"w2", c, h}, {"b2", c, 1}};
  }
  out.values.assign(param_count(), 0.0);
  return out;
}

ParamVector Model::init_params(Rng& rng) const {
  ParamVector p = zero_params();
  for (std::size_t i = 0; i < p.shape.size(); ++i) {
    const bool is_weight = p.shape[i].cols > 1;
    const double scale =
        is_weight ? 1.0 / std::sqrt(static_cast<double>(p.shape[i].cols)) : 0.0;
    for (double& v : p.layer(i)) v = scale * rng.normal();
  }
  return p;
}

std::pair<double, double> forward_loss(const Model& model,
                                       const ParamVector& params,
                                       const LabeledBatch& batch) {
  model.validate();
  check_batch(model, batch);
  double loss = 0.0;
  std::size_t correct = 0;
  std::vector<double> hidden;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<double> logits =
        model.kind == ModelKind::kLinearSoftmax
            ? linear_logits(model, linear_views(params), batch.row(i))
            : mlp_logits(model, mlp_views(params), batch.row(i), hidden);
    if (argmax(logits) == batch.labels[i]) ++correct;
    softmax(logits);
    loss -= std::log(std::max(logits[batch.labels[i]], 1e-300));
  }
  const double n = static_cast<double>(batch.size());
  return {loss / n, static_cast<double>(correct) / n};
}

ParamVector backward(const Model& model, const ParamVector& params,
                     const LabeledBatch& batch) {
  model.validate();
  check_batch(model, batch);
  ParamVector grad = model.zero_params();
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  if (model.kind == ModelKind::kLinearSoftmax) {
    const auto v = linear_views(params);
    auto gw = grad.layer(0);
    auto gb = grad.layer(1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto x = batch.row(i);
      std::vector<double> p = linear_logits(model, v, x);
      softmax(p);
      p[batch.labels[i]] -= 1.0;  // residual p - onehot(y)
      for (int c = 0; c < model.num_classes; ++c) {
        const double r = p[c] * inv_n;
        double* grow = gw.data() + static_cast<std::size_t>(c) * model.input_dim;
        for (int d = 0; d < model.input_dim; ++d) grow[d] += r * x[d];
        gb[c] += r;
      }
    }
  } else {
    const auto v = mlp_views(params);
    auto gw1 = grad.layer(0);
    auto gb1 = grad.layer(1);
    auto gw2 = grad.layer(2);
    auto gb2 = grad.layer(3);
    std::vector<double> hidden;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto x = batch.row(i);
      std::vector<double> p = mlp_logits(model, v, x, hidden);
      softmax(p);
      p[batch.labels[i]] -= 1.0;
      for (int c = 0; c < model.num_classes; ++c) {
        const double r = p[c] * inv_n;
        double* grow = gw2.data() + static_cast<std::size_t>(c) * model.hidden_dim;
        for (int h = 0; h < model.hidden_dim; ++h) grow[h] += r * hidden[h];
        gb2[c] += r;
      }
      for (int h = 0; h < model.hidden_dim; ++h) {
        double dh = 0.0;
        for (int c = 0; c < model.num_classes; ++c)
          dh += p[c] * v.w2[static_cast<std::size_t>(c) * model.hidden_dim + h];
        const double da = dh * (1.0 - hidden[h] * hidden[h]) * inv_n;
        double* grow = gw1.data() + static_cast<std::size_t>(h) * model.input_dim;
        for (int d = 0; d < model.input_dim; ++d) grow[d] += da * x[d];
        gb1[h] += da;
      }
    }
  }
  ensure_finite(grad, "backward");
  return grad;
}

ParamVector sgd_epochs(const Model& model, const ParamVector& params,
                       const LabeledBatch& dataset, double lr, int epochs,
                       std::size_t batch_size, Rng& rng) {
  if (dataset.empty()) throw ConfigError("sgd_epochs: empty dataset");
  if (lr < 0.0) throw ConfigError("sgd_epochs: negative learning rate");
  if (batch_size == 0) throw ConfigError("sgd_epochs: zero batch size");

  ParamVector theta = params;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(start + batch_size, order.size());
      const LabeledBatch mini = dataset.select(
          {order.begin() + static_cast<std::ptrdiff_t>(start),
           order.begin() + static_cast<std::ptrdiff_t>(end)});
      const ParamVector g = backward(model, theta, mini);
      theta.axpy(-lr, g);
    }
  }
  ensure_finite(theta, "sgd_epochs");
  return theta;
}

}  // namespace hflsim
