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

#ifndef HFLSIM_MODEL_H_
#define HFLSIM_MODEL_H_

#include <utility>

#include "hflsim/labeled_batch.h"
#include "hflsim/param_vector.h"
#include "hflsim/rng.h"

namespace hflsim {

enum class ModelKind { kLinearSoftmax, kMlp1Hidden };

// The two fixed classifier architectures. Linear: softmax(Wx + b).
// MLP: softmax(W2 tanh(W1 x + b1) + b2).
struct Model {
  ModelKind kind = ModelKind::kLinearSoftmax;
  int input_dim = 0;
  int hidden_dim = 0;  // 0 for linear
  int num_classes = 0;

  static Model linear(int input_dim, int num_classes) {
    return {ModelKind::kLinearSoftmax, input_dim, 0, num_classes};
  }
  static Model mlp(int input_dim, int hidden_dim, int num_classes) {
    return {ModelKind::kMlp1Hidden, input_dim, hidden_dim, num_classes};
  }

  void validate() const;
  std::size_t param_count() const;
  // Zeroed parameters with the architecture's layer layout.
  ParamVector zero_params() const;
  // Small random init (scaled by 1/sqrt(fan-in)); deterministic per rng.
  ParamVector init_params(Rng& rng) const;
};

// Mean cross-entropy loss and accuracy over the batch.
std::pair<double, double> forward_loss(const Model& model,
                                       const ParamVector& params,
                                       const LabeledBatch& batch);

// Mean gradient of the cross-entropy loss w.r.t. params.
ParamVector backward(const Model& model, const ParamVector& params,
                     const LabeledBatch& batch);

// Plain SGD: `epochs` shuffled passes of `batch_size` mini-batches.
// Deterministic given the rng.
ParamVector sgd_epochs(const Model& model, const ParamVector& params,
                       const LabeledBatch& dataset, double lr, int epochs,
                       std::size_t batch_size, Rng& rng);

}  // namespace hflsim

#endif  // HFLSIM_MODEL_H_
