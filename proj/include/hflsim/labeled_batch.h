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

#ifndef HFLSIM_LABELED_BATCH_H_
#define HFLSIM_LABELED_BATCH_H_

#include <cstddef>
#include <span>
#include <vector>

namespace hflsim {

// Row-major feature matrix with integer class labels.
struct LabeledBatch {
  std::vector<double> features;  // rows * dim
  std::vector<int> labels;
  std::size_t dim = 0;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  void push_row(std::span<const double> x, int label) {
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
  }

  // Batch holding the given subset of rows, in order.
  LabeledBatch select(const std::vector<std::size_t>& rows) const {
    LabeledBatch out;
    out.dim = dim;
    out.features.reserve(rows.size() * dim);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.push_row(row(r), labels[r]);
    return out;
  }
};

}  // namespace hflsim

#endif  // HFLSIM_LABELED_BATCH_H_
