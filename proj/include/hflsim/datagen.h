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

#ifndef HFLSIM_DATAGEN_H_
#define HFLSIM_DATAGEN_H_

#include <string>
#include <vector>

#include "hflsim/labeled_batch.h"
#include "hflsim/rng.h"

namespace hflsim {

// Disjoint per-client slices of a source dataset.
struct Partition {
  std::vector<LabeledBatch> client_datasets;
  std::vector<std::size_t> sizes;  // n_k per client

  std::size_t num_clients() const { return client_datasets.size(); }
  std::size_t total() const;
};

// Gaussian class clusters: class c is a unit-variance blob centered at
// separation * unit_direction(c). separation 0 collapses every class onto
// the origin (chance-level task).
LabeledBatch gen_blobs(int num_classes, int dim, int samples_per_class,
                       double separation, Rng& rng);

// Random equal-size (+-1) disjoint split.
Partition partition_iid(const LabeledBatch& data, std::size_t num_clients,
                        Rng& rng);

// Label-skewed split: per-class client shares from a symmetric
// Dirichlet(concentration). Small concentration = strong skew. Every client
// ends up nonempty (repaired by moving samples from the largest client).
Partition partition_label_skew(const LabeledBatch& data,
                               std::size_t num_clients, double concentration,
                               Rng& rng);

// Headered CSV: final column `label` (nonnegative integer), the rest
// real-valued features. Throws ConfigError with a line number on bad input.
LabeledBatch load_csv_dataset(const std::string& path);

// Deterministic train/validation split by per-class striding; val_fraction
// of each class goes to validation.
std::pair<LabeledBatch, LabeledBatch> split_train_val(const LabeledBatch& data,
                                                      double val_fraction);

}  // namespace hflsim

#endif  // HFLSIM_DATAGEN_H_
