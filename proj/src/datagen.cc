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

#include "hflsim/datagen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hflsim/errors.h"

namespace hflsim {

std::size_t Partition::total() const {
  std::size_t t = 0;
  for (std::size_t s : sizes) t += s;
  return t;
}

LabeledBatch gen_blobs(int num_classes, int dim, int samples_per_class,
                       double separation, Rng& rng) {
  if (num_classes <= 0 || dim <= 0 || samples_per_class <= 0)
    throw ConfigError("gen_blobs: counts must be positive");

  // Centers first so the sample stream does not depend on how many samples
  // earlier classes drew.
  std::vector<std::vector<double>> centers(num_classes,
                                           std::vector<double>(dim, 0.0));
  for (int c = 0; c < num_classes; ++c) {
    double sq = 0.0;
    for (int d = 0; d < dim; ++d) {
      centers[c][d] = rng.normal();
      sq += centers[c][d] * centers[c][d];
    }
    const double scale = separation / std::max(std::sqrt(sq), 1e-12);
    for (double& v : centers[c]) v *= scale;
  }

  LabeledBatch out;
  out.dim = static_cast<std::size_t>(dim);
  out.features.reserve(static_cast<std::size_t>(num_classes) *
                       samples_per_class * dim);
  std::vector<double> x(dim);
  for (int c = 0; c < num_classes; ++c) {
    for (int s = 0; s < samples_per_class; ++s) {
      for (int d = 0; d < dim; ++d) x[d] = centers[c][d] + rng.normal();
      out.push_row(x, c);
    }
  }
  return out;
}

namespace {

Partition gather(const LabeledBatch& data,
                 const std::vector<std::vector<std::size_t>>& assignment) {
  Partition p;
  p.client_datasets.reserve(assignment.size());
  p.sizes.reserve(assignment.size());
  for (const auto& rows : assignment) {
    p.client_datasets.push_back(data.select(rows));
    p.sizes.push_back(rows.size());
  }
  return p;
}

}  // namespace

Partition partition_iid(const LabeledBatch& data, std::size_t num_clients,
                        Rng& rng) {
  if (num_clients == 0 || num_clients > data.size())
    throw ConfigError("partition_iid: need 1 <= clients <= samples");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const std::size_t base = data.size() / num_clients;
  const std::size_t extra = data.size() % num_clients;
  std::vector<std::vector<std::size_t>> assignment(num_clients);
  std::size_t pos = 0;
  for (std::size_t c = 0; c < num_clients; ++c) {
    const std::size_t take = base + (c < extra ? 1 : 0);
    assignment[c].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(pos + take));
    pos += take;
  }
  return gather(data, assignment);
}

Partition partition_label_skew(const LabeledBatch& data,
                               std::size_t num_clients, double concentration,
                               Rng& rng) {
  if (num_clients == 0 || num_clients > data.size())
    throw ConfigError("partition_label_skew: need 1 <= clients <= samples");
  if (!(concentration > 0.0))
    throw ConfigError("partition_label_skew: concentration must be positive");

  const int num_classes =
      1 + *std::max_element(data.labels.begin(), data.labels.end());
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[data.labels[i]].push_back(i);

  std::vector<std::vector<std::size_t>> assignment(num_clients);
  for (int c = 0; c < num_classes; ++c) {
    auto& rows = by_class[c];
    rng.shuffle(rows);

    // Symmetric Dirichlet via normalized gammas.
    std::vector<double> share(num_clients);
    double sum = 0.0;
    for (auto& s : share) {
      s = rng.gamma(concentration);
      sum += s;
    }
    // Largest-remainder apportionment of this class's rows.
    std::vector<std::size_t> count(num_clients, 0);
    std::vector<std::pair<double, std::size_t>> frac(num_clients);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < num_clients; ++k) {
      const double exact = share[k] / sum * static_cast<double>(rows.size());
      count[k] = static_cast<std::size_t>(exact);
      frac[k] = {exact - static_cast<double>(count[k]), k};
      assigned += count[k];
    }
    std::sort(frac.rbegin(), frac.rend());
    for (std::size_t i = 0; assigned < rows.size(); ++i, ++assigned)
      ++count[frac[i % num_clients].second];

    std::size_t pos = 0;
    for (std::size_t k = 0; k < num_clients; ++k) {
      assignment[k].insert(assignment[k].end(),
                           rows.begin() + static_cast<std::ptrdiff_t>(pos),
                           rows.begin() + static_cast<std::ptrdiff_t>(pos + count[k]));
      pos += count[k];
    }
  }

  // Repair empty clients from the currently largest one.
  for (std::size_t k = 0; k < num_clients; ++k) {
    while (assignment[k].empty()) {
      auto donor = std::max_element(
          assignment.begin(), assignment.end(),
          [](const auto& a, const auto& b) { return a.size() < b.size(); });
      assignment[k].push_back(donor->back());
      donor->pop_back();
    }
  }
  return gather(data, assignment);
}

LabeledBatch load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };

  const auto header = split(line);
  if (header.empty() || header.back() != "label")
    throw ConfigError(path + ": last column must be named 'label'");
  const std::size_t dim = header.size() - 1;
  if (dim == 0) throw ConfigError(path + ": no feature columns");

  LabeledBatch out;
  out.dim = dim;
  std::vector<double> x(dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected " + std::to_string(header.size()) +
                        " columns, got " + std::to_string(cells.size()));
    try {
      for (std::size_t d = 0; d < dim; ++d) x[d] = std::stod(cells[d]);
      const int label = std::stoi(cells.back());
      if (label < 0) throw std::invalid_argument("negative");
      out.push_row(x, label);
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": malformed value");
    }
  }
  if (out.empty()) throw ConfigError(path + ": no data rows");
  return out;
}

std::pair<LabeledBatch, LabeledBatch> split_train_val(const LabeledBatch& data,
                                                      double val_fraction) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw ConfigError("val fraction must be in [0, 1)");
  LabeledBatch train, val;
  train.dim = val.dim = data.dim;
  // Stride within each class so both splits keep the class mix.
  const std::size_t stride =
      val_fraction > 0.0
          ? std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(1.0 / val_fraction)))
          : 0;
  std::vector<std::size_t> seen(
      1 + (data.empty() ? 0 : *std::max_element(data.labels.begin(),
                                                data.labels.end())),
      0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t k = seen[data.labels[i]]++;
    if (stride != 0 && k % stride == stride - 1) {
      val.push_row(data.row(i), data.labels[i]);
    } else {
      train.push_row(data.row(i), data.labels[i]);
    }
  }
  return {train, val};
}

}  // namespace hflsim
