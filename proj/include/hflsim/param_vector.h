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

#ifndef HFLSIM_PARAM_VECTOR_H_
#define HFLSIM_PARAM_VECTOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hflsim {

// One named layer inside a flat parameter vector.
struct LayerShape {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t count() const { return rows * cols; }
};

// Flat model parameters (or a gradient/update) plus layer metadata.
// Keeping everything in one contiguous vector makes clipping, noising,
// aggregation and masking uniform vector operations.
struct ParamVector {
  std::vector<double> values;
  std::vector<LayerShape> shape;

  ParamVector() = default;
  ParamVector(std::vector<double> v, std::vector<LayerShape> s);

  // Single anonymous layer of n zeros.
  static ParamVector dense(std::size_t n);
  static ParamVector zeros_like(const ParamVector& other);

  std::size_t size() const { return values.size(); }

  std::size_t layer_offset(std::size_t layer) const;
  std::span<double> layer(std::size_t i);
  std::span<const double> layer(std::size_t i) const;

  double l2_norm() const;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double s);
  // this += s * other
  void axpy(double s, const ParamVector& other);
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator*(ParamVector a, double s);

// Largest absolute coordinate-wise difference.
double max_abs_diff(const ParamVector& a, const ParamVector& b);

// Throws DivergenceError if any value is NaN/Inf.
void ensure_finite(const ParamVector& v, const char* where);

enum class ClipKind { kNone, kFlat, kPerLayer };

// L2 clipping policy. Flat mode bounds the whole vector; per-layer mode
// bounds each layer independently (layer_bounds, or `bound` broadcast when
// layer_bounds is empty). Bounds must be strictly positive.
struct ClipSpec {
  ClipKind kind = ClipKind::kNone;
  double bound = 1.0;
  std::vector<double> layer_bounds;

  static ClipSpec none() { return {}; }
  static ClipSpec flat(double bound) {
    return {ClipKind::kFlat, bound, {}};
  }
  static ClipSpec per_layer(std::vector<double> bounds) {
    return {ClipKind::kPerLayer, 1.0, std::move(bounds)};
  }

  void validate(std::size_t num_layers) const;
  // Bound used in the sensitivity/noise formulas (min layer bound for
  // per-layer, since sigma = 2 z S / (q Wmin) uses a single S).
  double sensitivity_bound() const;
};

// If ||u|| <= C returns u unchanged, else scales by C/||u||; per-layer mode
// applies the same rule to each layer with its own bound. Idempotent.
ParamVector clip(const ParamVector& update, const ClipSpec& spec);

}  // namespace hflsim

#endif  // HFLSIM_PARAM_VECTOR_H_
