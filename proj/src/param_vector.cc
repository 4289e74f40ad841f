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

#include "hflsim/param_vector.h"

#include <algorithm>
#include <cmath>

#include "hflsim/errors.h"

namespace hflsim {

ParamVector::ParamVector(std::vector<double> v, std::vector<LayerShape> s)
    : values(std::move(v)), shape(std::move(s)) {
  std::size_t total = 0;
  for (const auto& layer : shape) total += layer.count();
  if (total != values.size()) {
    throw ConfigError("ParamVector: shape covers " + std::to_string(total) +
                      " elements but vector holds " +
                      std::to_string(values.size()));
  }
}

ParamVector ParamVector::dense(std::size_t n) {
  ParamVector out;
  out.values.assign(n, 0.0);
  out.shape = {LayerShape{"w", n, 1}};
  return out;
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  ParamVector out;
  out.values.assign(other.values.size(), 0.0);
  out.shape = other.shape;
  return out;
}

std::size_t ParamVector::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < layer; ++i) off += shape[i].count();
  return off;
}

std::span<double> ParamVector::layer(std::size_t i) {
  return {values.data() + layer_offset(i), shape[i].count()};
}

std::span<const double> ParamVector::layer(std::size_t i) const {
  return {values.data() + layer_offset(i), shape[i].count()};
}

double ParamVector::l2_norm() const {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

void ParamVector::axpy(double s, const ParamVector& other) {
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] += s * other.values[i];
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator*(ParamVector a, double s) { return a *= s; }

double max_abs_diff(const ParamVector& a, const ParamVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::fabs(a.values[i] - b.values[i]));
  return m;
}

void ensure_finite(const ParamVector& v, const char* where) {
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      throw DivergenceError(std::string(where) +
                            ": non-finite parameter value");
    }
  }
}

void ClipSpec::validate(std::size_t num_layers) const {
  if (kind == ClipKind::kNone) return;
  if (kind == ClipKind::kFlat) {
    if (!(bound > 0.0)) throw ConfigError("clip bound must be positive");
    return;
  }
  if (layer_bounds.empty()) {
    if (!(bound > 0.0)) throw ConfigError("clip bound must be positive");
    return;
  }
  if (layer_bounds.size() != num_layers) {
    throw ConfigError("per-layer clip bounds: expected " +
                      std::to_string(num_layers) + " values, got " +
                      std::to_string(layer_bounds.size()));
  }
  for (double b : layer_bounds) {
    if (!(b > 0.0)) throw ConfigError("clip bound must be positive");
  }
}

double ClipSpec::sensitivity_bound() const {
  if (kind == ClipKind::kPerLayer && !layer_bounds.empty()) {
    return *std::min_element(layer_bounds.begin(), layer_bounds.end());
  }
  return bound;
}

namespace {

void clip_span(std::span<double> v, double bound) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm <= bound) return;
  const double scale = bound / norm;
  for (double& x : v) x *= scale;
}

}  // namespace

ParamVector clip(const ParamVector& update, const ClipSpec& spec) {
  spec.validate(update.shape.size());
  ParamVector out = update;
  switch (spec.kind) {
    case ClipKind::kNone:
      break;
    case ClipKind::kFlat:
      clip_span({out.values.data(), out.values.size()}, spec.bound);
      break;
    case ClipKind::kPerLayer:
      for (std::size_t i = 0; i < out.shape.size(); ++i) {
        const double b =
            spec.layer_bounds.empty() ? spec.bound : spec.layer_bounds[i];
        clip_span(out.layer(i), b);
      }
      break;
  }
  ensure_finite(out, "clip");
  return out;
}

}  // namespace hflsim
