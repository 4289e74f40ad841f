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

#include "hflsim/accountant.h"

#include <cmath>
#include <limits>

#include "hflsim/errors.h"

namespace hflsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(std::min(a, b) - mx));
}

// log(exp(a) - exp(b)), requires a >= b.
double log_sub(double a, double b) {
  if (b == -kInf) return a;
  if (a == b) return -kInf;
  return a + std::log1p(-std::exp(b - a));
}

double log_erfc(double x) {
  const double r = std::erfc(x);
  if (r > 0.0) return std::log(r);
  // Tail where erfc underflows: Laurent series at infinity.
  const double x2 = x * x;
  return -0.5 * std::log(M_PI) - std::log(x) - x2 - 0.5 / x2 +
         0.625 / (x2 * x2) - 37.0 / 24.0 / (x2 * x2 * x2);
}

// Exact binomial sum for integer orders.
double log_a_int(double q, double sigma, int alpha) {
  double log_a = -kInf;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  for (int j = 0; j <= alpha; ++j) {
    const double log_coef = std::lgamma(alpha + 1.0) - std::lgamma(j + 1.0) -
                            std::lgamma(alpha - j + 1.0);
    const double s = log_coef + j * log_q + (alpha - j) * log_1mq +
                     (static_cast<double>(j) * j - j) / (2.0 * sigma * sigma);
    log_a = log_add(log_a, s);
  }
  return log_a;
}

// Fractional orders: two-sided series of the sampled-Gaussian integral.
double log_a_frac(double q, double sigma, double alpha) {
  double log_a0 = -kInf;
  double log_a1 = -kInf;
  const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double sqrt2_sigma = std::sqrt(2.0) * sigma;

  double coef = 1.0;  // generalized binomial C(alpha, i), built iteratively
  for (int i = 0; i < 2000; ++i) {
    if (i > 0) coef *= (alpha - (i - 1)) / i;
    const double j = alpha - i;
    const double log_coef = std::log(std::fabs(coef));

    const double log_t0 = log_coef + i * log_q + j * log_1mq;
    const double log_t1 = log_coef + j * log_q + i * log_1mq;
    const double log_e0 =
        std::log(0.5) + log_erfc((i - z0) / sqrt2_sigma);
    const double log_e1 =
        std::log(0.5) + log_erfc((z0 - j) / sqrt2_sigma);
    const double log_s0 =
        log_t0 + (static_cast<double>(i) * i - i) / (2.0 * sigma * sigma) +
        log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2.0 * sigma * sigma) + log_e1;

    if (coef > 0.0) {
      log_a0 = log_add(log_a0, log_s0);
      log_a1 = log_add(log_a1, log_s1);
    } else {
      log_a0 = log_sub(log_a0, log_s0);
      log_a1 = log_sub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30.0) break;
  }
  return log_add(log_a0, log_a1);
}

}  // namespace

const std::vector<double>& rdp_order_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g = {1.25, 1.5};
    for (int a = 2; a <= 512; ++a) g.push_back(static_cast<double>(a));
    return g;
  }();
  return grid;
}

double rdp_subsampled_gaussian(double q, double z, double order) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("rdp: q must be in (0, 1]");
  if (!(order > 1.0)) throw ConfigError("rdp: order must be > 1");
  if (z == 0.0) return kInf;
  if (q == 1.0) return order / (2.0 * z * z);
  const double whole = std::round(order);
  const double log_a = std::fabs(order - whole) < 1e-12
                           ? log_a_int(q, z, static_cast<int>(whole))
                           : log_a_frac(q, z, order);
  return log_a / (order - 1.0);
}

RdpAccountant::RdpAccountant() : rdp_(rdp_order_grid().size(), 0.0) {}

void RdpAccountant::compose(double q, double z, int count) {
  if (count <= 0) return;
  if (!(z > 0.0)) throw ConfigError("accountant: z must be > 0");
  const auto& grid = rdp_order_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rdp_[i] += count * rdp_subsampled_gaussian(q, z, grid[i]);
  }
  rounds_ += count;
}

double RdpAccountant::epsilon(double delta) const {
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("accountant: delta must be in (0, 1)");
  if (rounds_ == 0) return 0.0;
  const auto& grid = rdp_order_grid();
  double best = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    if (!std::isfinite(rdp_[i])) continue;
    const double eps = rdp_[i] + std::log((a - 1.0) / a) -
                       (std::log(delta) + std::log(a)) / (a - 1.0);
    best = std::min(best, eps);
  }
  return best;
}

double RdpAccountant::epsilon_for(double q, double z, int rounds,
                                  double delta) {
  RdpAccountant acc;
  acc.compose(q, z, rounds);
  return acc.epsilon(delta);
}

}  // namespace hflsim
