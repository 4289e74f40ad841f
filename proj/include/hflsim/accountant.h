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

#ifndef HFLSIM_ACCOUNTANT_H_
#define HFLSIM_ACCOUNTANT_H_

#include <vector>

namespace hflsim {

// Fixed RDP order grid: {1.25, 1.5} plus every integer in [2, 512].
const std::vector<double>& rdp_order_grid();

// RDP of the Poisson-subsampled Gaussian mechanism at one order.
// q = sampling probability, z = noise multiplier (sigma / sensitivity).
// q = 1 reduces to the plain Gaussian value alpha / (2 z^2).
double rdp_subsampled_gaussian(double q, double z, double order);

// Renyi accountant composing subsampled-Gaussian rounds linearly and
// converting to (eps, delta)-DP with the improved conversion
//   eps = min_a [ rdp(a) + log((a-1)/a) - (log(delta) + log(a)) / (a-1) ].
class RdpAccountant {
 public:
  RdpAccountant();

  // Adds `count` rounds of the mechanism (q, z).
  void compose(double q, double z, int count = 1);

  double epsilon(double delta) const;
  int rounds() const { return rounds_; }

  // One-shot helper.
  static double epsilon_for(double q, double z, int rounds, double delta);

 private:
  std::vector<double> rdp_;  // accumulated RDP per grid order
  int rounds_ = 0;
};

}  // namespace hflsim

#endif  // HFLSIM_ACCOUNTANT_H_
