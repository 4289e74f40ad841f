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

#ifndef HFLSIM_DPCORE_H_
#define HFLSIM_DPCORE_H_

#include <string>
#include <vector>

#include "hflsim/param_vector.h"
#include "hflsim/rng.h"

namespace hflsim {

// Noise placement. C1 = client-only (pure LDP), C2 = super-node-only
// (pure HDP), C4 = aggregator-only (pure CDP); C3/C5/C6/C7 mix sites,
// with fractions alpha (clients / HDP zones) and beta (LDP zones).
enum class Placement { kNone, kC1, kC2, kC3, kC4, kC5, kC6, kC7 };

std::string placement_name(Placement p);
Placement placement_from_name(const std::string& name);

bool placement_noises_clients(Placement p);
bool placement_noises_supernodes(Placement p);
bool placement_noises_aggregator(Placement p);

// Noise policy for a run: placement, clipping, noise multiplier z
// (noise stddev relative to the sensitivity at the noising site), delta,
// per-user example cap, and the mixing fractions where the placement
// uses them.
struct DpPolicy {
  Placement placement = Placement::kNone;
  double alpha = 0.0;
  double beta = 0.0;
  ClipSpec clip;
  double z = 0.0;
  double delta = 1e-5;
  double user_cap = 1.0;      // w-hat
  double w_min = 1.0;         // per-layer clipping denominator floor

  void validate() const;
};

// Per-level fan-ins of an aggregation hierarchy (k_1 ... k_l).
struct HierarchySpec {
  std::vector<std::uint64_t> fan_ins;

  std::uint64_t product() const;
};

// i.i.d. N(0, sigma^2) vector; sigma = 0 gives the zero vector.
ParamVector gaussian_noise(std::size_t dim, double sigma, Rng& rng);

// Zonal noise scale: flat clipping sigma = z*S/(q*W); per-layer
// sigma = 2*z*S/(q*W_min). Pass the zone's W (flat) or W_min (per-layer).
double sigma_for_zone(const DpPolicy& policy, double q, double w_or_wmin);

// w_k = min(n_k / w_hat, 1).
double user_weight(double n_k, double user_cap);

// Classic Gaussian-mechanism epsilon at equality of the sigma condition:
// eps = sqrt(2 ln(1.25/delta)) / z. z = 0 yields +infinity. Only a valid
// DP bound where the result is < 1; kept as the paper's reference formula.
double classic_gm_epsilon(double z, double delta);

// eps' = eps / sqrt(prod fan_ins): Gaussian-sum amplification across
// hierarchy levels.
double amplify_by_fanin(double eps, const HierarchySpec& hierarchy);

// eps' = eps / k: combined Gaussian-sum and shuffling factor.
// Reporting-only; never mixed into ledger output.
double amplify_by_shuffling(double eps, std::uint64_t k);

// Aggregator-level budget of one configuration row:
//   C1 e/sqrt(k)            C2 e/sqrt(s)
//   C3 e/sqrt(b*s*m) + e/sqrt((1-b)*s)
//   C4 e                    C5 e/sqrt(a*k) + e
//   C6 e/sqrt(b*s) + e      C7 e/sqrt(b*s*m) + e/sqrt(a*s) + e
// Fractions equal to 0 or 1 drop the vanished term instead of dividing
// by zero. `shuffling` removes the square roots over all divided terms.
double config_budget(Placement cfg, double eps, std::uint64_t s,
                     std::uint64_t m, std::uint64_t k, double alpha,
                     double beta, bool shuffling = false);

}  // namespace hflsim

#endif  // HFLSIM_DPCORE_H_
