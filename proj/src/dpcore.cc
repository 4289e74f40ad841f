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

#include "hflsim/dpcore.h"

#include <cmath>
#include <limits>

#include "hflsim/errors.h"

namespace hflsim {

std::string placement_name(Placement p) {
  switch (p) {
    case Placement::kNone: return "none";
    case Placement::kC1: return "C1";
    case Placement::kC2: return "C2";
    case Placement::kC3: return "C3";
    case Placement::kC4: return "C4";
    case Placement::kC5: return "C5";
    case Placement::kC6: return "C6";
    case Placement::kC7: return "C7";
  }
  return "?";
}

Placement placement_from_name(const std::string& name) {
  if (name == "none") return Placement::kNone;
  if (name == "C1" || name == "c1") return Placement::kC1;
  if (name == "C2" || name == "c2") return Placement::kC2;
  if (name == "C3" || name == "c3") return Placement::kC3;
  if (name == "C4" || name == "c4") return Placement::kC4;
  if (name == "C5" || name == "c5") return Placement::kC5;
  if (name == "C6" || name == "c6") return Placement::kC6;
  if (name == "C7" || name == "c7") return Placement::kC7;
  throw ConfigError("unknown dp placement: " + name);
}

bool placement_noises_clients(Placement p) {
  return p == Placement::kC1 || p == Placement::kC3 || p == Placement::kC5 ||
         p == Placement::kC7;
}

bool placement_noises_supernodes(Placement p) {
  return p == Placement::kC2 || p == Placement::kC3 || p == Placement::kC6 ||
         p == Placement::kC7;
}

bool placement_noises_aggregator(Placement p) {
  return p == Placement::kC4 || p == Placement::kC5 || p == Placement::kC6 ||
         p == Placement::kC7;
}

void DpPolicy::validate() const {
  if (z < 0.0) throw ConfigError("noise multiplier z must be >= 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("delta must be in (0, 1)");
  if (!(user_cap > 0.0)) throw ConfigError("user cap must be positive");
  if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0)
    throw ConfigError("alpha/beta must be in [0, 1]");
  if (placement == Placement::kC7 && alpha + beta > 1.0)
    throw ConfigError("C7 requires alpha + beta <= 1");
  if (placement != Placement::kNone && clip.kind == ClipKind::kPerLayer &&
      !(w_min > 0.0))
    throw ConfigError("per-layer clipping requires w_min > 0");
}

std::uint64_t HierarchySpec::product() const {
  std::uint64_t p = 1;
  for (std::uint64_t k : fan_ins) {
    if (k < 1) throw ConfigError("fan-ins must be >= 1");
    p *= k;
  }
  return p;
}

ParamVector gaussian_noise(std::size_t dim, double sigma, Rng& rng) {
  if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
  ParamVector out = ParamVector::dense(dim);
  if (sigma == 0.0) return out;
  for (double& v : out.values) v = sigma * rng.normal();
  return out;
}

double sigma_for_zone(const DpPolicy& policy, double q, double w_or_wmin) {
  const double denom = q * w_or_wmin;
  if (!(denom > 0.0))
    throw ConfigError("sigma_for_zone: q*W must be positive");
  const double s = policy.clip.sensitivity_bound();
  if (policy.clip.kind == ClipKind::kPerLayer)
    return 2.0 * policy.z * s / denom;
  return policy.z * s / denom;
}

double user_weight(double n_k, double user_cap) {
  if (n_k < 0.0) throw ConfigError("n_k must be >= 0");
  if (!(user_cap > 0.0)) throw ConfigError("user cap must be positive");
  return std::min(n_k / user_cap, 1.0);
}

double classic_gm_epsilon(double z, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("delta must be in (0, 1)");
  if (z < 0.0) throw ConfigError("z must be >= 0");
  if (z == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0 * std::log(1.25 / delta)) / z;
}

double amplify_by_fanin(double eps, const HierarchySpec& hierarchy) {
  return eps / std::sqrt(static_cast<double>(hierarchy.product()));
}

double amplify_by_shuffling(double eps, std::uint64_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  return eps / static_cast<double>(k);
}

namespace {

// One additive term: eps / count^(1/2), or eps / count with shuffling.
// A zero-weight population contributes no term at all.
double term(double eps, double count, bool shuffling) {
  if (count <= 0.0) return 0.0;
  return shuffling ? eps / count : eps / std::sqrt(count);
}

}  // namespace

double config_budget(Placement cfg, double eps, std::uint64_t s,
                     std::uint64_t m, std::uint64_t k, double alpha,
                     double beta, bool shuffling) {
  const double sd = static_cast<double>(s);
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config_budget: missing/invalid ") +
                               what + " for " + placement_name(cfg));
  };
  switch (cfg) {
    case Placement::kNone:
      return 0.0;
    case Placement::kC1:
      need(k >= 1, "k");
      return term(eps, kd, shuffling);
    case Placement::kC2:
      need(s >= 1, "s");
      return term(eps, sd, shuffling);
    case Placement::kC3:
      need(s >= 1 && m >= 1, "s/m");
      need(beta >= 0.0 && beta <= 1.0, "beta");
      return term(eps, beta * sd * md, shuffling) +
             term(eps, (1.0 - beta) * sd, shuffling);
    case Placement::kC4:
      return eps;
    case Placement::kC5:
      need(k >= 1, "k");
      need(alpha >= 0.0 && alpha <= 1.0, "alpha");
      return term(eps, alpha * kd, shuffling) + eps;
    case Placement::kC6:
      need(s >= 1, "s");
      need(beta >= 0.0 && beta <= 1.0, "beta");
      return term(eps, beta * sd, shuffling) + eps;
    case Placement::kC7:
      need(s >= 1 && m >= 1, "s/m");
      need(alpha >= 0.0 && beta >= 0.0 && alpha + beta <= 1.0, "alpha/beta");
      return term(eps, beta * sd * md, shuffling) +
             term(eps, alpha * sd, shuffling) + eps;
  }
  throw ConfigError("config_budget: bad placement");
}

}  // namespace hflsim
