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

#include "hflsim/topology.h"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "hflsim/errors.h"

namespace hflsim {

std::size_t Topology::zone_of(int client) const {
  for (std::size_t z = 0; z < zones.size(); ++z) {
    if (std::binary_search(zones[z].begin(), zones[z].end(), client)) return z;
  }
  throw ConfigError("client not in any zone: " + std::to_string(client));
}

std::string Topology::to_json() const {
  nlohmann::ordered_json j;
  j["clients"] = client_sizes;
  j["zones"] = zones;
  return j.dump(2);
}

Topology Topology::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Topology t;
  t.client_sizes = j.at("clients").get<std::vector<std::size_t>>();
  std::vector<std::vector<int>> zones =
      j.at("zones").get<std::vector<std::vector<int>>>();
  return build_topology(t.client_sizes, zones.size(), ZoneAssignment::kByList,
                        zones);
}

Topology build_topology(const std::vector<std::size_t>& client_sizes,
                        std::size_t num_zones, ZoneAssignment mode,
                        const std::vector<std::vector<int>>& explicit_zones) {
  const std::size_t n = client_sizes.size();
  if (num_zones == 0 || num_zones > n)
    throw ConfigError("need 1 <= zones <= clients");

  Topology topo;
  topo.client_sizes = client_sizes;
  topo.zones.assign(num_zones, {});

  if (mode == ZoneAssignment::kEqual) {
    for (std::size_t c = 0; c < n; ++c)
      topo.zones[c % num_zones].push_back(static_cast<int>(c));
  } else {
    if (explicit_zones.size() != num_zones)
      throw ConfigError("by-list assignment: zone count mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t z = 0; z < num_zones; ++z) {
      for (int c : explicit_zones[z]) {
        if (c < 0 || static_cast<std::size_t>(c) >= n)
          throw ConfigError("zone member out of range: " + std::to_string(c));
        if (seen[c])
          throw ConfigError("client in more than one zone: " +
                            std::to_string(c));
        seen[c] = true;
      }
      topo.zones[z] = explicit_zones[z];
      std::sort(topo.zones[z].begin(), topo.zones[z].end());
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ConfigError("zones do not cover every client");
  }

  for (std::size_t z = 0; z < num_zones; ++z) {
    if (topo.zones[z].empty())
      throw ConfigError("zone " + std::to_string(z) + " is empty");
  }
  return topo;
}

std::size_t RoundView::total_online() const {
  std::size_t t = 0;
  for (const auto& z : online) t += z.size();
  return t;
}

bool RoundView::any_active() const {
  for (const auto& z : online)
    if (!z.empty()) return true;
  return false;
}

RoundView sample_online(const Topology& topo, double q, Rng& rng) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must be in (0, 1]");
  RoundView view;
  view.online.assign(topo.num_zones(), {});
  view.supernode.assign(topo.num_zones(), -1);
  view.zone_weight.assign(topo.num_zones(), 0.0);
  for (std::size_t z = 0; z < topo.num_zones(); ++z) {
    for (int c : topo.zones[z]) {
      if (q >= 1.0 || rng.uniform() < q) view.online[z].push_back(c);
    }
  }
  return view;
}

RoundView sample_fixed_k(const Topology& topo, std::size_t k, Rng& rng) {
  const std::size_t n = topo.num_clients();
  if (k == 0 || k > n) throw ConfigError("need 1 <= k <= clients");
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  // Partial Fisher-Yates: first k entries are the sample.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_int(n - i);
    std::swap(ids[i], ids[j]);
  }
  std::vector<bool> picked(n, false);
  for (std::size_t i = 0; i < k; ++i) picked[ids[i]] = true;

  RoundView view;
  view.online.assign(topo.num_zones(), {});
  view.supernode.assign(topo.num_zones(), -1);
  view.zone_weight.assign(topo.num_zones(), 0.0);
  for (std::size_t z = 0; z < topo.num_zones(); ++z) {
    for (int c : topo.zones[z]) {
      if (picked[c]) view.online[z].push_back(c);
    }
  }
  return view;
}

RoundView sample_online_keyed(const Topology& topo, double q,
                              const SeedTree& seeds, int round) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must be in (0, 1]");
  RoundView view;
  view.round = round;
  view.online.assign(topo.num_zones(), {});
  view.supernode.assign(topo.num_zones(), -1);
  view.zone_weight.assign(topo.num_zones(), 0.0);
  for (std::size_t z = 0; z < topo.num_zones(); ++z) {
    for (int c : topo.zones[z]) {
      Rng rng = seeds.rng(Stream::kOnline, static_cast<std::uint64_t>(round),
                          static_cast<std::uint64_t>(c));
      if (q >= 1.0 || rng.uniform() < q) view.online[z].push_back(c);
    }
  }
  return view;
}

RoundView sample_fixed_k_keyed(const Topology& topo, std::size_t k,
                               const SeedTree& seeds, int round) {
  Rng rng =
      seeds.rng(Stream::kOnlineFixedK, static_cast<std::uint64_t>(round));
  return sample_fixed_k(topo, k, rng);
}

int elect_supernode(const std::vector<int>& zone_online, std::size_t zone,
                    int round, ElectionState& state, Rng& rng) {
  if (zone >= state.incumbent.size())
    throw ConfigError("election: zone out of range");
  if (zone_online.empty()) {
    state.incumbent[zone] = -1;
    return -1;
  }
  const int inc = state.incumbent[zone];
  if (inc >= 0 &&
      std::binary_search(zone_online.begin(), zone_online.end(), inc)) {
    return inc;
  }
  const int chosen =
      zone_online[rng.uniform_int(zone_online.size())];
  state.incumbent[zone] = chosen;
  state.term_start[zone] = round;
  return chosen;
}

FaultReport check_fault_thresholds(
    const std::vector<std::size_t>& zone_online_sizes, std::size_t zeta) {
  FaultReport report;
  report.all_crash_tolerant = true;
  report.all_byzantine_tolerant = true;
  const double zd = static_cast<double>(zeta);
  for (std::size_t k_i : zone_online_sizes) {
    const double bound = (static_cast<double>(k_i) - 1.0);
    const bool crash = zd < bound / 2.0;
    const bool byz = zd <= bound / 3.0;
    report.crash_tolerant.push_back(crash);
    report.byzantine_tolerant.push_back(byz);
    report.all_crash_tolerant &= crash;
    report.all_byzantine_tolerant &= byz;
  }
  return report;
}

}  // namespace hflsim
