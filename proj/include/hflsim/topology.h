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

#ifndef HFLSIM_TOPOLOGY_H_
#define HFLSIM_TOPOLOGY_H_

#include <string>
#include <vector>

#include "hflsim/rng.h"

namespace hflsim {

// Zones partition the client set; client ids index client_sizes (n_k).
struct Topology {
  std::vector<std::size_t> client_sizes;        // n_k per client id
  std::vector<std::vector<int>> zones;          // zone -> sorted client ids

  std::size_t num_clients() const { return client_sizes.size(); }
  std::size_t num_zones() const { return zones.size(); }
  std::size_t zone_of(int client) const;

  std::string to_json() const;
  static Topology from_json(const std::string& text);
};

enum class ZoneAssignment { kEqual, kByList };

// Equal mode deals clients round-robin into zones (sizes m +- 1); by-list
// takes an explicit zone->clients mapping which must partition [0, n).
Topology build_topology(const std::vector<std::size_t>& client_sizes,
                        std::size_t num_zones, ZoneAssignment mode,
                        const std::vector<std::vector<int>>& explicit_zones = {});

// One round's view: online sets per zone, elected super-nodes, and online
// weight mass W per zone / global (filled by the engine).
struct RoundView {
  int round = 0;
  std::vector<std::vector<int>> online;  // per zone, sorted client ids
  std::vector<int> supernode;            // -1 while unelected / inactive
  std::vector<double> zone_weight;       // W_i = sum w_k over online
  double total_weight = 0.0;

  std::size_t total_online() const;
  bool zone_active(std::size_t zone) const { return !online[zone].empty(); }
  bool any_active() const;
};

// Independent Bernoulli(q) per client. A zone with no online clients is
// simply left empty (inactive for the round).
RoundView sample_online(const Topology& topo, double q, Rng& rng);

// Fixed-size alternative: k clients drawn uniformly without replacement
// across the whole population.
RoundView sample_fixed_k(const Topology& topo, std::size_t k, Rng& rng);

// Seed-tree-keyed variants. Bernoulli draws are keyed per (round, client)
// and the fixed-k shuffle per round, so the online sets do not depend on
// the zone layout — a flat and a zoned run over the same clients sample
// identically.
RoundView sample_online_keyed(const Topology& topo, double q,
                              const SeedTree& seeds, int round);
RoundView sample_fixed_k_keyed(const Topology& topo, std::size_t k,
                               const SeedTree& seeds, int round);

// Super-node persistence: the incumbent stays "in power" while online.
struct ElectionState {
  std::vector<int> incumbent;    // -1 = none
  std::vector<int> term_start;

  explicit ElectionState(std::size_t zones = 0)
      : incumbent(zones, -1), term_start(zones, -1) {}
};

// Returns the zone's super-node for this round: the incumbent if online,
// otherwise a uniformly random online client (recorded as new incumbent).
// Returns -1 for an empty online set.
int elect_supernode(const std::vector<int>& zone_online, std::size_t zone,
                    int round, ElectionState& state, Rng& rng);

struct FaultReport {
  // Worst-case placement: all zeta adversaries land in the probed zone.
  std::vector<bool> crash_tolerant;      // zeta < (k_i - 1) / 2
  std::vector<bool> byzantine_tolerant;  // zeta <= (k_i - 1) / 3
  bool all_crash_tolerant = false;
  bool all_byzantine_tolerant = false;
};

FaultReport check_fault_thresholds(const std::vector<std::size_t>& zone_online_sizes,
                                   std::size_t zeta);

}  // namespace hflsim

#endif  // HFLSIM_TOPOLOGY_H_
