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

#ifndef HFLSIM_ENGINE_H_
#define HFLSIM_ENGINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hflsim/datagen.h"
#include "hflsim/dpcore.h"
#include "hflsim/ledger.h"
#include "hflsim/model.h"
#include "hflsim/topology.h"

namespace hflsim {

struct DataSpec {
  std::string kind = "blobs";  // blobs | csv
  int classes = 10;
  int dim = 32;
  int per_class = 200;
  double separation = 4.0;
  std::string partition = "iid";  // iid | label_skew
  double dirichlet_alpha = 0.5;
  std::string csv_path;
  double val_fraction = 0.2;
};

struct TopoSpec {
  std::size_t clients = 100;
  std::size_t zones = 1;
  std::string sampling = "bernoulli";  // bernoulli | fixed_k
  double q = 1.0;
  std::size_t k = 0;  // fixed_k sample size

  // q for the Alg.1 formulas and the accountant; fixed_k uses k/n.
  double selection_probability() const;
  // Expected online count (fan-in bookkeeping).
  double expected_online() const;
};

enum class ZoneCombine { kUniform, kWeighted };

// Alg.1 line 12 flat-clip denominator semantics (see README):
//   kRealized: q * (sum of sampled w_k)     -- the pseudocode, default
//   kExpected: q * (sum of population w_k)
//   kPlain:    sum of sampled w_k
enum class DenominatorMode { kRealized, kExpected, kPlain };

struct EngineSpec {
  int rounds = 1;
  int local_epochs = 1;
  double client_lr = 0.02;
  double server_lr = 1.0;
  std::size_t batch_size = 32;
  ZoneCombine zone_combine = ZoneCombine::kWeighted;
  DenominatorMode denominator = DenominatorMode::kRealized;
  bool secure_agg = false;
};

struct ExperimentConfig {
  Model model;
  DataSpec data;
  TopoSpec topo;
  DpPolicy dp;
  EngineSpec engine;
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-round metrics.
struct RoundRecord {
  int round = 0;
  std::size_t zones = 0;
  std::size_t k_online = 0;
  std::vector<std::size_t> zone_online_counts;
  std::vector<int> supernodes;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double eps_aggregator = 0.0;
  double eps_site = 0.0;
  std::uint64_t secureagg_msgs = 0;
  bool skipped = false;
};

// Everything an omniscient observer could record about one round; the
// attacks module filters this down to what each adversary level may see.
struct TraceRound {
  ParamVector params_before;
  ParamVector global_update;  // as applied (noise included, before server lr)
  std::vector<int> client_ids;
  std::vector<int> client_zone;
  std::vector<double> client_weight;
  std::vector<ParamVector> client_update_clean;   // clipped, pre-noise
  std::vector<ParamVector> client_update_noised;  // + LDP noise if any
  std::vector<int> zone_ids;                       // active zones
  std::vector<ParamVector> zone_sum;               // sum_k w_k * noised_k
  std::vector<double> zone_denom;
  std::vector<ParamVector> zone_noise;             // HDP noise vectors
  std::vector<double> zone_combine_weight;
  ParamVector aggregator_noise;                    // empty when none
  bool secure_agg = false;
};

enum class TraceLevel { kOff, kParamsOnly, kFull };

struct RunTrace {
  TraceLevel level = TraceLevel::kOff;
  std::vector<TraceRound> rounds;
};

struct RunResult {
  ParamVector final_params;
  std::vector<RoundRecord> rounds;
  PrivacyLedger ledger;
  double final_val_acc = 0.0;
  double final_val_loss = 0.0;
};

// Dataset, validation split and per-client shards for a config; streams
// are keyed only on the seed so flat and hierarchical runs see identical
// data.
struct PreparedData {
  LabeledBatch train;
  LabeledBatch val;
  Partition partition;
};

PreparedData prepare_data(const ExperimentConfig& cfg);

// Flat FedAvg baseline (no zones, no election, no secure aggregation).
// Supports placements none, C1 (pure LDP) and C4 (pure CDP).
RunResult run_flat(const ExperimentConfig& cfg, RunTrace* trace = nullptr);

// The hierarchical protocol: per-zone sampling, election, zonal weighted
// averaging, noise at the placement's sites, global combine.
RunResult run_hier(const ExperimentConfig& cfg, RunTrace* trace = nullptr);

struct SweepRow {
  ExperimentConfig cfg;
  bool ok = false;
  std::string error;
  double final_acc = 0.0;
  double final_val_loss = 0.0;
  double eps_aggregator = 0.0;
  double eps_site = 0.0;
};

// Runs every config (flat when zones == 1, hierarchical otherwise);
// individual failures are recorded and the sweep continues.
std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs);

// Worker cap from HFLSIM_THREADS (0 / unset = hardware concurrency).
unsigned worker_threads();

}  // namespace hflsim

#endif  // HFLSIM_ENGINE_H_
