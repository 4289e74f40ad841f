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

#include "hflsim/engine.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <thread>

#include "hflsim/errors.h"
#include "hflsim/secure_agg.h"

namespace hflsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLossCeiling = 1e6;

// Runs fn(0..n-1) on up to worker_threads() threads. Tasks must only touch
// their own slots; results are combined by the caller in index order, so the
// outcome is identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_threads(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::once_flag error_once;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::call_once(error_once, [&] { error = std::current_exception(); });
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ClientResult {
  double pre_loss = 0.0;
  double weight = 0.0;
  ParamVector clean;   // clipped update
  ParamVector noised;  // + LDP noise when the client noises
};

// Number of leading zones whose clients run LDP (C3/C7 beta fraction).
std::size_t ldp_zone_count(const ExperimentConfig& cfg) {
  if (cfg.dp.placement == Placement::kC3 ||
      cfg.dp.placement == Placement::kC7) {
    return static_cast<std::size_t>(
        std::llround(cfg.dp.beta * static_cast<double>(cfg.topo.zones)));
  }
  return 0;
}

// Zones whose super-node adds HDP noise start after the LDP zones.
std::size_t hdp_zone_count(const ExperimentConfig& cfg) {
  const double s = static_cast<double>(cfg.topo.zones);
  switch (cfg.dp.placement) {
    case Placement::kC2: return cfg.topo.zones;
    case Placement::kC3:
      return cfg.topo.zones - ldp_zone_count(cfg);
    case Placement::kC6:
      return static_cast<std::size_t>(std::llround(cfg.dp.beta * s));
    case Placement::kC7:
      return static_cast<std::size_t>(std::llround(cfg.dp.alpha * s));
    default: return 0;
  }
}

bool client_noises(const ExperimentConfig& cfg, std::size_t zone, int client) {
  switch (cfg.dp.placement) {
    case Placement::kC1: return true;
    case Placement::kC3:
    case Placement::kC7: return zone < ldp_zone_count(cfg);
    case Placement::kC5:
      return client < std::llround(cfg.dp.alpha *
                                   static_cast<double>(cfg.topo.clients));
    default: return false;
  }
}

bool zone_noises(const ExperimentConfig& cfg, std::size_t zone) {
  switch (cfg.dp.placement) {
    case Placement::kC2: return true;
    case Placement::kC3: return zone >= ldp_zone_count(cfg);
    case Placement::kC6: return zone < hdp_zone_count(cfg);
    case Placement::kC7: {
      const std::size_t lo = ldp_zone_count(cfg);
      return zone >= lo && zone < lo + hdp_zone_count(cfg);
    }
    default: return false;
  }
}

bool dp_enabled(const ExperimentConfig& cfg) {
  return cfg.dp.placement != Placement::kNone && cfg.dp.z > 0.0;
}

// Site classes with the Table-1 fan-in counts for level-wise reporting.
struct LedgerPlan {
  std::vector<LedgerSiteClass> classes;
  int client_class = -1;
  int supernode_class = -1;
  int aggregator_class = -1;
};

LedgerPlan make_ledger_plan(const ExperimentConfig& cfg) {
  LedgerPlan plan;
  if (!dp_enabled(cfg)) return plan;
  const double k = cfg.topo.expected_online();
  const double s = static_cast<double>(cfg.topo.zones);
  const double m = static_cast<double>(cfg.topo.clients) / s;
  const double a = cfg.dp.alpha;
  const double b = cfg.dp.beta;
  const Placement p = cfg.dp.placement;

  auto add = [&](NoiseSite site, double to_sn, double to_agg) {
    plan.classes.push_back({site, std::max(to_sn, 1.0), std::max(to_agg, 1.0)});
    return static_cast<int>(plan.classes.size() - 1);
  };

  if (placement_noises_clients(p)) {
    double to_agg = k;
    if (p == Placement::kC3 || p == Placement::kC7) to_agg = b * s * m;
    if (p == Placement::kC5) to_agg = a * k;
    if (to_agg > 0.0)
      plan.client_class = add(NoiseSite::kClient, k / s, to_agg);
  }
  if (placement_noises_supernodes(p)) {
    double to_agg = s;
    if (p == Placement::kC3) to_agg = (1.0 - b) * s;
    if (p == Placement::kC6) to_agg = b * s;
    if (p == Placement::kC7) to_agg = a * s;
    if (to_agg > 0.0)
      plan.supernode_class = add(NoiseSite::kSupernode, 1.0, to_agg);
  }
  if (placement_noises_aggregator(p)) {
    plan.aggregator_class = add(NoiseSite::kAggregator, 1.0, 1.0);
  }
  return plan;
}

double averaging_denominator(const ExperimentConfig& cfg, double q,
                             double realized_w, double population_w) {
  if (cfg.dp.clip.kind == ClipKind::kPerLayer) {
    // Alg.1 line 12, per-layer branch: max(q * W_min, sum of sampled w_k).
    return std::max(q * cfg.dp.w_min, realized_w);
  }
  switch (cfg.engine.denominator) {
    case DenominatorMode::kRealized: return q * realized_w;
    case DenominatorMode::kExpected: return q * population_w;
    case DenominatorMode::kPlain: return realized_w;
  }
  return q * realized_w;
}

// Noise stddev at a site whose averaged output used denominator `denom`.
double site_sigma(const ExperimentConfig& cfg, double q, double denom) {
  const double s = cfg.dp.clip.sensitivity_bound();
  if (cfg.dp.clip.kind == ClipKind::kPerLayer)
    return 2.0 * cfg.dp.z * s / (q * cfg.dp.w_min);
  return cfg.dp.z * s / denom;
}

ClientResult local_update(const ExperimentConfig& cfg, const SeedTree& tree,
                          const ParamVector& theta, const LabeledBatch& shard,
                          int round, int client, std::size_t zone) {
  ClientResult res;
  res.weight = user_weight(static_cast<double>(shard.size()), cfg.dp.user_cap);
  res.pre_loss = forward_loss(cfg.model, theta, shard).first;
  if (!std::isfinite(res.pre_loss) || res.pre_loss > kLossCeiling) {
    throw DivergenceError("round " + std::to_string(round) + ", client " +
                          std::to_string(client) + ": loss " +
                          std::to_string(res.pre_loss));
  }
  Rng rng = tree.rng(Stream::kLocalTrain, static_cast<std::uint64_t>(round),
                     static_cast<std::uint64_t>(client));
  const ParamVector trained =
      sgd_epochs(cfg.model, theta, shard, cfg.engine.client_lr,
                 cfg.engine.local_epochs, cfg.engine.batch_size, rng);
  ParamVector update = trained - theta;
  if (cfg.dp.placement != Placement::kNone &&
      cfg.dp.clip.kind != ClipKind::kNone) {
    update = clip(update, cfg.dp.clip);
  }
  res.clean = update;
  if (dp_enabled(cfg) && client_noises(cfg, zone, client)) {
    const double sigma_c = cfg.dp.z * cfg.dp.clip.sensitivity_bound();
    Rng nrng = tree.rng(Stream::kClientNoise, static_cast<std::uint64_t>(round),
                        static_cast<std::uint64_t>(client));
    ParamVector noise = gaussian_noise(update.size(), sigma_c, nrng);
    noise.shape = update.shape;
    update += noise;
  }
  res.noised = update;
  return res;
}

struct RoundSetup {
  RoundView view;
  std::vector<std::pair<std::size_t, int>> tasks;  // (zone, client), ordered
  std::vector<double> population_zone_weight;
  double population_total_weight = 0.0;
};

RoundSetup sample_round(const ExperimentConfig& cfg, const Topology& topo,
                        const SeedTree& tree, int round,
                        const std::vector<double>& weights) {
  RoundSetup setup;
  if (cfg.topo.sampling == "fixed_k") {
    setup.view = sample_fixed_k_keyed(topo, cfg.topo.k, tree, round);
  } else {
    setup.view = sample_online_keyed(topo, cfg.topo.q, tree, round);
  }
  setup.view.round = round;
  setup.population_zone_weight.assign(topo.num_zones(), 0.0);
  for (std::size_t z = 0; z < topo.num_zones(); ++z) {
    for (int c : topo.zones[z])
      setup.population_zone_weight[z] += weights[c];
    setup.population_total_weight += setup.population_zone_weight[z];
    for (int c : setup.view.online[z]) {
      setup.view.zone_weight[z] += weights[c];
      setup.tasks.emplace_back(z, c);
    }
    setup.view.total_weight += setup.view.zone_weight[z];
  }
  return setup;
}

double record_eps_agg(const ExperimentConfig& cfg, const PrivacyLedger& ledger) {
  if (cfg.dp.placement == Placement::kNone || !dp_enabled(cfg)) return kInf;
  return ledger.epsilon_at(HierLevel::kAggregator);
}

double record_eps_site(const ExperimentConfig& cfg,
                       const PrivacyLedger& ledger) {
  if (cfg.dp.placement == Placement::kNone || !dp_enabled(cfg)) return kInf;
  return ledger.max_site_epsilon();
}

void evaluate_round(const ExperimentConfig& cfg, const ParamVector& theta,
                    const LabeledBatch& eval_batch, RoundRecord& rec) {
  const auto [loss, acc] = forward_loss(cfg.model, theta, eval_batch);
  rec.val_loss = loss;
  rec.val_acc = acc;
  if (!std::isfinite(loss) || loss > kLossCeiling) {
    throw DivergenceError("round " + std::to_string(rec.round) +
                          ": validation loss " + std::to_string(loss));
  }
}

}  // namespace

double TopoSpec::selection_probability() const {
  if (sampling == "fixed_k")
    return static_cast<double>(k) / static_cast<double>(clients);
  return q;
}

double TopoSpec::expected_online() const {
  if (sampling == "fixed_k") return static_cast<double>(k);
  return q * static_cast<double>(clients);
}

void ExperimentConfig::validate() const {
  model.validate();
  dp.validate();
  if (engine.rounds < 1) throw ConfigError("engine.rounds must be >= 1");
  if (engine.local_epochs < 0)
    throw ConfigError("engine.local_epochs must be >= 0");
  if (!(engine.server_lr > 0.0))
    throw ConfigError("engine.server_lr must be > 0");
  if (engine.client_lr < 0.0)
    throw ConfigError("engine.client_lr must be >= 0");
  if (engine.batch_size == 0) throw ConfigError("engine.batch_size must be >= 1");
  if (topo.clients == 0) throw ConfigError("topo.clients must be >= 1");
  if (topo.zones == 0 || topo.zones > topo.clients)
    throw ConfigError("need 1 <= topo.zones <= topo.clients");
  if (topo.sampling == "fixed_k") {
    if (topo.k == 0 || topo.k > topo.clients)
      throw ConfigError("fixed_k sampling needs 1 <= topo.k <= topo.clients");
  } else if (topo.sampling == "bernoulli") {
    if (!(topo.q > 0.0 && topo.q <= 1.0))
      throw ConfigError("topo.q must be in (0, 1]");
  } else {
    throw ConfigError("unknown topo.sampling: " + topo.sampling);
  }
  if (data.kind != "blobs" && data.kind != "csv")
    throw ConfigError("unknown data.kind: " + data.kind);
  if (data.partition != "iid" && data.partition != "label_skew")
    throw ConfigError("unknown data.partition: " + data.partition);
  if (dp.placement != Placement::kNone && dp.z > 0.0 &&
      dp.clip.kind == ClipKind::kNone)
    throw ConfigError("DP noise requires a clipping mode (dp.clip_mode)");
}

unsigned worker_threads() {
  const char* env = std::getenv("HFLSIM_THREADS");
  if (env != nullptr) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  const SeedTree tree(cfg.seed);
  LabeledBatch all;
  if (cfg.data.kind == "csv") {
    all = load_csv_dataset(cfg.data.csv_path);
  } else {
    Rng rng = tree.rng(Stream::kDataset);
    all = gen_blobs(cfg.data.classes, cfg.data.dim, cfg.data.per_class,
                    cfg.data.separation, rng);
  }
  PreparedData out;
  auto [train, val] = split_train_val(all, cfg.data.val_fraction);
  out.train = std::move(train);
  out.val = std::move(val);
  Rng prng = tree.rng(Stream::kPartition);
  out.partition =
      cfg.data.partition == "label_skew"
          ? partition_label_skew(out.train, cfg.topo.clients,
                                 cfg.data.dirichlet_alpha, prng)
          : partition_iid(out.train, cfg.topo.clients, prng);
  return out;
}

RunResult run_flat(const ExperimentConfig& cfg, RunTrace* trace) {
  cfg.validate();
  if (cfg.dp.placement != Placement::kNone &&
      cfg.dp.placement != Placement::kC1 &&
      cfg.dp.placement != Placement::kC4) {
    throw ConfigError("run_flat supports placements none, C1 and C4 only");
  }
  const SeedTree tree(cfg.seed);
  const PreparedData data = prepare_data(cfg);
  const LabeledBatch& eval_batch = data.val.empty() ? data.train : data.val;

  // One implicit zone holding everybody; sampling streams are keyed per
  // client so the hierarchical run sees the identical online sets.
  std::vector<std::size_t> sizes = data.partition.sizes;
  ExperimentConfig flat_cfg = cfg;
  flat_cfg.topo.zones = 1;
  const Topology topo =
      build_topology(sizes, 1, ZoneAssignment::kEqual);

  std::vector<double> weights(cfg.topo.clients);
  for (std::size_t c = 0; c < weights.size(); ++c)
    weights[c] = user_weight(static_cast<double>(sizes[c]), cfg.dp.user_cap);

  Rng init_rng = tree.rng(Stream::kModelInit);
  ParamVector theta = cfg.model.init_params(init_rng);

  RunResult result;
  const LedgerPlan plan = make_ledger_plan(flat_cfg);
  result.ledger = PrivacyLedger(cfg.dp.delta);
  result.ledger.set_site_classes(plan.classes);

  const double q = cfg.topo.selection_probability();

  for (int t = 0; t < cfg.engine.rounds; ++t) {
    const RoundSetup setup = sample_round(flat_cfg, topo, tree, t, weights);
    RoundRecord rec;
    rec.round = t;
    rec.zones = 1;
    rec.k_online = setup.view.total_online();
    rec.zone_online_counts = {rec.k_online};
    rec.supernodes = {-1};

    TraceRound tr;
    if (trace != nullptr && trace->level != TraceLevel::kOff)
      tr.params_before = theta;

    if (rec.k_online == 0) {
      rec.skipped = true;
      evaluate_round(cfg, theta, eval_batch, rec);
      rec.eps_aggregator = record_eps_agg(cfg, result.ledger);
      rec.eps_site = record_eps_site(cfg, result.ledger);
      result.rounds.push_back(std::move(rec));
      if (trace != nullptr && trace->level != TraceLevel::kOff) {
        tr.global_update = ParamVector::zeros_like(theta);
        trace->rounds.push_back(std::move(tr));
      }
      continue;
    }

    std::vector<ClientResult> results(setup.tasks.size());
    parallel_for(setup.tasks.size(), [&](std::size_t i) {
      const auto [zone, client] = setup.tasks[i];
      results[i] = local_update(
          flat_cfg, tree, theta, data.partition.client_datasets[client], t,
          client, zone);
    });

    const double denom = averaging_denominator(
        flat_cfg, q, setup.view.total_weight, setup.population_total_weight);
    ParamVector numerator = ParamVector::zeros_like(theta);
    double train_loss = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      numerator.axpy(results[i].weight, results[i].noised);
      train_loss += results[i].weight * results[i].pre_loss;
    }
    rec.train_loss =
        setup.view.total_weight > 0.0 ? train_loss / setup.view.total_weight
                                      : 0.0;

    ParamVector update = numerator * (1.0 / denom);
    ParamVector agg_noise;
    if (dp_enabled(cfg) && placement_noises_aggregator(cfg.dp.placement)) {
      const double sigma = site_sigma(flat_cfg, q, denom);
      Rng nrng = tree.rng(Stream::kAggregatorNoise,
                          static_cast<std::uint64_t>(t));
      agg_noise = gaussian_noise(update.size(), sigma, nrng);
      agg_noise.shape = update.shape;
      update += agg_noise;
      result.ledger.add_round(t, plan.aggregator_class, q, cfg.dp.z, sigma,
                              cfg.dp.clip.sensitivity_bound());
    }
    if (dp_enabled(cfg) && placement_noises_clients(cfg.dp.placement)) {
      const double sigma_c = cfg.dp.z * cfg.dp.clip.sensitivity_bound();
      result.ledger.add_round(t, plan.client_class, q, cfg.dp.z, sigma_c,
                              cfg.dp.clip.sensitivity_bound());
    }

    theta.axpy(cfg.engine.server_lr, update);
    ensure_finite(theta, "run_flat");
    evaluate_round(cfg, theta, eval_batch, rec);
    rec.eps_aggregator = record_eps_agg(cfg, result.ledger);
    rec.eps_site = record_eps_site(cfg, result.ledger);
    result.rounds.push_back(rec);

    if (trace != nullptr && trace->level != TraceLevel::kOff) {
      tr.global_update = update;
      if (trace->level == TraceLevel::kFull) {
        tr.zone_ids = {0};
        tr.zone_denom = {denom};
        tr.zone_combine_weight = {1.0};
        tr.zone_sum = {numerator};
        tr.zone_noise = {ParamVector::zeros_like(theta)};
        tr.aggregator_noise = agg_noise;
        for (std::size_t i = 0; i < results.size(); ++i) {
          tr.client_ids.push_back(setup.tasks[i].second);
          tr.client_zone.push_back(0);
          tr.client_weight.push_back(results[i].weight);
          tr.client_update_clean.push_back(results[i].clean);
          tr.client_update_noised.push_back(results[i].noised);
        }
      }
      trace->rounds.push_back(std::move(tr));
    }
  }

  result.final_params = std::move(theta);
  result.final_val_acc = result.rounds.back().val_acc;
  result.final_val_loss = result.rounds.back().val_loss;
  return result;
}

RunResult run_hier(const ExperimentConfig& cfg, RunTrace* trace) {
  cfg.validate();
  const SeedTree tree(cfg.seed);
  const PreparedData data = prepare_data(cfg);
  const LabeledBatch& eval_batch = data.val.empty() ? data.train : data.val;

  const Topology topo = build_topology(data.partition.sizes, cfg.topo.zones,
                                       ZoneAssignment::kEqual);
  std::vector<double> weights(cfg.topo.clients);
  for (std::size_t c = 0; c < weights.size(); ++c)
    weights[c] =
        user_weight(static_cast<double>(data.partition.sizes[c]), cfg.dp.user_cap);

  Rng init_rng = tree.rng(Stream::kModelInit);
  ParamVector theta = cfg.model.init_params(init_rng);

  RunResult result;
  const LedgerPlan plan = make_ledger_plan(cfg);
  result.ledger = PrivacyLedger(cfg.dp.delta);
  result.ledger.set_site_classes(plan.classes);

  ElectionState election(cfg.topo.zones);
  const double q = cfg.topo.selection_probability();
  const FixedPointCodec codec;
  bool warned_single_client = false;

  for (int t = 0; t < cfg.engine.rounds; ++t) {
    const RoundSetup setup = sample_round(cfg, topo, tree, t, weights);
    RoundRecord rec;
    rec.round = t;
    rec.zones = cfg.topo.zones;
    rec.k_online = setup.view.total_online();
    rec.supernodes.assign(cfg.topo.zones, -1);

    for (std::size_t z = 0; z < cfg.topo.zones; ++z) {
      rec.zone_online_counts.push_back(setup.view.online[z].size());
      Rng erng = tree.rng(Stream::kElection, static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(z));
      rec.supernodes[z] =
          elect_supernode(setup.view.online[z], z, t, election, erng);
    }

    TraceRound tr;
    tr.secure_agg = cfg.engine.secure_agg;
    if (trace != nullptr && trace->level != TraceLevel::kOff)
      tr.params_before = theta;

    if (!setup.view.any_active()) {
      rec.skipped = true;
      evaluate_round(cfg, theta, eval_batch, rec);
      rec.eps_aggregator = record_eps_agg(cfg, result.ledger);
      rec.eps_site = record_eps_site(cfg, result.ledger);
      result.rounds.push_back(std::move(rec));
      if (trace != nullptr && trace->level != TraceLevel::kOff) {
        tr.global_update = ParamVector::zeros_like(theta);
        trace->rounds.push_back(std::move(tr));
      }
      continue;
    }

    std::vector<ClientResult> results(setup.tasks.size());
    parallel_for(setup.tasks.size(), [&](std::size_t i) {
      const auto [zone, client] = setup.tasks[i];
      results[i] =
          local_update(cfg, tree, theta, data.partition.client_datasets[client],
                       t, client, zone);
    });

    // Zonal aggregation, zone id order.
    ParamVector combined = ParamVector::zeros_like(theta);
    double train_loss = 0.0;
    bool any_zone_noised = false;
    double first_zone_sigma = 0.0;
    std::size_t task_pos = 0;
    for (std::size_t z = 0; z < cfg.topo.zones; ++z) {
      const auto& online = setup.view.online[z];
      if (online.empty()) continue;

      std::vector<const ParamVector*> term_ptrs;
      std::vector<ParamVector> terms;  // w_k * noised update
      terms.reserve(online.size());
      std::vector<int> ids;
      for (std::size_t j = 0; j < online.size(); ++j, ++task_pos) {
        const ClientResult& cr = results[task_pos];
        train_loss += cr.weight * cr.pre_loss;
        terms.push_back(cr.noised * cr.weight);
        ids.push_back(online[j]);
      }

      ParamVector zone_numerator = ParamVector::zeros_like(theta);
      if (cfg.engine.secure_agg) {
        if (online.size() == 1 && !warned_single_client) {
          std::cerr << "hflsim: zone with a single online client degrades "
                       "secure aggregation to plaintext\n";
          warned_single_client = true;
        }
        for (const auto& term : terms) term_ptrs.push_back(&term);
        const auto shares =
            mask_shares(ids, term_ptrs, codec, tree, t, z);
        zone_numerator = unmask_sum(shares, codec, theta.shape);
        rec.secureagg_msgs += secure_agg_message_count(online.size());
      } else {
        for (const auto& term : terms) zone_numerator += term;
      }

      const double denom = averaging_denominator(
          cfg, q, setup.view.zone_weight[z], setup.population_zone_weight[z]);
      ParamVector zone_avg = zone_numerator * (1.0 / denom);

      ParamVector znoise = ParamVector::zeros_like(theta);
      if (dp_enabled(cfg) && zone_noises(cfg, z)) {
        const double sigma = site_sigma(cfg, q, denom);
        Rng nrng = tree.rng(Stream::kZoneNoise, static_cast<std::uint64_t>(t),
                            static_cast<std::uint64_t>(z));
        znoise = gaussian_noise(theta.size(), sigma, nrng);
        znoise.shape = theta.shape;
        zone_avg += znoise;
        if (!any_zone_noised) first_zone_sigma = sigma;
        any_zone_noised = true;
      }

      const double combine_w =
          cfg.engine.zone_combine == ZoneCombine::kUniform
              ? 1.0 / static_cast<double>(cfg.topo.zones)
              : setup.view.zone_weight[z] / setup.view.total_weight;
      combined.axpy(combine_w, zone_avg);

      if (trace != nullptr && trace->level == TraceLevel::kFull) {
        tr.zone_ids.push_back(static_cast<int>(z));
        tr.zone_sum.push_back(std::move(zone_numerator));
        tr.zone_denom.push_back(denom);
        tr.zone_noise.push_back(std::move(znoise));
        tr.zone_combine_weight.push_back(combine_w);
        for (std::size_t j = 0; j < ids.size(); ++j) {
          tr.client_ids.push_back(ids[j]);
          tr.client_zone.push_back(static_cast<int>(z));
          const std::size_t pos = task_pos - ids.size() + j;
          tr.client_weight.push_back(results[pos].weight);
          tr.client_update_clean.push_back(results[pos].clean);
          tr.client_update_noised.push_back(results[pos].noised);
        }
      }
    }
    rec.train_loss =
        setup.view.total_weight > 0.0 ? train_loss / setup.view.total_weight
                                      : 0.0;

    ParamVector agg_noise;
    if (dp_enabled(cfg) && placement_noises_aggregator(cfg.dp.placement)) {
      const double global_denom = averaging_denominator(
          cfg, q, setup.view.total_weight, setup.population_total_weight);
      const double sigma = site_sigma(cfg, q, global_denom);
      Rng nrng =
          tree.rng(Stream::kAggregatorNoise, static_cast<std::uint64_t>(t));
      agg_noise = gaussian_noise(theta.size(), sigma, nrng);
      agg_noise.shape = theta.shape;
      combined += agg_noise;
      result.ledger.add_round(t, plan.aggregator_class, q, cfg.dp.z, sigma,
                              cfg.dp.clip.sensitivity_bound());
    }
    if (dp_enabled(cfg) && plan.client_class >= 0) {
      const double sigma_c = cfg.dp.z * cfg.dp.clip.sensitivity_bound();
      result.ledger.add_round(t, plan.client_class, q, cfg.dp.z, sigma_c,
                              cfg.dp.clip.sensitivity_bound());
    }
    if (dp_enabled(cfg) && plan.supernode_class >= 0 && any_zone_noised) {
      result.ledger.add_round(t, plan.supernode_class, q, cfg.dp.z,
                              first_zone_sigma,
                              cfg.dp.clip.sensitivity_bound());
    }

    theta.axpy(cfg.engine.server_lr, combined);
    ensure_finite(theta, "run_hier");
    evaluate_round(cfg, theta, eval_batch, rec);
    rec.eps_aggregator = record_eps_agg(cfg, result.ledger);
    rec.eps_site = record_eps_site(cfg, result.ledger);
    result.rounds.push_back(rec);

    if (trace != nullptr && trace->level != TraceLevel::kOff) {
      tr.global_update = combined;
      tr.aggregator_noise = agg_noise;
      trace->rounds.push_back(std::move(tr));
    }
  }

  result.final_params = std::move(theta);
  result.final_val_acc = result.rounds.back().val_acc;
  result.final_val_loss = result.rounds.back().val_loss;
  return result;
}

std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw ConfigError("sweep: no configurations");
  std::vector<SweepRow> rows(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    rows[i].cfg = configs[i];
    try {
      const RunResult res = configs[i].topo.zones <= 1
                                ? run_flat(configs[i])
                                : run_hier(configs[i]);
      rows[i].ok = true;
      rows[i].final_acc = res.final_val_acc;
      rows[i].final_val_loss = res.final_val_loss;
      rows[i].eps_aggregator = res.rounds.back().eps_aggregator;
      rows[i].eps_site = res.rounds.back().eps_site;
    } catch (const std::exception& e) {
      rows[i].ok = false;
      rows[i].error = e.what();
    }
  }
  return rows;
}

}  // namespace hflsim
