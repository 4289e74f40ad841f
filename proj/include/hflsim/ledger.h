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

#ifndef HFLSIM_LEDGER_H_
#define HFLSIM_LEDGER_H_

#include <string>
#include <vector>

#include "hflsim/accountant.h"

namespace hflsim {

// Hierarchy levels, bottom-up.
enum class HierLevel { kClient = 0, kSupernode = 1, kAggregator = 2 };

// Where noise is injected.
enum class NoiseSite { kClient = 0, kSupernode = 1, kAggregator = 2 };

std::string noise_site_name(NoiseSite s);

// One noising population: all sites of one class share (q, z) and the
// fan-in counts used to amplify their epsilon at higher levels.
struct LedgerSiteClass {
  NoiseSite site = NoiseSite::kAggregator;
  // Count of noising sites of this class between the site and each level;
  // 1 disables amplification at that level (observer at/below the site).
  double fanin_to_supernode = 1.0;
  double fanin_to_aggregator = 1.0;
};

struct LedgerEntry {
  int round = 0;
  NoiseSite site = NoiseSite::kAggregator;
  double sigma = 0.0;
  double q = 1.0;
  double z = 0.0;
  double sensitivity = 0.0;
};

// Per-round privacy bookkeeping: a Renyi accountant per site class plus the
// lemma's fan-in amplification for level-wise reporting. Single-writer (the
// engine owns one ledger per run).
class PrivacyLedger {
 public:
  explicit PrivacyLedger(double delta = 1e-5) : delta_(delta) {}

  void set_site_classes(std::vector<LedgerSiteClass> classes);

  // Appends one round of the mechanism at class `idx` and composes it.
  void add_round(int round, std::size_t class_idx, double q, double z,
                 double sigma, double sensitivity);

  double delta() const { return delta_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  // Accountant epsilon of one site class, unamplified.
  double site_epsilon(std::size_t class_idx) const;
  // Worst (largest) site-class epsilon; the CSV "eps_site" column.
  double max_site_epsilon() const;
  // Sum over classes of site epsilon divided by sqrt(fan-in to `level`).
  double epsilon_at(HierLevel level) const;

  // JSON (string) serialization of entries plus cumulative per-level eps.
  std::string to_json() const;

 private:
  double delta_;
  std::vector<LedgerSiteClass> classes_;
  std::vector<RdpAccountant> accountants_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace hflsim

#endif  // HFLSIM_LEDGER_H_
