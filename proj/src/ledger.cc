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

#include "hflsim/ledger.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "hflsim/errors.h"

namespace hflsim {

std::string noise_site_name(NoiseSite s) {
  switch (s) {
    case NoiseSite::kClient: return "client";
    case NoiseSite::kSupernode: return "supernode";
    case NoiseSite::kAggregator: return "aggregator";
  }
  return "?";
}

void PrivacyLedger::set_site_classes(std::vector<LedgerSiteClass> classes) {
  classes_ = std::move(classes);
  accountants_.assign(classes_.size(), RdpAccountant());
}

void PrivacyLedger::add_round(int round, std::size_t class_idx, double q,
                              double z, double sigma, double sensitivity) {
  if (class_idx >= classes_.size())
    throw ConfigError("ledger: bad site class index");
  accountants_[class_idx].compose(q, z);
  entries_.push_back(
      {round, classes_[class_idx].site, sigma, q, z, sensitivity});
}

double PrivacyLedger::site_epsilon(std::size_t class_idx) const {
  return accountants_[class_idx].epsilon(delta_);
}

double PrivacyLedger::max_site_epsilon() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < classes_.size(); ++i)
    worst = std::max(worst, site_epsilon(i));
  return worst;
}

double PrivacyLedger::epsilon_at(HierLevel level) const {
  double total = 0.0;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (accountants_[i].rounds() == 0) continue;
    double fanin = 1.0;
    if (level == HierLevel::kSupernode) fanin = classes_[i].fanin_to_supernode;
    if (level == HierLevel::kAggregator)
      fanin = classes_[i].fanin_to_aggregator;
    total += site_epsilon(i) / std::sqrt(std::max(fanin, 1.0));
  }
  return total;
}

std::string PrivacyLedger::to_json() const {
  nlohmann::ordered_json j;
  j["delta"] = delta_;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    j["entries"].push_back({{"round", e.round},
                            {"site", noise_site_name(e.site)},
                            {"sigma", e.sigma},
                            {"q", e.q},
                            {"z", e.z},
                            {"sensitivity", e.sensitivity}});
  }
  j["epsilon"] = {{"client", epsilon_at(HierLevel::kClient)},
                  {"supernode", epsilon_at(HierLevel::kSupernode)},
                  {"aggregator", epsilon_at(HierLevel::kAggregator)}};
  return j.dump(2);
}

}  // namespace hflsim
