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

#ifndef HFLSIM_RNG_H_
#define HFLSIM_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace hflsim {

// Deterministic random source. Distributions are hand-rolled on top of
// mt19937_64 so that streams are bit-identical across standard libraries
// (std::normal_distribution et al. are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53 significant bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Stream tags for seed derivation. Values are part of the reproducibility
// contract: changing one reshuffles every run keyed on it.
enum class Stream : std::uint64_t {
  kDataset = 1,
  kBlobCenters = 2,
  kPartition = 3,
  kModelInit = 4,
  kOnline = 5,
  kOnlineFixedK = 6,
  kLocalTrain = 7,
  kElection = 8,
  kPairMask = 9,
  kClientNoise = 10,
  kZoneNoise = 11,
  kAggregatorNoise = 12,
  kAttack = 13,
};

// Derives independent RNG streams from (master, stream, a, b, c).
// Every random decision in a run is keyed by logical coordinates (round,
// client, zone, ...), never by execution order, so results are identical
// under any thread count and any zone layout.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  std::uint64_t derive(Stream s, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) const;

  Rng rng(Stream s, std::uint64_t a = 0, std::uint64_t b = 0,
          std::uint64_t c = 0) const {
    return Rng(derive(s, a, b, c));
  }

 private:
  std::uint64_t master_;
};

}  // namespace hflsim

#endif  // HFLSIM_RNG_H_
