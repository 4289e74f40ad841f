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

#ifndef HFLSIM_SECURE_AGG_H_
#define HFLSIM_SECURE_AGG_H_

#include <cstdint>
#include <vector>

#include "hflsim/param_vector.h"
#include "hflsim/rng.h"

namespace hflsim {

// Fixed-point encoding over Z_2^64 so pairwise masks cancel exactly in
// modular arithmetic (real-valued masks would leak through floating-point
// non-associativity). Round-trip error is <= 2^-f per coordinate.
struct FixedPointCodec {
  int fraction_bits = 24;

  double scale() const { return static_cast<double>(std::uint64_t{1} << fraction_bits); }
  // Values must stay below this for the decoded sum to be wrap-free with
  // headroom for 256 addends.
  double max_value() const;

  // Throws SaturationError outside the representable range.
  std::uint64_t encode(double x) const;
  double decode(std::uint64_t word) const;
};

// One client's masked, fixed-point-encoded update.
struct MaskedShare {
  int client_id = 0;
  std::vector<std::uint64_t> words;
};

// Pairwise masking within one zone: each ordered pair (i < j) derives a
// shared mask stream from the seed tree; i adds it, j subtracts it. The sum
// of all shares telescopes to the sum of the encoded updates. A single
// client degenerates to plaintext encoding.
//
// client_ids must be sorted and aligned with `updates`.
std::vector<MaskedShare> mask_shares(const std::vector<int>& client_ids,
                                     const std::vector<const ParamVector*>& updates,
                                     const FixedPointCodec& codec,
                                     const SeedTree& seeds, int round,
                                     std::size_t zone);

// Modular sum of a complete share set, decoded to reals with the given
// layer shape. Throws ConfigError on an empty or length-mismatched set.
ParamVector unmask_sum(const std::vector<MaskedShare>& shares,
                       const FixedPointCodec& codec,
                       const std::vector<LayerShape>& shape);

// Messages exchanged for one zone of c clients: c(c-1)/2 pairwise channels.
std::uint64_t secure_agg_message_count(std::size_t clients);

}  // namespace hflsim

#endif  // HFLSIM_SECURE_AGG_H_
