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

#include "hflsim/secure_agg.h"

#include <cmath>

#include "hflsim/errors.h"

namespace hflsim {

double FixedPointCodec::max_value() const {
  // 2^(63 - f) / 256: headroom so sums of up to 256 in-range addends
  // cannot wrap past the sign boundary.
  return std::ldexp(1.0, 63 - fraction_bits - 8);
}

std::uint64_t FixedPointCodec::encode(double x) const {
  if (!std::isfinite(x) || std::fabs(x) >= max_value()) {
    throw SaturationError("fixed-point saturation: |" + std::to_string(x) +
                          "| >= " + std::to_string(max_value()));
  }
  const long long fixed = std::llround(x * scale());
  return static_cast<std::uint64_t>(fixed);  // two's complement wrap
}

double FixedPointCodec::decode(std::uint64_t word) const {
  return static_cast<double>(static_cast<std::int64_t>(word)) / scale();
}

std::vector<MaskedShare> mask_shares(const std::vector<int>& client_ids,
                                     const std::vector<const ParamVector*>& updates,
                                     const FixedPointCodec& codec,
                                     const SeedTree& seeds, int round,
                                     std::size_t zone) {
  if (client_ids.size() != updates.size() || updates.empty())
    throw ConfigError("mask_shares: ids and updates must align");
  const std::size_t dim = updates[0]->size();

  std::vector<MaskedShare> shares(client_ids.size());
  for (std::size_t i = 0; i < client_ids.size(); ++i) {
    shares[i].client_id = client_ids[i];
    shares[i].words.resize(dim);
    for (std::size_t d = 0; d < dim; ++d)
      shares[i].words[d] = codec.encode(updates[i]->values[d]);
  }

  // Pair (i, j), i < j by position: both derive the same stream; i adds,
  // j subtracts, so the masks telescope out of the share sum.
  for (std::size_t i = 0; i + 1 < client_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < client_ids.size(); ++j) {
      Rng pair_rng = seeds.rng(Stream::kPairMask,
                               static_cast<std::uint64_t>(round),
                               static_cast<std::uint64_t>(client_ids[i]),
                               static_cast<std::uint64_t>(client_ids[j]));
      (void)zone;  // pair identity alone fixes the stream
      for (std::size_t d = 0; d < dim; ++d) {
        const std::uint64_t mask = pair_rng.next_u64();
        shares[i].words[d] += mask;
        shares[j].words[d] -= mask;
      }
    }
  }
  return shares;
}

ParamVector unmask_sum(const std::vector<MaskedShare>& shares,
                       const FixedPointCodec& codec,
                       const std::vector<LayerShape>& shape) {
  if (shares.empty()) throw ConfigError("unmask_sum: no shares");
  const std::size_t dim = shares[0].words.size();
  for (const auto& s : shares) {
    if (s.words.size() != dim)
      throw ConfigError("unmask_sum: incomplete share set");
  }
  std::vector<std::uint64_t> acc(dim, 0);
  for (const auto& s : shares) {
    for (std::size_t d = 0; d < dim; ++d) acc[d] += s.words[d];
  }
  ParamVector out;
  out.shape = shape;
  out.values.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) out.values[d] = codec.decode(acc[d]);
  ensure_finite(out, "unmask_sum");
  return out;
}

std::uint64_t secure_agg_message_count(std::size_t clients) {
  return static_cast<std::uint64_t>(clients) * (clients - 1) / 2;
}

}  // namespace hflsim
