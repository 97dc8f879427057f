//
// Copyright 2026 The dpstrat Authors
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
//

#ifndef DPSTRAT_RANDOM_H_
#define DPSTRAT_RANDOM_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace dpstrat {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Exposed for known-answer tests.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// A deterministic, splittable source of randomness. The key is the base seed
// and the 128-bit counter is (block index, stream id), so distinct stream ids
// address disjoint parts of the same keyed sequence. A stream is a value:
// copying it forks an identical sequence.
class RandomStream {
 public:
  RandomStream(uint64_t base_seed, uint64_t stream_id);

  uint64_t base_seed() const { return base_seed_; }
  uint64_t stream_id() const { return stream_id_; }

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double NextUniform();
  // Uniform integer on [0, bound), bound > 0, without modulo bias.
  uint64_t NextBelow(uint64_t bound);

  // Independent child stream, a pure function of (base_seed, stream_id, index).
  RandomStream Substream(uint64_t index) const;

 private:
  uint64_t base_seed_;
  uint64_t stream_id_;
  uint64_t block_ = 0;
  std::array<uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// Combines index tuples into a stream id; equal inputs give equal streams on
// any platform.
uint64_t HashIndices(std::span<const int64_t> indices);
RandomStream DeriveStream(uint64_t base_seed, std::span<const int64_t> indices);
RandomStream DeriveStream(uint64_t base_seed,
                          std::initializer_list<int64_t> indices);

// One draw from N(mean, variance). variance == 0 returns mean exactly; the
// stream advances by the same amount regardless of variance.
double Gaussian(RandomStream& stream, double mean, double variance);

// Exact Hypergeometric(N, K, n): number of marked units in a simple random
// sample of n from N units of which K are marked.
int64_t HypergeometricCount(RandomStream& stream, int64_t population,
                            int64_t marked, int64_t draws);

}  // namespace dpstrat

#endif  // DPSTRAT_RANDOM_H_
