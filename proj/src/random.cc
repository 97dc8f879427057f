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

#include "dpstrat/random.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "dpstrat/core.h"

namespace dpstrat {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t Combine(uint64_t seed, uint64_t value) {
  return SplitMix64(seed ^ SplitMix64(value + 0x632BE59BD9B4E019ull));
}

// Threshold below which hypergeometric draws simulate the sample one unit at a
// time; larger samples use inversion from the mode.
constexpr int64_t kSequentialLimit = 2048;

int64_t SequentialHypergeometric(RandomStream& stream, int64_t population,
                                 int64_t marked, int64_t draws) {
  int64_t remaining = population;
  int64_t remaining_marked = marked;
  int64_t hits = 0;
  for (int64_t i = 0; i < draws && remaining_marked > 0; ++i) {
    if (static_cast<int64_t>(
            stream.NextBelow(static_cast<uint64_t>(remaining))) <
        remaining_marked) {
      ++hits;
      --remaining_marked;
    }
    --remaining;
  }
  return hits;
}

double LogChoose(int64_t n, int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Inversion starting at the mode and walking outward, alternating sides.
int64_t InversionHypergeometric(RandomStream& stream, int64_t population,
                                int64_t marked, int64_t draws) {
  const int64_t lo = std::max<int64_t>(0, draws + marked - population);
  const int64_t hi = std::min(draws, marked);
  const auto nd = static_cast<double>(draws);
  const auto kd = static_cast<double>(marked);
  const auto rest = static_cast<double>(population - marked);
  int64_t mode = static_cast<int64_t>(
      std::floor((nd + 1.0) * (kd + 1.0) / (static_cast<double>(population) + 2.0)));
  mode = std::clamp(mode, lo, hi);

  const double pmode = std::exp(LogChoose(marked, mode) +
                                LogChoose(population - marked, draws - mode) -
                                LogChoose(population, draws));
  double u = stream.NextUniform() - pmode;
  if (u < 0.0) return mode;

  int64_t down = mode;
  int64_t up = mode;
  double p_down = pmode;
  double p_up = pmode;
  while (down > lo || up < hi) {
    if (down > lo) {
      const auto k = static_cast<double>(down);
      p_down *= k * (rest - nd + k) / ((kd - k + 1.0) * (nd - k + 1.0));
      --down;
      u -= p_down;
      if (u < 0.0) return down;
    }
    if (up < hi) {
      const auto k = static_cast<double>(up);
      p_up *= (kd - k) * (nd - k) / ((k + 1.0) * (rest - nd + k + 1.0));
      ++up;
      u -= p_up;
      if (u < 0.0) return up;
    }
  }
  // Only reachable through accumulated rounding in the pmf sum.
  return mode;
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * counter[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * counter[2];
    const auto hi0 = static_cast<uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<uint32_t>(p0);
    const auto hi1 = static_cast<uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<uint32_t>(p1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return counter;
}

RandomStream::RandomStream(uint64_t base_seed, uint64_t stream_id)
    : base_seed_(base_seed), stream_id_(stream_id) {}

uint64_t RandomStream::NextU64() {
  if (buffered_ == 0) {
    const std::array<uint32_t, 4> counter = {
        static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
        static_cast<uint32_t>(stream_id_),
        static_cast<uint32_t>(stream_id_ >> 32)};
    const std::array<uint32_t, 2> key = {static_cast<uint32_t>(base_seed_),
                                         static_cast<uint32_t>(base_seed_ >> 32)};
    const auto out = Philox4x32(counter, key);
    buffer_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double RandomStream::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 Uint128;

uint64_t RandomStream::NextBelow(uint64_t bound) {
  // Lemire's multiply-and-reject.
  Uint128 m = static_cast<Uint128>(NextU64()) * bound;
  auto low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<Uint128>(NextU64()) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

RandomStream RandomStream::Substream(uint64_t index) const {
  return RandomStream(base_seed_, Combine(stream_id_, index));
}

uint64_t HashIndices(std::span<const int64_t> indices) {
  uint64_t h = SplitMix64(indices.size());
  for (int64_t i : indices) h = Combine(h, static_cast<uint64_t>(i));
  return h;
}

RandomStream DeriveStream(uint64_t base_seed, std::span<const int64_t> indices) {
  return RandomStream(base_seed, HashIndices(indices));
}

RandomStream DeriveStream(uint64_t base_seed,
                          std::initializer_list<int64_t> indices) {
  return DeriveStream(base_seed,
                      std::span<const int64_t>(indices.begin(), indices.size()));
}

double Gaussian(RandomStream& stream, double mean, double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw ValidationError(fmt::format(
        "Gaussian variance must be nonnegative and finite, got {}", variance));
  }
  // Box-Muller; u1 lies in (0, 1] so the logarithm is finite.
  const double u1 = 1.0 - stream.NextUniform();
  const double u2 = stream.NextUniform();
  if (variance == 0.0) return mean;
  const double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
  return mean + std::sqrt(variance) * z;
}

int64_t HypergeometricCount(RandomStream& stream, int64_t population,
                            int64_t marked, int64_t draws) {
  if (population < 0 || marked < 0 || marked > population || draws < 0 ||
      draws > population) {
    throw ValidationError(fmt::format(
        "hypergeometric parameters out of range: N={}, K={}, n={}", population,
        marked, draws));
  }
  if (draws == 0 || marked == 0) return 0;
  if (marked == population) return draws;
  if (draws == population) return marked;

  // Reduce to draws <= N/2 and marked <= N/2 via the two complement symmetries.
  const bool flip_draws = draws > population / 2;
  const int64_t n = flip_draws ? population - draws : draws;
  const bool flip_marked = marked > population / 2;
  const int64_t k = flip_marked ? population - marked : marked;

  const int64_t c = n <= kSequentialLimit
                        ? SequentialHypergeometric(stream, population, k, n)
                        : InversionHypergeometric(stream, population, k, n);
  // c counts marked' units among the n' units drawn.
  int64_t result = c;
  if (flip_marked) result = n - result;      // marked units among n' drawn
  if (flip_draws) result = marked - result;  // marked units among the rest
  return result;
}

}  // namespace dpstrat
