// Copyright 2026, The flipprint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLIPPRINT_COMMON_RNG_HPP_
#define FLIPPRINT_COMMON_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace flipprint {

/// Every stochastic step draws from its own stream, derived from a root seed
/// and a tuple of tags (device, session, chunk, repeat, pair, ...). Results
/// therefore never depend on the order in which work is scheduled.
using RngStream = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t root,
                                           std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

inline RngStream make_stream(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
  return RngStream{derive_seed(root, tags)};
}

/// Uniform double in [0, 1) from the top 53 bits. Used instead of
/// std::uniform_real_distribution so streams reproduce across standard libraries.
inline double uniform01(RngStream& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Counter-based uniform in [0, 1): a pure function of its key.
inline constexpr double hash01(std::uint64_t root, std::initializer_list<std::uint64_t> tags) noexcept {
  return static_cast<double>(derive_seed(root, tags) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection, n >= 1.
inline std::uint64_t uniform_below(RngStream& rng, std::uint64_t n) noexcept {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace flipprint

#endif  // FLIPPRINT_COMMON_RNG_HPP_
