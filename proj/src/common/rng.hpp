/* Copyright 2026 The ARGAN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef ARGAN_COMMON_RNG_HPP_
#define ARGAN_COMMON_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace argan {

using Rng = std::mt19937_64;

// Independent, reproducible stream for a (seed, tag...) tuple.
inline Rng DeriveRng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(keys.size() * 2);
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& text);

// Uniform double in [lo, hi) built from raw engine output so the value does
// not depend on the standard library's distribution implementation.
inline double UniformReal(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

inline bool Bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return UniformReal(rng, 0.0, 1.0) < p;
}

}  // namespace argan

#endif  // ARGAN_COMMON_RNG_HPP_
