/*
 * Copyright 2026 The uqreg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UQREG_RANDOM_HPP_
#define UQREG_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace uqreg {

using RandomEngine = std::mt19937_64;

// Derives an independent stream seed from (seed, stream index). Every worker,
// ensemble member and dropout pass gets its own stream this way.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline RandomEngine MakeEngine(std::uint64_t seed, std::uint64_t stream) {
  return RandomEngine(DeriveSeed(seed, stream));
}

}  // namespace uqreg

#endif  // UQREG_RANDOM_HPP_
