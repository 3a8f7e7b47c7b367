//
// Copyright 2026 The ISAAC Audit Authors
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

// Portable seeded randomness. Every draw in the toolkit (scope sampling,
// substitution residues, oracle weights, bootstrap resampling) goes through
// the primitives below so that an independent implementation can replay an
// audit bit-for-bit.
//
// Algorithm (part of the replay contract):
//   Mix64(z):      SplitMix64 finalizer
//                    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                    z =  z ^ (z >> 31)
//   HashString(s): 64-bit FNV-1a (offset 0xCBF29CE484222325,
//                  prime 0x00000100000001B3) over the UTF-8 bytes.
//   DeriveSeed(v1..vn): h = 0x6A09E667F3BCC908; for each v: h = Mix64(h ^ v)
//                       then h += 0x9E3779B97F4A7C15.
//   SplitMix64 stream: state += 0x9E3779B97F4A7C15; return Mix64(state).
//   UniformBelow(n): draw r until r >= (2^64 - n) mod n; return r mod n.

#ifndef ISAAC_RANDOM_H_
#define ISAAC_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace isaac {

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr uint64_t HashString(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x00000100000001B3ULL;
  }
  return h;
}

constexpr uint64_t DeriveSeed(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x6A09E667F3BCC908ULL;
  for (uint64_t v : parts) {
    h = Mix64(h ^ v);
    h += kGoldenGamma;
  }
  return h;
}

// SplitMix64 generator. Satisfies UniformRandomBitGenerator, but callers
// should use UniformBelow rather than <random> distributions, whose output is
// implementation-defined.
class SplitMix64 {
 public:
  using result_type = uint64_t;

  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
    state_ += kGoldenGamma;
    return Mix64(state_);
  }

  // Unbiased draw from [0, n). n must be positive.
  constexpr uint64_t UniformBelow(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = (*this)();
      if (r >= threshold) return r % n;
    }
  }

 private:
  uint64_t state_;
};

}  // namespace isaac

#endif  // ISAAC_RANDOM_H_
