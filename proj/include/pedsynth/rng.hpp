// Copyright 2026 The pedsynth Authors. All Rights Reserved.
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

// Deterministic randomness for the whole pipeline.
//
// Every random decision is drawn from xoshiro256** seeded through SplitMix64,
// so streams are reproducible bit-for-bit across platforms and across
// reimplementations in other languages:
//
//   record stream  = xoshiro256**( mix(mix(master_seed) ^ (index + GOLDEN)) )
//   labeled stream = xoshiro256**( mix(mix(seed) ^ fnv1a64(label)) )
//
// where mix() is the SplitMix64 step and GOLDEN = 0x9E3779B97F4A7C15.
// Integer draws use unbiased rejection sampling; doubles take the top 53
// bits of one output. Shuffles are Fisher-Yates, high index down to 1.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pedsynth/errors.hpp"

namespace pedsynth {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64: seeding and hash mixing only, never a long-lived stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) {
      word = sm.next();
    }
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
      state_[0] = kGolden;  // all-zero state is the one forbidden seed
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, range), unbiased via rejection.
  std::uint64_t next_below(std::uint64_t range) {
    if (range == 0) {
      throw ValidationError("next_below: range must be positive");
    }
    const std::uint64_t threshold = (-range) % range;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) {
        return r % range;
      }
    }
  }

  // Uniform on the inclusive integer range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
      throw ValidationError("uniform_int: empty range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
    }
    const std::uint64_t range =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (range == 0) {  // full 64-bit span
      return static_cast<std::int64_t>(next());
    }
    return lo + static_cast<std::int64_t>(next_below(range));
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi); returns lo exactly when lo == hi.
  double uniform_double(double lo, double hi) {
    if (!(lo <= hi)) {
      throw ValidationError("uniform_double: lo must not exceed hi");
    }
    return lo + (hi - lo) * uniform_double();
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

using Rng = Xoshiro256StarStar;

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 outer(seed);
  SplitMix64 inner(outer.next() ^ (salt + kGolden));
  return inner.next();
}

// Sole randomness source for record `record_index` of a run seeded with
// `master_seed`; streams for distinct indices are independent, which is what
// makes worker count irrelevant to the output.
inline Rng record_rng(std::uint64_t master_seed, std::uint64_t record_index) {
  return Rng(derive_seed(master_seed, record_index));
}

inline Rng labeled_rng(std::uint64_t seed, std::string_view stream_label) {
  return Rng(derive_seed(seed, fnv1a64(stream_label)));
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next_below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

// Permutation that is a pure function of (seed, stream_label, item count).
template <typename T>
std::vector<T> seeded_shuffle(std::vector<T> items, std::uint64_t seed,
                              std::string_view stream_label) {
  Rng rng = labeled_rng(seed, stream_label);
  shuffle_in_place(items, rng);
  return items;
}

}  // namespace pedsynth
