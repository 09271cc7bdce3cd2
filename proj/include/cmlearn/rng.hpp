// Copyright 2026 The cmlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace cmlearn {

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream key for item `index` of a run seeded with `seed`. Every trajectory,
// trial and dataset split draws from its own key so results do not depend on
// evaluation order.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) noexcept {
  return seed ^ Mix64(index);
}

// Counter-based generator: the n-th output is Mix64(key + n * golden), so a
// stream is fully described by (key, counter).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t NextU64() noexcept {
    return Mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double NextUnit() noexcept {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi]; returns lo exactly for a degenerate interval.
  double Uniform(double lo, double hi) noexcept {
    if (lo == hi) return lo;
    return lo + (hi - lo) * NextUnit();
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cmlearn
