// Copyright 2026 The hsisg Authors.
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

#pragma once

#include <cstdint>
#include <random>

namespace hsisg {

/// mt19937_64 with platform-independent mappings to [0,1) and [0,n); the
/// standard distributions are implementation-defined, which would break
/// cross-platform reproducibility of seeded runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n) for n >= 1 (multiply-shift reduction).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Independent stream for worker `index` of a run seeded with `seed`.
  static Rng for_worker(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hsisg
