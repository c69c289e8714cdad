// Copyright 2026 The Authors.
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

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace contagion::rng {

// One global seed is split into named substreams (shocks, thresholds, ...)
// keyed by (stream, index). Every consumer derives its own stream, so results
// do not depend on how work is partitioned across threads.
enum Stream : std::uint64_t {
  kShocks = 0x73686f636b,
  kThresholds = 0x746872,
  kSigma = 0x7369676d61,
  kGreedyStep = 0x67726565,
  kMixture = 0x6d6978,
  kScenarioPlan = 0x706c616e,
  kFixture = 0x666978,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= b + 0xbf58476d1ce4e5b9ULL;
  h ^= splitmix64(s);
  s ^= c + 0x94d049bb133111ebULL;
  h ^= splitmix64(s);
  return h;
}

// Deterministic substream engine. Uniform and Gaussian variates are derived
// from raw 64-bit output rather than std:: distributions, whose algorithms
// are implementation-defined.
class Substream {
 public:
  explicit Substream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; never returns 0 so log() is safe.
  double u01_open() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Box-Muller without spare caching: call count maps 1:1 to engine state.
  double gauss() {
    const double u1 = u01_open();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

inline Substream substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t a = 0,
                           std::uint64_t b = 0) {
  return Substream(mix(seed, stream, a, b));
}

// Runs fn(i) for i in [0, n). Results must be written to index-addressed
// slots by the caller; the partition in no way affects values, only wall
// time, so any thread count produces identical output.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([w, workers, n, &fn]() {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace contagion::rng
