// Copyright 2026 ncwit developers
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
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ncwit {

/// Counter-based splittable random stream (splitmix64 core).
///
/// Streams are value types: the stream for a given (seed, lane, index)
/// triple is a pure function of the triple, so work partitioned over any
/// number of shards reproduces the exact same per-sample draws. This is
/// what makes search reports bit-identical across shard counts.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  /// Derives an independent stream for lane `lane`, counter `index`.
  static RngStream substream(std::uint64_t seed, std::uint64_t lane,
                             std::uint64_t index) {
    return RngStream(mix(mix(seed) ^ mix(lane * 0x9E3779B97F4A7C15ULL + 1) ^
                         mix(index + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in (0, 1]; never returns exactly 0 so that logs are safe.
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pairwise, second value cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Uniform sample from the (n-1)-simplex (symmetric Dirichlet, alpha = 1):
/// exponential spacings, normalized.
inline std::vector<double> dirichlet_uniform(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("dirichlet_uniform: n must be >= 1");
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& v : x) {
    v = -std::log(rng.uniform());
    sum += v;
  }
  for (auto& v : x) v /= sum;
  return x;
}

}  // namespace ncwit
