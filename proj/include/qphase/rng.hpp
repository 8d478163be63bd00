// Copyright 2026 The qphase Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace qphase {

/// splitmix64 finalizer. Used both as a hash for deriving per-stream seeds
/// and as the default seed scrambler, so that streams derived from
/// (master_seed, index) pairs are reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the RNG stream of sample `index` under `master_seed`.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index + 0x51ed2701ULL));
}

/// mt19937_64 with distribution helpers that avoid the
/// implementation-defined std::uniform_*_distribution mappings, so sample
/// streams are byte-identical for a fixed seed on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) via rejection of the biased tail.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Pick an index from unnormalized non-negative weights.
    int pick_weighted(const double* weights, int count, double total) {
        double u = uniform() * total;
        for (int k = 0; k < count - 1; ++k) {
            u -= weights[k];
            if (u < 0) return k;
        }
        return count - 1;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace qphase
