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
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qphase/mps.hpp"
#include "qphase/sampler_types.hpp"
#include "qphase/shadows.hpp"

namespace qphase::sampler {

struct SampleOptions {
    NoiseSpec noise;
    /// Basis selection: independent uniform per site (default), cycling
    /// through all (d+1)^L configurations in equal proportion, or a fixed
    /// per-site configuration.
    enum class BasisMode { Iid, Stratified } basis_mode = BasisMode::Iid;
    std::optional<std::vector<std::uint8_t>> forced_basis;
};

/// Draws `count` snapshots of the infinite-chain L-site marginal: per site
/// a uniform MUB choice, outcome by sequential conditional probabilities
/// (left environment accumulated from the canonical left fixed point,
/// right environment the identity). Per-site depolarizing noise replaces
/// recorded outcomes with uniform ones. Deterministic given the seed; the
/// stream for sample k is seeded by hash(seed, k), so generation
/// parallelizes without changing the output.
std::vector<MubSample> sample_mub(const mps::MpsFamily& canonical_state, int sites, long count,
                                  std::uint64_t seed, const SampleOptions& options = {});

/// Uniform random basis and outcome per site (the order-free null model).
std::vector<MubSample> sample_random_uniform(int d, int sites, long count, std::uint64_t seed);

/// Exact joint distribution over (basis configuration, outcome
/// configuration) produced by sample_mub at p = 0, enumerated from the
/// marginal. Index = basis_config * d^L + outcome_config, both row-major.
std::vector<double> exact_mub_distribution(const mps::MpsFamily& canonical_state, int sites);

/// One spin-1 site recorded as two qubits. Valid codewords:
/// 00 -> middle, 01 -> plus, 10 -> minus; 11 marks an invalid pair.
struct PairRecord {
    std::vector<std::uint8_t> basis;       // per-site MUB index (0..3)
    std::vector<std::uint8_t> first_bit;   // per-site first qubit
    std::vector<std::uint8_t> second_bit;  // per-site second qubit
    mps::Family family = mps::Family::SpinOne;
    double g = 0.0;
    std::uint64_t seed = 0;
    Source source = Source::Synthetic;
};

struct DecodeResult {
    std::vector<MubSample> samples;
    double discard_fraction = 0.0;
    long dropped = 0;
};

/// Re-encodes d=3 samples as qubit-pair records; with per-site probability
/// `p_invalid` a pair is replaced by the invalid codeword 11.
std::vector<PairRecord> encode_qubit_pairs(std::span<const MubSample> samples, double p_invalid,
                                           std::uint64_t seed);

/// Decodes pair records to d=3 samples, dropping any record that contains
/// an invalid pair and reporting the dropped fraction.
DecodeResult decode_qubit_pairs(std::span<const PairRecord> records);

}  // namespace qphase::sampler
