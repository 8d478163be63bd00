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
#include <string>
#include <vector>

#include "qphase/mps.hpp"

namespace qphase::sampler {

enum class Source { Synthetic, Experiment, Random };

std::string source_name(Source source);
Source source_from_name(std::string_view name);

/// One randomized-measurement snapshot: a basis index in [0, d] and an
/// outcome index in [0, d) per site, plus provenance.
struct MubSample {
    int d = 2;
    std::vector<std::uint8_t> basis;
    std::vector<std::uint8_t> outcome;
    mps::Family family = mps::Family::SpinHalf;
    double g = 0.0;
    std::uint64_t seed = 0;
    Source source = Source::Synthetic;

    int sites() const { return static_cast<int>(basis.size()); }
};

/// Synthetic imperfection model: per-site probability of replacing the
/// recorded outcome with a uniform one, and (for the qubit-pair encoding
/// of spin-1 sites) the per-site probability of an invalid pair record.
struct NoiseSpec {
    double p_depolarize = 0.0;
    double p_discard_pair = 0.0;
};

}  // namespace qphase::sampler
