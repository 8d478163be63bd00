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

#include "qphase/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "qphase/parallel.hpp"
#include "qphase/rng.hpp"

namespace qphase::sampler {

namespace {

/// Collapsed site matrices C_{b,k} = sum_s conj(<s|v_{b,k}>) B_s: the bond
/// operator picked up when site s is measured in MUB state (b, k).
std::vector<std::vector<Eigen::Matrix2cd>> collapsed_site_matrices(
    const mps::MpsFamily& state, const shadows::MubSet& mubs) {
    std::vector<std::vector<Eigen::Matrix2cd>> c(
        static_cast<std::size_t>(mubs.basis_count()),
        std::vector<Eigen::Matrix2cd>(static_cast<std::size_t>(state.d)));
    for (int b = 0; b < mubs.basis_count(); ++b)
        for (int k = 0; k < state.d; ++k) {
            Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
            const Eigen::VectorXcd& v = mubs.state(b, k);
            for (int s = 0; s < state.d; ++s) m += std::conj(v(s)) * state.tensors[s];
            c[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] = m;
        }
    return c;
}

void check_sampler_input(const mps::MpsFamily& state, int sites) {
    if (!state.canonical)
        throw std::invalid_argument("sampler requires a right-canonical state");
    if (sites < 1) throw std::invalid_argument("need at least one site");
}

std::uint64_t basis_config_count(int d, int sites) {
    std::uint64_t n = 1;
    for (int i = 0; i < sites; ++i) n *= static_cast<std::uint64_t>(d + 1);
    return n;
}

}  // namespace

std::string source_name(Source source) {
    switch (source) {
        case Source::Synthetic: return "synthetic";
        case Source::Experiment: return "experiment";
        case Source::Random: return "random";
    }
    return "synthetic";
}

Source source_from_name(std::string_view name) {
    if (name == "synthetic") return Source::Synthetic;
    if (name == "experiment") return Source::Experiment;
    if (name == "random") return Source::Random;
    throw std::invalid_argument("unknown sample source: " + std::string(name));
}

std::vector<MubSample> sample_mub(const mps::MpsFamily& canonical_state, int sites, long count,
                                  std::uint64_t seed, const SampleOptions& options) {
    check_sampler_input(canonical_state, sites);
    if (options.noise.p_depolarize < 0 || options.noise.p_depolarize > 1)
        throw std::invalid_argument("depolarizing probability must lie in [0, 1]");
    if (options.forced_basis && static_cast<int>(options.forced_basis->size()) != sites)
        throw std::invalid_argument("forced basis length mismatch");

    const int d = canonical_state.d;
    const shadows::MubSet mubs = shadows::mub_set(d);
    const auto collapsed = collapsed_site_matrices(canonical_state, mubs);
    const double p_noise = options.noise.p_depolarize;

    std::uint64_t strata = 0;
    if (options.basis_mode == SampleOptions::BasisMode::Stratified)
        strata = basis_config_count(d, sites);

    std::vector<MubSample> out(static_cast<std::size_t>(count));
    parallel_for_index(static_cast<std::size_t>(count), [&](std::size_t idx) {
        Rng rng(stream_seed(seed, idx));
        MubSample s;
        s.d = d;
        s.family = canonical_state.family;
        s.g = canonical_state.g;
        s.seed = seed;
        s.source = Source::Synthetic;
        s.basis.resize(static_cast<std::size_t>(sites));
        s.outcome.resize(static_cast<std::size_t>(sites));

        std::uint64_t stratum = 0;
        if (strata != 0) stratum = static_cast<std::uint64_t>(idx) % strata;

        Eigen::Matrix2cd env = canonical_state.left_env;
        double probs[3];
        for (int j = 0; j < sites; ++j) {
            int b;
            if (options.forced_basis) {
                b = (*options.forced_basis)[static_cast<std::size_t>(j)];
            } else if (strata != 0) {
                b = static_cast<int>(stratum % static_cast<std::uint64_t>(d + 1));
                stratum /= static_cast<std::uint64_t>(d + 1);
            } else {
                b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d + 1)));
            }
            const auto& cb = collapsed[static_cast<std::size_t>(b)];
            double total = 0;
            for (int k = 0; k < d; ++k) {
                probs[k] = (cb[static_cast<std::size_t>(k)].adjoint() * env *
                            cb[static_cast<std::size_t>(k)])
                               .trace()
                               .real();
                probs[k] = std::max(probs[k], 0.0);
                total += probs[k];
            }
            int k = rng.pick_weighted(probs, d, total);
            env = (cb[static_cast<std::size_t>(k)].adjoint() * env *
                   cb[static_cast<std::size_t>(k)])
                      .eval();
            env /= env.trace().real();

            int recorded = k;
            if (p_noise > 0 && rng.uniform() < p_noise)
                recorded = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
            s.basis[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(b);
            s.outcome[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(recorded);
        }
        out[idx] = std::move(s);
    });
    return out;
}

std::vector<MubSample> sample_random_uniform(int d, int sites, long count, std::uint64_t seed) {
    if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
    if (sites < 1) throw std::invalid_argument("need at least one site");
    std::vector<MubSample> out(static_cast<std::size_t>(count));
    parallel_for_index(static_cast<std::size_t>(count), [&](std::size_t idx) {
        Rng rng(stream_seed(seed, idx));
        MubSample s;
        s.d = d;
        s.seed = seed;
        s.source = Source::Random;
        s.basis.resize(static_cast<std::size_t>(sites));
        s.outcome.resize(static_cast<std::size_t>(sites));
        for (int j = 0; j < sites; ++j) {
            s.basis[static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>(rng.uniform_int(static_cast<std::uint64_t>(d + 1)));
            s.outcome[static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>(rng.uniform_int(static_cast<std::uint64_t>(d)));
        }
        out[idx] = std::move(s);
    });
    return out;
}

std::vector<double> exact_mub_distribution(const mps::MpsFamily& canonical_state, int sites) {
    check_sampler_input(canonical_state, sites);
    const int d = canonical_state.d;
    const shadows::MubSet mubs = shadows::mub_set(d);
    const auto collapsed = collapsed_site_matrices(canonical_state, mubs);

    long outcome_configs = 1;
    for (int i = 0; i < sites; ++i) outcome_configs *= d;
    const std::uint64_t basis_configs = basis_config_count(d, sites);
    const double basis_weight =
        1.0 / std::pow(static_cast<double>(d + 1), static_cast<double>(sites));

    std::vector<double> dist(static_cast<std::size_t>(basis_configs) *
                             static_cast<std::size_t>(outcome_configs));
    std::vector<int> basis(static_cast<std::size_t>(sites));
    for (std::uint64_t bc = 0; bc < basis_configs; ++bc) {
        std::uint64_t rest = bc;
        for (int j = sites - 1; j >= 0; --j) {  // row-major: site 0 most significant
            basis[static_cast<std::size_t>(j)] =
                static_cast<int>(rest % static_cast<std::uint64_t>(d + 1));
            rest /= static_cast<std::uint64_t>(d + 1);
        }
        for (long oc = 0; oc < outcome_configs; ++oc) {
            Eigen::Matrix2cd env = canonical_state.left_env;
            long orest = oc;
            long stride = outcome_configs / d;
            for (int j = 0; j < sites; ++j) {
                int k = static_cast<int>(orest / stride);
                orest %= stride;
                stride /= d;
                const Eigen::Matrix2cd& c =
                    collapsed[static_cast<std::size_t>(basis[static_cast<std::size_t>(j)])]
                             [static_cast<std::size_t>(k)];
                env = (c.adjoint() * env * c).eval();
            }
            dist[static_cast<std::size_t>(bc) * static_cast<std::size_t>(outcome_configs) +
                 static_cast<std::size_t>(oc)] = basis_weight * env.trace().real();
        }
    }
    return dist;
}

std::vector<PairRecord> encode_qubit_pairs(std::span<const MubSample> samples, double p_invalid,
                                           std::uint64_t seed) {
    if (p_invalid < 0 || p_invalid > 1)
        throw std::invalid_argument("invalid-pair probability must lie in [0, 1]");
    std::vector<PairRecord> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const MubSample& s = samples[i];
        if (s.d != 3) throw std::invalid_argument("qubit-pair encoding applies to d=3 samples");
        Rng rng(stream_seed(seed, i));
        PairRecord rec;
        rec.basis = s.basis;
        rec.family = s.family;
        rec.g = s.g;
        rec.seed = s.seed;
        rec.source = s.source;
        rec.first_bit.resize(s.basis.size());
        rec.second_bit.resize(s.basis.size());
        for (std::size_t j = 0; j < s.basis.size(); ++j) {
            // outcome order (plus, middle, minus) -> pairs 01, 00, 10
            std::uint8_t first = 0, second = 0;
            switch (s.outcome[j]) {
                case 0: first = 0; second = 1; break;
                case 1: first = 0; second = 0; break;
                default: first = 1; second = 0; break;
            }
            if (p_invalid > 0 && rng.uniform() < p_invalid) { first = 1; second = 1; }
            rec.first_bit[j] = first;
            rec.second_bit[j] = second;
        }
        out[i] = std::move(rec);
    }
    return out;
}

DecodeResult decode_qubit_pairs(std::span<const PairRecord> records) {
    DecodeResult res;
    res.samples.reserve(records.size());
    for (const PairRecord& rec : records) {
        if (rec.first_bit.size() != rec.basis.size() ||
            rec.second_bit.size() != rec.basis.size())
            throw std::invalid_argument("malformed pair record: length mismatch");
        bool valid = true;
        MubSample s;
        s.d = 3;
        s.family = rec.family;
        s.g = rec.g;
        s.seed = rec.seed;
        s.source = rec.source;
        s.basis = rec.basis;
        s.outcome.resize(rec.basis.size());
        for (std::size_t j = 0; j < rec.basis.size(); ++j) {
            int code = rec.first_bit[j] * 2 + rec.second_bit[j];
            switch (code) {
                case 0: s.outcome[j] = 1; break;  // 00 -> middle
                case 1: s.outcome[j] = 0; break;  // 01 -> plus
                case 2: s.outcome[j] = 2; break;  // 10 -> minus
                default: valid = false; break;    // 11 -> invalid
            }
            if (!valid) break;
        }
        if (valid)
            res.samples.push_back(std::move(s));
        else
            ++res.dropped;
    }
    res.discard_fraction =
        records.empty() ? 0.0 : static_cast<double>(res.dropped) / static_cast<double>(records.size());
    return res;
}

}  // namespace qphase::sampler
