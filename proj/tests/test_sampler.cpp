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
#include <map>

#include "doctest.h"
#include "qphase/shadows.hpp"

using namespace qphase;
using namespace qphase::sampler;

namespace {

mps::MpsFamily canonical(mps::Family fam, double g) {
    return mps::canonicalized(mps::build_family(fam, g));
}

/// Mean and standard error of a single-site shadow estimator over samples.
std::pair<double, double> shadow_mean(const std::vector<MubSample>& samples, int site,
                                      const shadows::ShadowTable& table, int op_index) {
    double sum = 0, sumsq = 0;
    for (const auto& s : samples) {
        double v = table.entry(op_index, s.basis[static_cast<std::size_t>(site)],
                               s.outcome[static_cast<std::size_t>(site)]);
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(samples.size());
    double mean = sum / n;
    double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("forced computational basis on the spin-one product state is deterministic") {
    mps::MpsFamily canon = canonical(mps::Family::SpinOne, 1.0);
    SampleOptions opt;
    opt.forced_basis = std::vector<std::uint8_t>{0, 0, 0};
    auto samples = sample_mub(canon, 3, 500, 42, opt);
    for (const auto& s : samples)
        for (int j = 0; j < 3; ++j) {
            CHECK(s.basis[static_cast<std::size_t>(j)] == 0);
            CHECK(s.outcome[static_cast<std::size_t>(j)] == 1);  // middle state
        }
}

TEST_CASE("shadow estimate of <X> on the spin-half g=1 product state") {
    mps::MpsFamily canon = canonical(mps::Family::SpinHalf, 1.0);
    auto samples = sample_mub(canon, 4, 100000, 7);
    auto table = shadows::build_table(mps::OperatorBasis::pauli(), shadows::mub_set(2));
    for (int site = 0; site < 4; ++site) {
        auto [mean, se] = shadow_mean(samples, site, table, 0);
        CHECK(std::abs(mean - 1.0) < 5 * se);
    }
}

TEST_CASE("shadow estimate of <Z1 X2 Z3> matches the exact contraction at g=-1") {
    mps::MpsFamily canon = canonical(mps::Family::SpinHalf, -1.0);
    auto samples = sample_mub(canon, 3, 100000, 13);
    auto table = shadows::build_table(mps::OperatorBasis::pauli(), shadows::mub_set(2));

    double exact = mps::expectation(
        canon, {{0, mps::pauli_z()}, {1, mps::pauli_x()}, {2, mps::pauli_z()}});
    double sum = 0, sumsq = 0;
    for (const auto& s : samples) {
        double v = table.entry(2, s.basis[0], s.outcome[0]) *
                   table.entry(0, s.basis[1], s.outcome[1]) *
                   table.entry(2, s.basis[2], s.outcome[2]);
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(samples.size());
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - exact) < 5 * se);
}

TEST_CASE("uniform random samples: null estimates and basis histogram") {
    auto s2 = sample_random_uniform(2, 2, 100000, 3);
    auto t2 = shadows::build_table(mps::OperatorBasis::pauli(), shadows::mub_set(2));
    auto [mx, se_x] = shadow_mean(s2, 0, t2, 0);
    CHECK(std::abs(mx) < 5 * se_x);

    auto s3 = sample_random_uniform(3, 2, 100000, 4);
    auto t3 = shadows::build_table(mps::OperatorBasis::spin_one(), shadows::mub_set(3));
    auto [mz2, se_z2] = shadow_mean(s3, 1, t3, 5);
    CHECK(std::abs(mz2 - 2.0 / 3.0) < 5 * se_z2);

    // basis histogram uniform over d+1 values within 5 sigma
    for (const auto* samples : {&s2}) {
        std::map<int, long> hist;
        for (const auto& s : *samples) ++hist[s.basis[0]];
        double n = static_cast<double>(samples->size());
        double p = 1.0 / 3.0;
        double sigma = std::sqrt(n * p * (1 - p));
        for (auto [b, c] : hist) CHECK(std::abs(c - n * p) < 5 * sigma);
        CHECK(hist.size() == 3);
    }
    std::map<int, long> hist3;
    for (const auto& s : s3) ++hist3[s.basis[0]];
    double n3 = static_cast<double>(s3.size());
    double p3 = 0.25, sigma3 = std::sqrt(n3 * p3 * (1 - p3));
    for (auto [b, c] : hist3) CHECK(std::abs(c - n3 * p3) < 5 * sigma3);
    CHECK(hist3.size() == 4);
}

TEST_CASE("determinism: identical seeds give identical streams") {
    mps::MpsFamily canon = canonical(mps::Family::SpinOne, -0.4);
    SampleOptions opt;
    opt.noise.p_depolarize = 0.1;
    auto a = sample_mub(canon, 4, 2000, 123, opt);
    auto b = sample_mub(canon, 4, 2000, 123, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].basis == b[i].basis);
        CHECK(a[i].outcome == b[i].outcome);
    }
    auto c = sample_mub(canon, 4, 2000, 124, opt);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].basis != c[i].basis || a[i].outcome != c[i].outcome) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("full depolarization makes outcome marginals uniform") {
    mps::MpsFamily canon = canonical(mps::Family::SpinHalf, 1.0);
    SampleOptions opt;
    opt.noise.p_depolarize = 1.0;
    auto samples = sample_mub(canon, 2, 60000, 55, opt);
    long counts[2] = {0, 0};
    for (const auto& s : samples) ++counts[s.outcome[0]];
    double n = static_cast<double>(samples.size());
    double sigma = std::sqrt(n * 0.25);
    CHECK(std::abs(counts[0] - n / 2) < 5 * sigma);
}

TEST_CASE("stratified mode covers every basis configuration equally") {
    mps::MpsFamily canon = canonical(mps::Family::SpinOne, 0.5);
    SampleOptions opt;
    opt.basis_mode = SampleOptions::BasisMode::Stratified;
    const long per = 2, strata = 64;  // 4^3
    auto samples = sample_mub(canon, 3, per * strata, 9, opt);
    std::map<std::vector<std::uint8_t>, long> hist;
    for (const auto& s : samples) ++hist[s.basis];
    CHECK(static_cast<long>(hist.size()) == strata);
    for (const auto& [k, v] : hist) CHECK(v == per);
}

TEST_CASE("exact distribution: normalization and agreement with empirical frequencies") {
    mps::MpsFamily canon = canonical(mps::Family::SpinHalf, -0.5);
    auto dist = exact_mub_distribution(canon, 2);
    double total = 0;
    for (double p : dist) {
        CHECK(p >= -1e-15);
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    const long n = 200000;
    auto samples = sample_mub(canon, 2, n, 77);
    std::vector<long> counts(dist.size(), 0);
    for (const auto& s : samples) {
        long bc = s.basis[0] * 3 + s.basis[1];
        long oc = s.outcome[0] * 2 + s.outcome[1];
        ++counts[static_cast<std::size_t>(bc * 4 + oc)];
    }
    for (std::size_t i = 0; i < dist.size(); ++i) {
        double expect = dist[i] * n;
        double sigma = std::sqrt(std::max(1.0, n * dist[i] * (1 - dist[i])));
        CHECK(std::abs(counts[i] - expect) < 5.5 * sigma);
    }
}

TEST_CASE("qubit-pair decode: mapping, discards, round trip") {
    SUBCASE("explicit record mapping") {
        PairRecord rec;
        rec.basis = {0, 0, 0};
        rec.first_bit = {0, 0, 1};
        rec.second_bit = {1, 0, 0};  // pairs 01, 00, 10
        auto res = decode_qubit_pairs(std::vector<PairRecord>{rec});
        REQUIRE(res.samples.size() == 1);
        CHECK(res.samples[0].outcome == std::vector<std::uint8_t>{0, 1, 2});  // +, o, -
        CHECK(res.discard_fraction == 0.0);
    }
    SUBCASE("records containing the invalid pair are dropped") {
        PairRecord rec;
        rec.basis = {0, 0, 0};
        rec.first_bit = {0, 1, 0};
        rec.second_bit = {0, 1, 0};  // middle pair is 11
        auto res = decode_qubit_pairs(std::vector<PairRecord>{rec});
        CHECK(res.samples.empty());
        CHECK(res.dropped == 1);
        CHECK(res.discard_fraction == 1.0);
    }
    SUBCASE("all-00 stream has zero discard fraction") {
        std::vector<PairRecord> recs(10);
        for (auto& r : recs) {
            r.basis = {0, 0};
            r.first_bit = {0, 0};
            r.second_bit = {0, 0};
        }
        auto res = decode_qubit_pairs(recs);
        CHECK(res.discard_fraction == 0.0);
        CHECK(res.samples.size() == 10);
    }
    SUBCASE("malformed record length throws") {
        PairRecord rec;
        rec.basis = {0, 0};
        rec.first_bit = {0};
        rec.second_bit = {0, 0};
        CHECK_THROWS_AS(decode_qubit_pairs(std::vector<PairRecord>{rec}),
                        std::invalid_argument);
    }
    SUBCASE("encode/decode round trip and discard statistics") {
        mps::MpsFamily canon = canonical(mps::Family::SpinOne, -1.0);
        auto samples = sample_mub(canon, 3, 5000, 21);
        auto clean = encode_qubit_pairs(samples, 0.0, 1);
        auto back = decode_qubit_pairs(clean);
        REQUIRE(back.samples.size() == samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            CHECK(back.samples[i].outcome == samples[i].outcome);

        double p = 0.07;
        auto noisy = encode_qubit_pairs(samples, p, 2);
        auto res = decode_qubit_pairs(noisy);
        double keep = std::pow(1 - p, 3);
        double expect_frac = 1 - keep;
        double sigma = std::sqrt(expect_frac * keep / static_cast<double>(samples.size()));
        CHECK(std::abs(res.discard_fraction - expect_frac) < 5 * sigma);
    }
}

TEST_CASE("sampler input validation") {
    mps::MpsFamily raw = mps::build_family(mps::Family::SpinHalf, 0.5);
    CHECK_THROWS_AS(sample_mub(raw, 3, 10, 1), std::invalid_argument);
    mps::MpsFamily canon = canonical(mps::Family::SpinHalf, 0.5);
    CHECK_THROWS_AS(sample_mub(canon, 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_random_uniform(4, 3, 10, 1), std::invalid_argument);
    SampleOptions opt;
    opt.noise.p_depolarize = 1.5;
    CHECK_THROWS_AS(sample_mub(canon, 3, 10, 1, opt), std::invalid_argument);
}

}  // TEST_SUITE
