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

#include "qphase/shadows.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qphase/parallel.hpp"

namespace qphase::shadows {

namespace {

using Complex = std::complex<double>;

Eigen::VectorXcd make_state(std::initializer_list<Complex> entries, double norm) {
    Eigen::VectorXcd v(static_cast<long>(entries.size()));
    long i = 0;
    for (Complex c : entries) v(i++) = c;
    return v / norm;
}

/// Iterate over r-subsets of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& c, int n) {
    int r = static_cast<int>(c.size());
    for (int i = r - 1; i >= 0; --i) {
        if (c[i] < n - (r - i)) {
            ++c[i];
            for (int j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

bool next_odometer(std::vector<int>& a, int base) {
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
        if (++a[i] < base) return true;
        a[i] = 0;
    }
    return false;
}

struct Accumulator {
    std::vector<double> sum;
    std::vector<double> sumsq;
    long count = 0;
};

Accumulator accumulate_range(std::span<const sampler::MubSample> samples, std::size_t lo,
                             std::size_t hi, int n, int r, const ShadowTable& table,
                             Averaging mode) {
    const int sites = samples[0].sites();
    const int n_ops = table.op_count();
    const int placements = cluster_count(sites, n, mode);
    const int step = (mode == Averaging::Disjoint) ? n : 1;
    const long dim = feature_dimension(n, r, n_ops);

    Accumulator acc;
    acc.sum.assign(static_cast<std::size_t>(dim), 0.0);
    acc.sumsq.assign(static_cast<std::size_t>(dim), 0.0);

    std::vector<double> site_table(static_cast<std::size_t>(sites * n_ops));
    std::vector<double> value(static_cast<std::size_t>(dim));
    std::vector<int> comb(static_cast<std::size_t>(r));
    std::vector<int> opsel(static_cast<std::size_t>(r));

    for (std::size_t idx = lo; idx < hi; ++idx) {
        const auto& sample = samples[idx];
        for (int j = 0; j < sites; ++j)
            for (int a = 0; a < n_ops; ++a)
                site_table[static_cast<std::size_t>(j * n_ops + a)] =
                    table.entry(a, sample.basis[static_cast<std::size_t>(j)],
                                sample.outcome[static_cast<std::size_t>(j)]);

        std::fill(value.begin(), value.end(), 0.0);
        for (int p = 0; p < placements; ++p) {
            const int offset = p * step;
            long comp = 0;
            std::iota(comb.begin(), comb.end(), 0);
            do {
                std::fill(opsel.begin(), opsel.end(), 0);
                do {
                    double prod = 1.0;
                    for (int k = 0; k < r; ++k)
                        prod *= site_table[static_cast<std::size_t>((offset + comb[k]) * n_ops +
                                                                    opsel[k])];
                    value[static_cast<std::size_t>(comp++)] += prod;
                } while (next_odometer(opsel, n_ops));
            } while (next_combination(comb, n));
        }
        for (long c = 0; c < dim; ++c) {
            double v = value[static_cast<std::size_t>(c)] / placements;
            acc.sum[static_cast<std::size_t>(c)] += v;
            acc.sumsq[static_cast<std::size_t>(c)] += v * v;
        }
        ++acc.count;
    }
    return acc;
}

Accumulator accumulate(std::span<const sampler::MubSample> samples, int n, int r,
                       const ShadowTable& table, Averaging mode) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    const int sites = samples[0].sites();
    if (n > sites) throw std::invalid_argument("cluster size exceeds the number of sites");
    if (r < 1 || r > n) throw std::invalid_argument("rank must satisfy 1 <= r <= n");
    for (const auto& s : samples)
        if (s.sites() != sites || s.d != table.d)
            throw std::invalid_argument("samples disagree in (d, L)");

    return chunked_tree_reduce<Accumulator>(
        samples.size(), 4096,
        [&](std::size_t lo, std::size_t hi) {
            return accumulate_range(samples, lo, hi, n, r, table, mode);
        },
        [](Accumulator a, const Accumulator& b) {
            if (a.sum.empty()) return b;
            if (b.sum.empty()) return a;
            for (std::size_t i = 0; i < a.sum.size(); ++i) {
                a.sum[i] += b.sum[i];
                a.sumsq[i] += b.sumsq[i];
            }
            a.count += b.count;
            return a;
        },
        Accumulator{});
}

FeatureVector make_vector(const sampler::MubSample& proto, int n, int r, const ShadowTable& table,
                          const Accumulator& acc) {
    FeatureVector fv;
    fv.d = proto.d;
    fv.sites = proto.sites();
    fv.n = n;
    fv.r = r;
    fv.basis_size = table.op_count();
    fv.sample_count = acc.count;
    fv.values.resize(acc.sum.size());
    for (std::size_t i = 0; i < acc.sum.size(); ++i)
        fv.values[i] = acc.sum[i] / static_cast<double>(acc.count);
    return fv;
}

}  // namespace

Eigen::MatrixXcd MubSet::projector(int basis, int outcome) const {
    const Eigen::VectorXcd& v = state(basis, outcome);
    return v * v.adjoint();
}

MubSet mub_set(int d) {
    MubSet m;
    m.d = d;
    if (d == 2) {
        const double s2 = std::sqrt(2.0);
        m.states = {
            {make_state({1, 0}, 1), make_state({0, 1}, 1)},
            {make_state({1, 1}, s2), make_state({1, -1}, s2)},
            {make_state({1, Complex(0, 1)}, s2), make_state({1, Complex(0, -1)}, s2)},
        };
    } else if (d == 3) {
        const double s3 = std::sqrt(3.0);
        const Complex qp = std::polar(1.0, 2.0 * M_PI / 3.0);
        const Complex qm = std::conj(qp);
        m.states = {
            {make_state({1, 0, 0}, 1), make_state({0, 1, 0}, 1), make_state({0, 0, 1}, 1)},
            {make_state({qm, 1, 1}, s3), make_state({1, qm, 1}, s3), make_state({qp, qp, 1}, s3)},
            {make_state({qp, 1, 1}, s3), make_state({1, qp, 1}, s3), make_state({qm, qm, 1}, s3)},
            {make_state({qp, qm, 1}, s3), make_state({qm, qp, 1}, s3), make_state({1, 1, 1}, s3)},
        };
    } else {
        throw std::invalid_argument("MUB construction implemented for d in {2, 3}");
    }
    return m;
}

Eigen::MatrixXcd invert_channel(const Eigen::MatrixXcd& projector, int d) {
    if (projector.rows() != d || projector.cols() != d)
        throw std::invalid_argument("projector dimension mismatch");
    if (std::abs(projector.trace().real() - 1.0) > 1e-10 ||
        std::abs(projector.trace().imag()) > 1e-10)
        throw std::invalid_argument("input is not trace-one");
    if ((projector * projector - projector).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("input is not a rank-1 projector");
    return (d + 1.0) * projector - Eigen::MatrixXcd::Identity(d, d);
}

ShadowTable build_table(const mps::OperatorBasis& op_basis, const MubSet& mubs) {
    if (op_basis.d != mubs.d) throw std::invalid_argument("operator basis / MUB dimension mismatch");
    ShadowTable t;
    t.d = mubs.d;
    t.basis = op_basis;
    const int n_ops = static_cast<int>(op_basis.ops.size());
    t.values.resize(static_cast<std::size_t>(n_ops * mubs.d * (mubs.d + 1)));
    for (int a = 0; a < n_ops; ++a)
        for (int b = 0; b < mubs.basis_count(); ++b)
            for (int k = 0; k < mubs.d; ++k) {
                Eigen::MatrixXcd inv = invert_channel(mubs.projector(b, k), mubs.d);
                t.values[static_cast<std::size_t>((a * (mubs.d + 1) + b) * mubs.d + k)] =
                    (op_basis.ops[static_cast<std::size_t>(a)] * inv).trace().real();
            }
    return t;
}

Averaging averaging_from_name(std::string_view name) {
    if (name == "overlapping") return Averaging::Overlapping;
    if (name == "disjoint") return Averaging::Disjoint;
    if (name == "single") return Averaging::Single;
    throw std::invalid_argument("unknown averaging mode: " + std::string(name));
}

std::string averaging_name(Averaging mode) {
    switch (mode) {
        case Averaging::Overlapping: return "overlapping";
        case Averaging::Disjoint: return "disjoint";
        case Averaging::Single: return "single";
    }
    return "overlapping";
}

int cluster_count(int sites, int cluster_size, Averaging mode) {
    if (cluster_size > sites) throw std::invalid_argument("cluster size exceeds chain length");
    switch (mode) {
        case Averaging::Overlapping: return sites - cluster_size + 1;
        case Averaging::Disjoint: return sites / cluster_size;
        case Averaging::Single: return 1;
    }
    return 1;
}

long feature_dimension(int n, int r, int basis_size) {
    long binom = 1;
    for (int i = 0; i < r; ++i) binom = binom * (n - i) / (i + 1);
    long pw = 1;
    for (int i = 0; i < r; ++i) pw *= basis_size;
    return binom * pw;
}

std::vector<std::string> component_names(const mps::OperatorBasis& basis, int n, int r) {
    const int n_ops = static_cast<int>(basis.ops.size());
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(feature_dimension(n, r, n_ops)));
    std::vector<int> comb(static_cast<std::size_t>(r));
    std::iota(comb.begin(), comb.end(), 0);
    do {
        std::vector<int> opsel(static_cast<std::size_t>(r), 0);
        do {
            std::string name;
            for (int k = 0; k < r; ++k) {
                if (k > 0) name += '.';
                name += basis.names[static_cast<std::size_t>(opsel[static_cast<std::size_t>(k)])];
                name += std::to_string(comb[static_cast<std::size_t>(k)] + 1);
            }
            names.push_back(std::move(name));
        } while (next_odometer(opsel, n_ops));
    } while (next_combination(comb, n));
    return names;
}

FeatureVector feature_vector(std::span<const sampler::MubSample> samples, int n, int r,
                             const ShadowTable& table, Averaging mode) {
    Accumulator acc = accumulate(samples, n, r, table, mode);
    return make_vector(samples[0], n, r, table, acc);
}

FeatureStats feature_vector_stats(std::span<const sampler::MubSample> samples, int n, int r,
                                  const ShadowTable& table, Averaging mode) {
    Accumulator acc = accumulate(samples, n, r, table, mode);
    FeatureStats stats;
    stats.mean = make_vector(samples[0], n, r, table, acc);
    stats.std_error.resize(acc.sum.size());
    const double n_s = static_cast<double>(acc.count);
    for (std::size_t i = 0; i < acc.sum.size(); ++i) {
        double mean = acc.sum[i] / n_s;
        double var = std::max(0.0, acc.sumsq[i] / n_s - mean * mean);
        if (acc.count > 1) var *= n_s / (n_s - 1.0);
        stats.std_error[i] = std::sqrt(var / n_s);
    }
    return stats;
}

std::vector<FeatureVector> batch_features(std::span<const sampler::MubSample> samples, int count,
                                          int n, int r, const ShadowTable& table,
                                          Averaging mode) {
    if (count < 2) throw std::invalid_argument("need at least two feature vectors");
    if (samples.size() < static_cast<std::size_t>(count))
        throw std::invalid_argument("fewer samples than requested feature vectors");
    const std::size_t group = samples.size() / static_cast<std::size_t>(count);
    std::vector<FeatureVector> out(static_cast<std::size_t>(count));
    parallel_for_index(static_cast<std::size_t>(count), [&](std::size_t k) {
        out[k] = feature_vector(samples.subspan(k * group, group), n, r, table, mode);
    });
    return out;
}

}  // namespace qphase::shadows
