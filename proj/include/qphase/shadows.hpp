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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qphase/mps.hpp"
#include "qphase/sampler_types.hpp"

namespace qphase::shadows {

/// Maximal set of d+1 mutually unbiased bases for d in {2, 3}: every pair
/// of states from different bases has squared overlap 1/d.
struct MubSet {
    int d = 2;
    /// states[basis][outcome], each a unit d-vector.
    std::vector<std::vector<Eigen::VectorXcd>> states;

    int basis_count() const { return d + 1; }
    const Eigen::VectorXcd& state(int basis, int outcome) const {
        return states[static_cast<std::size_t>(basis)][static_cast<std::size_t>(outcome)];
    }
    Eigen::MatrixXcd projector(int basis, int outcome) const;
};

MubSet mub_set(int d);

/// Inverse of the single-site measurement channel: (d+1) M - tr(M) I.
/// M must be a rank-1 projector from the MUB set (validated).
Eigen::MatrixXcd invert_channel(const Eigen::MatrixXcd& projector, int d);

/// Estimator lookup table: entry(a, basis, outcome) =
/// tr(O_a * ((d+1) |v><v| - I)), of shape |basis| x d(d+1).
struct ShadowTable {
    int d = 2;
    mps::OperatorBasis basis;
    std::vector<double> values;  // index: a * d(d+1) + mub_basis * d + outcome

    double entry(int a, int mub_basis, int outcome) const {
        return values[static_cast<std::size_t>((a * (d + 1) + mub_basis) * d + outcome)];
    }
    int op_count() const { return static_cast<int>(basis.ops.size()); }
};

ShadowTable build_table(const mps::OperatorBasis& op_basis, const MubSet& mubs);

enum class Averaging { Overlapping, Disjoint, Single };

Averaging averaging_from_name(std::string_view name);
std::string averaging_name(Averaging mode);

/// Number of cluster placements used by each averaging mode.
int cluster_count(int sites, int cluster_size, Averaging mode);

/// Estimated monomial expectations over a cluster of `n` sites at rank `r`:
/// component (j_1<...<j_r; a_1...a_r) is the sample-and-cluster average of
/// prod_k table(a_k, basis[c+j_k], outcome[c+j_k]). Components are ordered
/// lexicographically, site tuple major, operator tuple minor; that order
/// is frozen in the serialized form.
struct FeatureVector {
    int d = 2;
    int sites = 0;        // L of the underlying samples
    int n = 0;            // cluster size
    int r = 1;            // monomial rank
    int basis_size = 0;   // |B|
    long sample_count = 0;
    std::vector<double> values;

    long dimension() const { return static_cast<long>(values.size()); }
};

/// C(n, r) * |B|^r, the frozen feature dimension.
long feature_dimension(int n, int r, int basis_size);

/// Component names like "Z1.X2.Z3" (operator name + 1-based cluster site).
std::vector<std::string> component_names(const mps::OperatorBasis& basis, int n, int r);

FeatureVector feature_vector(std::span<const sampler::MubSample> samples, int n, int r,
                             const ShadowTable& table, Averaging mode = Averaging::Overlapping);

/// Mean features plus per-component standard errors of the mean, both from
/// the per-sample (cluster-averaged) estimator population.
struct FeatureStats {
    FeatureVector mean;
    std::vector<double> std_error;
};

FeatureStats feature_vector_stats(std::span<const sampler::MubSample> samples, int n, int r,
                                  const ShadowTable& table,
                                  Averaging mode = Averaging::Overlapping);

/// Partitions samples into `count` equal contiguous groups (remainder
/// dropped) and builds one feature vector per group.
std::vector<FeatureVector> batch_features(std::span<const sampler::MubSample> samples, int count,
                                          int n, int r, const ShadowTable& table,
                                          Averaging mode = Averaging::Overlapping);

}  // namespace qphase::shadows
