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

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qphase/mps.hpp"
#include "qphase/shadows.hpp"

namespace qphase::svm {

/// Thrown when the pairwise solver fails to reach the KKT tolerance within
/// the iteration cap; carries the residual violation.
struct ConvergenceError : std::runtime_error {
    double kkt_residual;
    explicit ConvergenceError(double residual);
};

struct TrainOptions {
    double c = 1000.0;     // box constraint (near-hard margin by default)
    double tol = 1e-6;     // KKT violation tolerance
    long max_iter = 1000000;  // cap on pair updates
};

/// Soft-margin linear-kernel model. Decision function:
/// D(phi) = sum_k weights[k] * labels[k] * <support[k], phi> - bias.
/// Class A carries label -1, class B label +1.
struct SvmModel {
    long dimension = 0;
    std::vector<Eigen::VectorXd> support;
    std::vector<double> weights;  // dual weights, in (0, C]
    std::vector<int> labels;
    std::vector<long> support_indices;  // into the training order (A then B)
    double bias = 0.0;
    double c = 0.0;
    long iterations = 0;
    double kkt_violation = 0.0;
};

/// Trains by sequential pairwise optimization with the working pair chosen
/// by maximal KKT violation (ties broken toward the lowest index).
SvmModel train(std::span<const Eigen::VectorXd> class_a, std::span<const Eigen::VectorXd> class_b,
               const TrainOptions& options = {});

/// Convenience overload for feature vectors (class A = -1, class B = +1).
SvmModel train_features(std::span<const shadows::FeatureVector> class_a,
                        std::span<const shadows::FeatureVector> class_b,
                        const TrainOptions& options = {});

double decision(const SvmModel& model, const Eigen::VectorXd& phi);

Eigen::VectorXd to_vector(const shadows::FeatureVector& fv);

/// Structure constants C_mu = sum_k weights[k] labels[k] support[k]_mu,
/// indexed identically to the feature-vector components; mask flags mark
/// entries excluded from ranking output (values are preserved).
struct CoefficientVector {
    int n = 0;
    int r = 1;
    int basis_size = 0;
    Eigen::VectorXd values;
    std::vector<char> masked;
};

CoefficientVector coefficient_vector(const SvmModel& model, int n, int r, int basis_size);

/// Flags identity-insertion redundancy: for each monomial position holding
/// a squared operator, if the three siblings that differ only in which
/// squared operator sits there carry coefficients equal within relative
/// tolerance 0.2, all three are masked. The squared-operator triple is the
/// subset of basis elements whose sum is proportional to the identity
/// (absent for d=2, so the d=2 basis passes through unchanged).
CoefficientVector mask_redundant(CoefficientVector coeffs, const mps::OperatorBasis& basis,
                                 double rel_tol = 0.2);

/// Indices of the basis ops forming the identity-sum triple, empty if none.
std::vector<int> squared_operator_indices(const mps::OperatorBasis& basis);

}  // namespace qphase::svm
