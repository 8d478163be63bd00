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

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qphase::mps {

using Complex = std::complex<double>;

/// The two bond-dimension-2 translation-invariant families handled by this
/// toolkit. SpinHalf interpolates between a product state (g = +1) and a
/// cluster-type state (g = -1); SpinOne between a product state (g = +1)
/// and an AKLT-type state (g = -1). Both have a transition at g = 0, where
/// the transfer matrix becomes degenerate and the state is a cat state.
enum class Family { SpinHalf, SpinOne };

int local_dimension(Family family);
std::string family_name(Family family);
Family family_from_name(std::string_view name);

/// Thrown when the transfer matrix has a (near-)degenerate dominant
/// eigenvalue, carrying the measured relative gap.
struct TransferDegeneracyError : std::runtime_error {
    double gap;
    explicit TransferDegeneracyError(double gap_value);
};

/// Thrown when a transfer contraction produces a result with an imaginary
/// part too large to be numerical noise.
struct ContractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Site tensors B_s(g): d complex 2x2 matrices, row = left bond index,
/// column = right bond index. After right-canonicalization the tensors
/// satisfy sum_s B_s B_s^dag = I, right_env = I and left_env is the
/// trace-one left fixed point of the canonical transfer map.
struct MpsFamily {
    Family family = Family::SpinHalf;
    double g = 0.0;
    int d = 2;
    std::vector<Eigen::Matrix2cd> tensors;
    bool canonical = false;
    Eigen::Matrix2cd left_env = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd right_env = Eigen::Matrix2cd::Zero();
};

/// T = sum_s B_s (x) conj(B_s), stored rescaled so the dominant eigenvalue
/// is 1. Acting on row-major-vectorized M it implements M -> sum B M B^dag.
/// `left`/`right` are the Hermitian PSD fixed points with tr(left*right)=1
/// (right additionally normalized to unit trace).
struct TransferMatrix {
    Eigen::Matrix4cd matrix;
    double lambda_raw = 0.0;   // dominant eigenvalue before rescaling
    double lambda_max = 1.0;   // after rescaling (kept as a checked field)
    double gap = 0.0;          // relative gap to the subleading eigenvalue
    Eigen::Matrix2cd left;
    Eigen::Matrix2cd right;
};

/// Named Hermitian single-site operators used for feature construction:
/// {X, Y, Z} for d=2 and the spin-1 set {tx, ty, tz, tx2, ty2, tz2}.
struct OperatorBasis {
    int d = 2;
    std::vector<std::string> names;
    std::vector<Eigen::MatrixXcd> ops;

    static OperatorBasis pauli();
    static OperatorBasis spin_one();
    static OperatorBasis for_dimension(int d);
};

struct SiteOperator {
    int site = 0;
    Eigen::MatrixXcd op;
};

struct RightCanonicalForm {
    MpsFamily state;
    Eigen::Matrix2cd gauge;  // Hermitian square root of the right fixed point
    double lambda = 1.0;     // transfer eigenvalue absorbed into the tensors
};

inline constexpr double kTransferGapTol = 1e-12;

/// Site tensors for (family, g), g in [-1, 1]. Deterministic; throws
/// std::domain_error outside the parameter range.
MpsFamily build_family(Family family, double g);

/// Fixed points of the transfer map via dense 4x4 eigendecomposition.
/// Throws TransferDegeneracyError when the relative gap is below
/// kTransferGapTol (for these families that happens only at g = 0).
TransferMatrix transfer_fixed_points(const MpsFamily& state);

/// Gauge-transforms to right-canonical form using the Hermitian positive
/// square root of the right fixed point. At the degenerate point g = 0 the
/// gauge is singular and the analytic g->0 limit of the canonical form is
/// returned instead (the construction is continuous in g even though the
/// gauge is not); the returned gauge there is the singular square root.
RightCanonicalForm right_canonicalize(const MpsFamily& state);

/// Convenience wrapper returning just the canonical state.
MpsFamily canonicalized(const MpsFamily& state);

/// Infinite-chain expectation of a product of single-site operators at
/// strictly increasing sites, contracted between the transfer fixed
/// points. Canonical input uses its stored environments; non-canonical
/// input uses its own fixed points (equal results, up to gauge-invariant
/// numerics). Operators must be Hermitian d x d.
double expectation(const MpsFamily& state, const std::vector<SiteOperator>& ops);

/// Closed-form infinite-string limit: -4g/(1-g)^2 for SpinHalf and
/// -(16/9) g/(1-g)^2 for SpinOne when g < 0, and 0 for g >= 0. Reported
/// with the conventional positive normalization; the exponential-string
/// expectation itself is negative for the spin-one family, and the
/// (3/2)(tz)^2-normalized string alternates sign with the string length.
double string_order_closed_form(Family family, double g);

/// Reduced density matrix of `sites` consecutive sites of the infinite
/// chain (boundaries = fixed points), as a d^sites x d^sites matrix in
/// row-major site order. Requires a canonical state.
Eigen::MatrixXcd marginal_density(const MpsFamily& canonical_state, int sites);

// Single-site operator constants.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix3cd tau_x();
Eigen::Matrix3cd tau_y();
Eigen::Matrix3cd tau_z();
/// exp(i pi tau_z) = diag(-1, 1, -1), equal to
/// -(3/2) tz^2 + (1/2) tx^2 + (1/2) ty^2.
Eigen::Matrix3cd tau_string_phase();

}  // namespace qphase::mps
