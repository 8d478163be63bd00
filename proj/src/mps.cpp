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

#include "qphase/mps.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>

namespace qphase::mps {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2cd vec_to_matrix(const Eigen::Vector4cd& v) {
    Eigen::Matrix2cd m;
    m << v(0), v(1), v(2), v(3);  // row-major
    return m;
}

/// Phase-fix, symmetrize and positivity-project an approximate Hermitian
/// PSD eigenvector of the transfer map. Eigenvectors come with an
/// arbitrary complex phase; the dominant fixed point has nonzero trace, so
/// rotating the trace onto the positive real axis recovers Hermiticity.
Eigen::Matrix2cd fix_hermitian_psd(Eigen::Matrix2cd m) {
    Complex t = m.trace();
    if (std::abs(t) > 1e-14) m *= std::conj(t) / std::abs(t);
    m = ((m + m.adjoint()) / 2.0).eval();
    if (m.trace().real() < 0) m = -m;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    Eigen::Vector2d w = es.eigenvalues();
    for (int i = 0; i < 2; ++i) {
        if (w(i) < -1e-10 * std::max(1.0, w.cwiseAbs().maxCoeff()))
            throw ContractionError("transfer fixed point is not positive semidefinite");
        w(i) = std::max(w(i), 0.0);
    }
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

struct Spectrum {
    double lambda = 0.0;
    double gap = 0.0;
    Eigen::Matrix2cd left;
    Eigen::Matrix2cd right;
    Eigen::Matrix4cd t_raw;
};

Eigen::Matrix4cd transfer_matrix_raw(const MpsFamily& state) {
    Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
    for (const auto& b : state.tensors) {
        Eigen::Matrix2cd bc = b.conjugate();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                t.block<2, 2>(2 * i, 2 * j) += b(i, j) * bc;
    }
    return t;
}

Spectrum transfer_spectrum(const MpsFamily& state) {
    Spectrum sp;
    sp.t_raw = transfer_matrix_raw(state);

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(sp.t_raw);
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
    });
    double a0 = std::abs(es.eigenvalues()(order[0]));
    double a1 = std::abs(es.eigenvalues()(order[1]));
    sp.lambda = es.eigenvalues()(order[0]).real();
    sp.gap = a0 > 0 ? (a0 - a1) / a0 : 0.0;
    sp.right = fix_hermitian_psd(vec_to_matrix(es.eigenvectors().col(order[0])));

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> esl(sp.t_raw.adjoint().eval());
    std::array<int, 4> orderl{0, 1, 2, 3};
    std::sort(orderl.begin(), orderl.end(), [&](int a, int b) {
        return std::abs(esl.eigenvalues()(a)) > std::abs(esl.eigenvalues()(b));
    });
    sp.left = fix_hermitian_psd(vec_to_matrix(esl.eigenvectors().col(orderl[0])));
    return sp;
}

Eigen::Matrix2cd hermitian_sqrt(const Eigen::Matrix2cd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    Eigen::Vector2d w = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

/// Analytic g->0 limit of the right-canonical form. At g = 0 the families
/// degenerate into an equal cat mixture of two one-dimensional sectors;
/// the canonical tensors are the sector weights on the diagonal and the
/// left environment is I/2.
MpsFamily canonical_limit_at_zero(Family family) {
    MpsFamily out;
    out.family = family;
    out.g = 0.0;
    out.d = local_dimension(family);
    out.canonical = true;
    out.left_env = Eigen::Matrix2cd::Identity() / 2.0;
    out.right_env = Eigen::Matrix2cd::Identity();
    if (family == Family::SpinHalf) {
        Eigen::Matrix2cd b0, b1;
        b0 << 0, 0, 0, 1;
        b1 << 1, 0, 0, 0;
        out.tensors = {b0, b1};
    } else {
        const double s6 = std::sqrt(6.0);
        const double s3 = std::sqrt(3.0);
        Eigen::Matrix2cd bp = Eigen::Matrix2cd::Zero();
        bp(0, 0) = (1.0 + kI) / s6;
        bp(1, 1) = -(1.0 + kI) / s6;
        Eigen::Matrix2cd bo = Eigen::Matrix2cd::Identity() / s3;
        out.tensors = {bp, bo, bp.conjugate()};
    }
    return out;
}

void check_hermitian(const Eigen::MatrixXcd& op, int d) {
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("operator dimension does not match the local dimension");
    if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("operator is not Hermitian");
}

/// M -> sum_{s,s'} O(s',s) B_s M B_{s'}^dag, the right-to-left
/// operator-dressed transfer step.
Eigen::Matrix2cd apply_dressed_transfer(const std::vector<Eigen::Matrix2cd>& tensors,
                                        const Eigen::MatrixXcd& op,
                                        const Eigen::Matrix2cd& m) {
    const int d = static_cast<int>(tensors.size());
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int s = 0; s < d; ++s) {
        Eigen::Matrix2cd bm = tensors[s] * m;
        for (int sp = 0; sp < d; ++sp) {
            Complex c = op(sp, s);
            if (c != 0.0) out += c * (bm * tensors[sp].adjoint());
        }
    }
    return out;
}

}  // namespace

TransferDegeneracyError::TransferDegeneracyError(double gap_value)
    : std::runtime_error("degenerate transfer spectrum, relative gap = " +
                         std::to_string(gap_value)),
      gap(gap_value) {}

int local_dimension(Family family) { return family == Family::SpinHalf ? 2 : 3; }

std::string family_name(Family family) {
    return family == Family::SpinHalf ? "spin-half" : "spin-one";
}

Family family_from_name(std::string_view name) {
    if (name == "spin-half" || name == "spin-1/2" || name == "half") return Family::SpinHalf;
    if (name == "spin-one" || name == "spin-1" || name == "one") return Family::SpinOne;
    throw std::invalid_argument("unknown family: " + std::string(name));
}

MpsFamily build_family(Family family, double g) {
    if (!(g >= -1.0 && g <= 1.0)) throw std::domain_error("g must lie in [-1, 1]");
    MpsFamily out;
    out.family = family;
    out.g = g;
    out.d = local_dimension(family);
    if (family == Family::SpinHalf) {
        Eigen::Matrix2cd b0, b1;
        b0 << 0, 0, 1, 1;
        b1 << 1, g, 0, 0;
        out.tensors = {b0, b1};
    } else {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        Eigen::Matrix2cd bp, bo;
        bp << (1.0 - g) / 2.0 + kI * (1.0 + g) / 2.0, kI * g,
              -kI, (g - 1.0) / 2.0 - kI * (1.0 + g) / 2.0;
        bp *= inv_sqrt2;
        bo << (1.0 + g) / 2.0, g, 1.0, (1.0 + g) / 2.0;
        out.tensors = {bp, bo, bp.conjugate()};
    }
    return out;
}

TransferMatrix transfer_fixed_points(const MpsFamily& state) {
    Spectrum sp = transfer_spectrum(state);
    if (sp.gap < kTransferGapTol) throw TransferDegeneracyError(sp.gap);
    TransferMatrix tm;
    tm.lambda_raw = sp.lambda;
    tm.matrix = sp.t_raw / sp.lambda;
    tm.lambda_max = 1.0;
    tm.gap = sp.gap;
    tm.right = sp.right / sp.right.trace().real();
    double overlap = (sp.left * tm.right).trace().real();
    if (std::abs(overlap) < 1e-14)
        throw TransferDegeneracyError(sp.gap);
    tm.left = sp.left / overlap;
    return tm;
}

RightCanonicalForm right_canonicalize(const MpsFamily& state) {
    Spectrum sp = transfer_spectrum(state);
    if (sp.gap < kTransferGapTol) {
        if (std::abs(state.g) > 1e-9) throw TransferDegeneracyError(sp.gap);
        RightCanonicalForm out;
        out.state = canonical_limit_at_zero(state.family);
        out.gauge = hermitian_sqrt(sp.right / sp.right.trace().real());
        out.lambda = sp.lambda;
        return out;
    }

    Eigen::Matrix2cd x = hermitian_sqrt(sp.right);
    Eigen::Matrix2cd xi = x.inverse();
    const double scale = 1.0 / std::sqrt(sp.lambda);

    RightCanonicalForm out;
    out.state = state;
    out.state.canonical = true;
    for (auto& b : out.state.tensors) b = (xi * b * x * scale).eval();
    out.state.right_env = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd lt = x * sp.left * x;
    out.state.left_env = lt / lt.trace().real();
    out.gauge = x;
    out.lambda = sp.lambda;
    return out;
}

MpsFamily canonicalized(const MpsFamily& state) {
    return state.canonical ? state : right_canonicalize(state).state;
}

double expectation(const MpsFamily& state, const std::vector<SiteOperator>& ops) {
    if (ops.empty()) throw std::invalid_argument("operator string is empty");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        check_hermitian(ops[i].op, state.d);
        if (i > 0 && ops[i].site <= ops[i - 1].site)
            throw std::invalid_argument("operator sites must be strictly increasing");
    }

    Eigen::Matrix2cd left, right;
    const std::vector<Eigen::Matrix2cd>* tensors = &state.tensors;
    MpsFamily scratch;
    if (state.canonical) {
        left = state.left_env;
        right = state.right_env;
    } else {
        TransferMatrix tm = transfer_fixed_points(state);
        scratch = state;
        for (auto& b : scratch.tensors) b /= std::sqrt(tm.lambda_raw);
        tensors = &scratch.tensors;
        left = tm.left;
        right = tm.right;
    }

    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(state.d, state.d);
    Eigen::Matrix2cd m = right;
    int next_op = static_cast<int>(ops.size()) - 1;
    for (int site = ops.back().site; site >= ops.front().site; --site) {
        const Eigen::MatrixXcd* op = &identity;
        if (next_op >= 0 && ops[next_op].site == site) {
            op = &ops[next_op].op;
            --next_op;
        }
        m = apply_dressed_transfer(*tensors, *op, m);
    }
    Complex val = (left * m).trace();
    if (std::abs(val.imag()) > 1e-8)
        throw ContractionError("contraction has imaginary part " + std::to_string(val.imag()));
    return val.real();
}

double string_order_closed_form(Family family, double g) {
    if (!(g >= -1.0 && g <= 1.0)) throw std::domain_error("g must lie in [-1, 1]");
    if (g >= 0.0) return 0.0;
    double denom = (1.0 - g) * (1.0 - g);
    return family == Family::SpinHalf ? -4.0 * g / denom : -(16.0 / 9.0) * g / denom;
}

Eigen::MatrixXcd marginal_density(const MpsFamily& canonical_state, int sites) {
    if (!canonical_state.canonical)
        throw std::invalid_argument("marginal_density requires a canonical state");
    if (sites < 1) throw std::invalid_argument("need at least one site");
    const int d = canonical_state.d;
    long dim = 1;
    for (int i = 0; i < sites; ++i) dim *= d;

    // Ket-side partial products: row-major config index -> product of
    // site tensors. Built level by level to reuse prefixes.
    std::vector<Eigen::Matrix2cd> prod(static_cast<std::size_t>(dim));
    std::vector<Eigen::Matrix2cd> prev{Eigen::Matrix2cd::Identity()};
    for (int i = 0; i < sites; ++i) {
        std::vector<Eigen::Matrix2cd> cur(prev.size() * d);
        for (std::size_t p = 0; p < prev.size(); ++p)
            for (int s = 0; s < d; ++s)
                cur[p * d + s] = prev[p] * canonical_state.tensors[s];
        prev = std::move(cur);
    }
    prod = std::move(prev);

    Eigen::MatrixXcd rho(dim, dim);
    for (long a = 0; a < dim; ++a)
        for (long b = 0; b < dim; ++b)
            rho(a, b) = (canonical_state.left_env * prod[a] * prod[b].adjoint()).trace();
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    return rho;
}

OperatorBasis OperatorBasis::pauli() {
    OperatorBasis b;
    b.d = 2;
    b.names = {"X", "Y", "Z"};
    b.ops = {pauli_x(), pauli_y(), pauli_z()};
    return b;
}

OperatorBasis OperatorBasis::spin_one() {
    OperatorBasis b;
    b.d = 3;
    b.names = {"tx", "ty", "tz", "tx2", "ty2", "tz2"};
    Eigen::Matrix3cd tx = tau_x(), ty = tau_y(), tz = tau_z();
    b.ops = {tx, ty, tz, tx * tx, ty * ty, tz * tz};
    return b;
}

OperatorBasis OperatorBasis::for_dimension(int d) {
    if (d == 2) return pauli();
    if (d == 3) return spin_one();
    throw std::invalid_argument("unsupported local dimension " + std::to_string(d));
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0, -kI, kI, 0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix3cd tau_x() {
    Eigen::Matrix3cd m;
    m << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    return m / std::sqrt(2.0);
}

Eigen::Matrix3cd tau_y() {
    Eigen::Matrix3cd m;
    m << 0, -kI, 0, kI, 0, -kI, 0, kI, 0;
    return m / std::sqrt(2.0);
}

Eigen::Matrix3cd tau_z() {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = 1;
    m(2, 2) = -1;
    return m;
}

Eigen::Matrix3cd tau_string_phase() {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = -1;
    m(1, 1) = 1;
    m(2, 2) = -1;
    return m;
}

}  // namespace qphase::mps
