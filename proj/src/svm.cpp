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

#include "qphase/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qphase::svm {

namespace {

bool in_up_set(double alpha, int y, double c) {
    return (y > 0 && alpha < c) || (y < 0 && alpha > 0);
}

bool in_low_set(double alpha, int y, double c) {
    return (y < 0 && alpha < c) || (y > 0 && alpha > 0);
}

struct Violation {
    int up = -1;
    int low = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    double value() const { return m_up - m_low; }
};

Violation max_violation(const std::vector<double>& alpha, const std::vector<int>& y,
                        const std::vector<double>& f, double c) {
    Violation v;
    const int n = static_cast<int>(alpha.size());
    for (int k = 0; k < n; ++k) {
        auto ks = static_cast<std::size_t>(k);
        double g = y[ks] - f[ks];
        if (in_up_set(alpha[ks], y[ks], c) && g > v.m_up) {
            v.m_up = g;
            v.up = k;
        }
        if (in_low_set(alpha[ks], y[ks], c) && g < v.m_low) {
            v.m_low = g;
            v.low = k;
        }
    }
    return v;
}

std::vector<double> gradient_from_alpha(const Eigen::MatrixXd& gram,
                                        const std::vector<double>& alpha,
                                        const std::vector<int>& y) {
    const int n = static_cast<int>(alpha.size());
    std::vector<double> f(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        auto js = static_cast<std::size_t>(j);
        if (alpha[js] == 0.0) continue;
        double w = alpha[js] * y[js];
        for (int k = 0; k < n; ++k) f[static_cast<std::size_t>(k)] += w * gram(j, k);
    }
    return f;
}

/// Active-set polish: pairwise steps crawl when several free multipliers
/// share an ill-conditioned subspace, so once the working sets have
/// roughly stabilized the margin conditions are solved exactly, moving
/// indices between the free/bound/zero sets as the solution dictates.
/// Overwrites alpha and f only on reaching the global KKT tolerance.
bool try_finishing_solve(const Eigen::MatrixXd& gram, const std::vector<int>& y, double c,
                         double tol, std::vector<double>& alpha, std::vector<double>& f) {
    const int n = static_cast<int>(alpha.size());
    enum : char { kZero, kFree, kBound };
    std::vector<char> set(static_cast<std::size_t>(n), kZero);
    for (int k = 0; k < n; ++k) {
        auto ks = static_cast<std::size_t>(k);
        if (alpha[ks] >= c)
            set[ks] = kBound;
        else if (alpha[ks] > 0)
            set[ks] = kFree;
    }

    const int max_passes = 8 * n + 16;
    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<int> free_set;
        for (int k = 0; k < n; ++k)
            if (set[static_cast<std::size_t>(k)] == kFree) free_set.push_back(k);
        if (free_set.empty()) return false;
        const int m = static_cast<int>(free_set.size());

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        double bound_balance = 0;
        for (int k = 0; k < n; ++k)
            if (set[static_cast<std::size_t>(k)] == kBound)
                bound_balance += c * y[static_cast<std::size_t>(k)];
        for (int row = 0; row < m; ++row) {
            int ri = free_set[static_cast<std::size_t>(row)];
            auto rs = static_cast<std::size_t>(ri);
            for (int col = 0; col < m; ++col) {
                int ci = free_set[static_cast<std::size_t>(col)];
                a(row, col) = y[rs] * y[static_cast<std::size_t>(ci)] * gram(ri, ci);
            }
            a(row, m) = -static_cast<double>(y[rs]);
            double bound_term = 0;
            for (int k = 0; k < n; ++k)
                if (set[static_cast<std::size_t>(k)] == kBound)
                    bound_term += c * y[static_cast<std::size_t>(k)] * gram(k, ri);
            rhs(row) = 1.0 - y[rs] * bound_term;
        }
        for (int col = 0; col < m; ++col)
            a(m, col) = static_cast<double>(
                y[static_cast<std::size_t>(free_set[static_cast<std::size_t>(col)])]);
        rhs(m) = -bound_balance;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) return false;
        Eigen::VectorXd sol = lu.solve(rhs);

        // Demote the worst box violator and re-solve.
        int worst = -1;
        double excess = 1e-9;
        bool to_bound = false;
        for (int col = 0; col < m; ++col) {
            if (-sol(col) > excess) {
                excess = -sol(col);
                worst = free_set[static_cast<std::size_t>(col)];
                to_bound = false;
            }
            if (sol(col) - c > excess) {
                excess = sol(col) - c;
                worst = free_set[static_cast<std::size_t>(col)];
                to_bound = true;
            }
        }
        if (worst >= 0) {
            set[static_cast<std::size_t>(worst)] = to_bound ? kBound : kZero;
            continue;
        }

        std::vector<double> candidate(static_cast<std::size_t>(n), 0.0);
        for (int k = 0; k < n; ++k)
            if (set[static_cast<std::size_t>(k)] == kBound)
                candidate[static_cast<std::size_t>(k)] = c;
        for (int col = 0; col < m; ++col)
            candidate[static_cast<std::size_t>(free_set[static_cast<std::size_t>(col)])] =
                std::clamp(sol(col), 0.0, c);

        std::vector<double> cand_f = gradient_from_alpha(gram, candidate, y);
        Violation v = max_violation(candidate, y, cand_f, c);
        if (v.up < 0 || v.low < 0 || v.value() <= tol) {
            alpha = std::move(candidate);
            f = std::move(cand_f);
            return true;
        }
        // Promote the most KKT-violating non-free index into the free set.
        int promote = -1;
        if (set[static_cast<std::size_t>(v.up)] != kFree)
            promote = v.up;
        else if (set[static_cast<std::size_t>(v.low)] != kFree)
            promote = v.low;
        if (promote < 0) return false;
        set[static_cast<std::size_t>(promote)] = kFree;
    }
    return false;
}

}  // namespace

ConvergenceError::ConvergenceError(double residual)
    : std::runtime_error("pairwise optimization did not converge, KKT violation = " +
                         std::to_string(residual)),
      kkt_residual(residual) {}

SvmModel train(std::span<const Eigen::VectorXd> class_a, std::span<const Eigen::VectorXd> class_b,
               const TrainOptions& options) {
    if (class_a.empty() || class_b.empty())
        throw std::invalid_argument("both classes must be non-empty");
    const long dim = class_a[0].size();
    for (const auto& v : class_a)
        if (v.size() != dim) throw std::invalid_argument("feature dimension mismatch in class A");
    for (const auto& v : class_b)
        if (v.size() != dim) throw std::invalid_argument("feature dimension mismatch in class B");

    const int n = static_cast<int>(class_a.size() + class_b.size());
    std::vector<const Eigen::VectorXd*> x(static_cast<std::size_t>(n));
    std::vector<int> y(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < class_a.size(); ++k) {
        x[k] = &class_a[k];
        y[k] = -1;
    }
    for (std::size_t k = 0; k < class_b.size(); ++k) {
        x[class_a.size() + k] = &class_b[k];
        y[class_a.size() + k] = +1;
    }

    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double k = x[static_cast<std::size_t>(i)]->dot(*x[static_cast<std::size_t>(j)]);
            gram(i, j) = k;
            gram(j, i) = k;
        }

    const double c = options.c;
    const double snap = c * 1e-12;
    const long finish_interval = std::max(64, 4 * n);
    std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
    std::vector<double> f(static_cast<std::size_t>(n), 0.0);  // F_k = sum_j a_j y_j K_jk

    long iter = 0;
    double residual = std::numeric_limits<double>::infinity();
    Violation v;
    while (iter < options.max_iter) {
        v = max_violation(alpha, y, f, c);
        residual = v.value();
        if (v.up < 0 || v.low < 0 || residual <= options.tol) break;

        // Exact solve on the stabilized free set; pairwise steps alone
        // crawl when free multipliers share an ill-conditioned subspace.
        if (iter > 0 && iter % finish_interval == 0 &&
            try_finishing_solve(gram, y, c, options.tol, alpha, f)) {
            v = max_violation(alpha, y, f, c);
            residual = std::max(v.value(), 0.0);
            break;
        }

        const int i = v.up;
        auto is = static_cast<std::size_t>(i);
        const double g_i = y[is] - f[is];

        // Paired index: largest guaranteed objective decrease among the
        // admissible lower set (ties toward the lowest index).
        int j = -1;
        double best_gain = -1.0;
        for (int t = 0; t < n; ++t) {
            auto ts = static_cast<std::size_t>(t);
            double g_t = y[ts] - f[ts];
            if (!in_low_set(alpha[ts], y[ts], c) || g_t >= g_i) continue;
            double diff = g_i - g_t;
            double curv = std::max(gram(i, i) + gram(t, t) - 2.0 * gram(i, t), 1e-12);
            double gain = diff * diff / curv;
            if (gain > best_gain) {
                best_gain = gain;
                j = t;
            }
        }
        if (j < 0) break;
        auto js = static_cast<std::size_t>(j);

        double eta = std::max(gram(i, i) + gram(j, j) - 2.0 * gram(i, j), 1e-12);
        double e_i = f[is] - y[is];
        double e_j = f[js] - y[js];
        double aj_new = alpha[js] + y[js] * (e_i - e_j) / eta;

        double lo, hi;
        if (y[is] != y[js]) {
            lo = std::max(0.0, alpha[js] - alpha[is]);
            hi = std::min(c, c + alpha[js] - alpha[is]);
        } else {
            lo = std::max(0.0, alpha[is] + alpha[js] - c);
            hi = std::min(c, alpha[is] + alpha[js]);
        }
        aj_new = std::clamp(aj_new, lo, hi);
        // Snap to the box corners so clipped pairs leave no sub-epsilon
        // residue that would keep an index in the working sets forever.
        if (aj_new < snap) aj_new = 0.0;
        if (aj_new > c - snap) aj_new = c;
        double delta_j = aj_new - alpha[js];
        if (std::abs(delta_j) < 1e-15) {
            if (try_finishing_solve(gram, y, c, options.tol, alpha, f)) {
                v = max_violation(alpha, y, f, c);
                residual = std::max(v.value(), 0.0);
            }
            break;
        }
        double ai_new = alpha[is] + y[is] * y[js] * (alpha[js] - aj_new);
        if (ai_new < snap) ai_new = 0.0;
        if (ai_new > c - snap) ai_new = c;

        double delta_fi = (ai_new - alpha[is]) * y[is];
        double delta_fj = delta_j * y[js];
        alpha[is] = ai_new;
        alpha[js] = aj_new;
        for (int k = 0; k < n; ++k)
            f[static_cast<std::size_t>(k)] += delta_fi * gram(i, k) + delta_fj * gram(j, k);
        ++iter;
    }
    if (residual > options.tol && try_finishing_solve(gram, y, c, options.tol, alpha, f)) {
        v = max_violation(alpha, y, f, c);
        residual = std::max(v.value(), 0.0);
    }
    if (residual > options.tol) throw ConvergenceError(residual);

    SvmModel model;
    model.dimension = dim;
    model.bias = -(v.m_up + v.m_low) / 2.0;
    model.c = c;
    model.iterations = iter;
    model.kkt_violation = residual;
    for (int k = 0; k < n; ++k) {
        auto ks = static_cast<std::size_t>(k);
        if (alpha[ks] > 0.0) {
            model.support.push_back(*x[ks]);
            model.weights.push_back(alpha[ks]);
            model.labels.push_back(y[ks]);
            model.support_indices.push_back(k);
        }
    }
    return model;
}

SvmModel train_features(std::span<const shadows::FeatureVector> class_a,
                        std::span<const shadows::FeatureVector> class_b,
                        const TrainOptions& options) {
    std::vector<Eigen::VectorXd> a, b;
    a.reserve(class_a.size());
    b.reserve(class_b.size());
    for (const auto& fv : class_a) a.push_back(to_vector(fv));
    for (const auto& fv : class_b) b.push_back(to_vector(fv));
    return train(a, b, options);
}

double decision(const SvmModel& model, const Eigen::VectorXd& phi) {
    if (phi.size() != model.dimension)
        throw std::invalid_argument("feature dimension does not match the model");
    double acc = 0.0;
    for (std::size_t k = 0; k < model.support.size(); ++k)
        acc += model.weights[k] * model.labels[k] * model.support[k].dot(phi);
    return acc - model.bias;
}

Eigen::VectorXd to_vector(const shadows::FeatureVector& fv) {
    return Eigen::Map<const Eigen::VectorXd>(fv.values.data(),
                                             static_cast<long>(fv.values.size()));
}

CoefficientVector coefficient_vector(const SvmModel& model, int n, int r, int basis_size) {
    if (shadows::feature_dimension(n, r, basis_size) != model.dimension)
        throw std::invalid_argument("(n, r, |B|) does not match the model dimension");
    CoefficientVector cv;
    cv.n = n;
    cv.r = r;
    cv.basis_size = basis_size;
    cv.values = Eigen::VectorXd::Zero(model.dimension);
    for (std::size_t k = 0; k < model.support.size(); ++k)
        cv.values += model.weights[k] * model.labels[k] * model.support[k];
    cv.masked.assign(static_cast<std::size_t>(model.dimension), 0);
    return cv;
}

std::vector<int> squared_operator_indices(const mps::OperatorBasis& basis) {
    const int nb = static_cast<int>(basis.ops.size());
    for (int a = 0; a < nb; ++a)
        for (int b = a + 1; b < nb; ++b)
            for (int c = b + 1; c < nb; ++c) {
                Eigen::MatrixXcd sum = basis.ops[static_cast<std::size_t>(a)] +
                                       basis.ops[static_cast<std::size_t>(b)] +
                                       basis.ops[static_cast<std::size_t>(c)];
                double scale = sum.trace().real() / basis.d;
                if (std::abs(scale) < 1e-12) continue;
                Eigen::MatrixXcd diff =
                    sum - scale * Eigen::MatrixXcd::Identity(basis.d, basis.d);
                if (diff.cwiseAbs().maxCoeff() < 1e-12) return {a, b, c};
            }
    return {};
}

CoefficientVector mask_redundant(CoefficientVector coeffs, const mps::OperatorBasis& basis,
                                 double rel_tol) {
    std::vector<int> squared = squared_operator_indices(basis);
    if (squared.size() != 3) return coeffs;
    const int nb = coeffs.basis_size;
    const int r = coeffs.r;

    // Walk components in the frozen order (site tuple major, operator
    // tuple minor). Within one site tuple the operator tuples enumerate a
    // base-|B| odometer, so siblings at position p differ by a fixed
    // stride |B|^(r-1-p).
    long ops_block = 1;
    for (int i = 0; i < r; ++i) ops_block *= nb;
    const long dim = coeffs.values.size();

    for (long block = 0; block < dim; block += ops_block) {
        for (long t = 0; t < ops_block; ++t) {
            long rest = t;
            std::vector<int> opsel(static_cast<std::size_t>(r));
            for (int p = r - 1; p >= 0; --p) {
                opsel[static_cast<std::size_t>(p)] = static_cast<int>(rest % nb);
                rest /= nb;
            }
            for (int p = 0; p < r; ++p) {
                if (opsel[static_cast<std::size_t>(p)] != squared[0]) continue;
                long stride = 1;
                for (int q = p + 1; q < r; ++q) stride *= nb;
                long base = block + t;
                double v0 = coeffs.values(base);
                double v1 = coeffs.values(base + stride * (squared[1] - squared[0]));
                double v2 = coeffs.values(base + stride * (squared[2] - squared[0]));
                double scale = std::max({std::abs(v0), std::abs(v1), std::abs(v2)});
                double spread = std::max({v0, v1, v2}) - std::min({v0, v1, v2});
                if (spread <= rel_tol * scale) {
                    for (int s : squared)
                        coeffs.masked[static_cast<std::size_t>(base +
                                                               stride * (s - squared[0]))] = 1;
                }
            }
        }
    }
    return coeffs;
}

}  // namespace qphase::svm
