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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qphase/rng.hpp"
#include "qphase/sampler.hpp"
#include "svm_oracle.hpp"

using namespace qphase;
using namespace qphase::svm;

namespace {

std::vector<Eigen::VectorXd> repeated_point(std::initializer_list<double> coords, int copies) {
    Eigen::VectorXd v(static_cast<long>(coords.size()));
    long i = 0;
    for (double c : coords) v(i++) = c;
    return std::vector<Eigen::VectorXd>(static_cast<std::size_t>(copies), v);
}

std::vector<Eigen::VectorXd> gaussian_blob(const Eigen::VectorXd& center, double spread, int count,
                                           std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v = center;
        for (long i = 0; i < v.size(); ++i) {
            double u1 = std::max(rng.uniform(), 1e-12), u2 = rng.uniform();
            v(i) += spread * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("symmetric separable pair: D(phi) = phi with zero bias") {
    auto a = repeated_point({-1.0}, 10);
    auto b = repeated_point({+1.0}, 10);
    SvmModel model = train(a, b);
    Eigen::VectorXd phi(1);
    phi << 0.0;
    CHECK(std::abs(decision(model, phi)) < 1e-8);
    CHECK(std::abs(model.bias) < 1e-8);
    phi << 0.7;
    CHECK(decision(model, phi) == doctest::Approx(0.7).epsilon(1e-8));
    // linearity through the origin model
    phi << 2.0;
    CHECK(decision(model, phi) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("margin support vectors satisfy y D = 1 at convergence") {
    auto a = gaussian_blob(Eigen::Vector2d(-2.0, 0.5), 0.3, 20, 1);
    auto b = gaussian_blob(Eigen::Vector2d(+2.0, -0.5), 0.3, 20, 2);
    TrainOptions opt;
    opt.c = 10.0;
    SvmModel model = train(a, b, opt);
    for (std::size_t k = 0; k < model.support.size(); ++k) {
        if (model.weights[k] < model.c - 1e-9) {  // free support vector
            double yd = model.labels[k] * decision(model, model.support[k]);
            CHECK(yd == doctest::Approx(1.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("dual feasibility invariants hold at convergence") {
    auto a = gaussian_blob(Eigen::Vector3d(-0.5, 0.2, 0.0), 0.5, 25, 3);
    auto b = gaussian_blob(Eigen::Vector3d(+0.5, -0.2, 0.1), 0.5, 25, 4);
    TrainOptions opt;
    opt.c = 2.0;
    SvmModel model = train(a, b, opt);
    double balance = 0;
    for (std::size_t k = 0; k < model.support.size(); ++k) {
        CHECK(model.weights[k] > 0.0);
        CHECK(model.weights[k] <= opt.c + 1e-12);
        balance += model.weights[k] * model.labels[k];
    }
    CHECK(std::abs(balance) < 1e-8);
    CHECK(model.kkt_violation <= opt.tol);
}

TEST_CASE("label swap negates the decision function") {
    auto a = gaussian_blob(Eigen::Vector2d(-1.0, 1.0), 0.4, 15, 5);
    auto b = gaussian_blob(Eigen::Vector2d(1.5, 0.0), 0.4, 15, 6);
    TrainOptions opt;
    opt.tol = 1e-10;  // antisymmetry holds at the optimum, so converge tightly
    SvmModel ab = train(a, b, opt);
    SvmModel ba = train(b, a, opt);
    for (const auto& probe : gaussian_blob(Eigen::Vector2d(0.0, 0.0), 2.0, 10, 7))
        CHECK(std::abs(decision(ab, probe) + decision(ba, probe)) < 1e-8);
    CHECK(std::abs(ab.bias + ba.bias) < 1e-8);
}

TEST_CASE("bias criterion: same-distribution classes give large bias, distinct give small") {
    // Two draws from one distribution far from the origin: inseparable in
    // any stable direction, the offset inflates |b|.
    Eigen::VectorXd center(3);
    center << 5.0, 4.0, 6.0;
    auto same1 = gaussian_blob(center, 0.5, 30, 8);
    auto same2 = gaussian_blob(center, 0.5, 30, 9);
    TrainOptions opt;
    opt.c = 100.0;
    SvmModel same = train(same1, same2, opt);
    CHECK(std::abs(same.bias) > 3.0);

    // Genuinely different classes: bias comparable to unity.
    Eigen::VectorXd c2 = center;
    c2(0) = -5.0;
    auto diff = train(gaussian_blob(center, 0.5, 30, 10), gaussian_blob(c2, 0.5, 30, 11), opt);
    CHECK(std::abs(diff.bias) < 3.0);
    CHECK(std::abs(same.bias) > 2.0 * std::abs(diff.bias));
}

TEST_CASE("coefficient vector reproduces the decision function") {
    auto a = gaussian_blob(Eigen::Vector3d(-1.0, 0.5, 0.2), 0.6, 12, 12);
    auto b = gaussian_blob(Eigen::Vector3d(0.8, -0.3, -0.1), 0.6, 12, 13);
    SvmModel model = train(a, b);
    // dim 3 = C(3,1)*3^1 with a 3-element basis
    CoefficientVector cv = coefficient_vector(model, 3, 1, 3);

    Eigen::VectorXd recomputed = Eigen::VectorXd::Zero(3);
    for (std::size_t k = 0; k < model.support.size(); ++k)
        recomputed += model.weights[k] * model.labels[k] * model.support[k];
    CHECK((cv.values - recomputed).cwiseAbs().maxCoeff() < 1e-10);

    for (const auto& probe : gaussian_blob(Eigen::Vector3d(0, 0, 0), 1.5, 8, 14)) {
        double via_model = decision(model, probe);
        double via_coeff = cv.values.dot(probe) - model.bias;
        CHECK(via_model == doctest::Approx(via_coeff).epsilon(1e-10));
    }

    CHECK_THROWS_AS(coefficient_vector(model, 2, 1, 3), std::invalid_argument);
}

TEST_CASE("squared-operator detection") {
    CHECK(squared_operator_indices(mps::OperatorBasis::pauli()).empty());
    auto idx = squared_operator_indices(mps::OperatorBasis::spin_one());
    REQUIRE(idx.size() == 3);
    CHECK(idx[0] == 3);
    CHECK(idx[1] == 4);
    CHECK(idx[2] == 5);
}

TEST_CASE("mask_redundant flags identity insertions and keeps distinct siblings") {
    mps::OperatorBasis basis = mps::OperatorBasis::spin_one();
    const int n = 3, r = 3, nb = 6;
    long dim = shadows::feature_dimension(n, r, nb);  // one site tuple, 216 op tuples
    CoefficientVector cv;
    cv.n = n;
    cv.r = r;
    cv.basis_size = nb;
    cv.values = Eigen::VectorXd::Zero(dim);
    cv.masked.assign(static_cast<std::size_t>(dim), 0);

    auto op_index = [nb](int a1, int a2, int a3) { return (a1 * nb + a2) * nb + a3; };
    // tz tz (a^2)_3 siblings nearly equal -> masked
    cv.values(op_index(2, 2, 3)) = -0.30;
    cv.values(op_index(2, 2, 4)) = -0.29;
    cv.values(op_index(2, 2, 5)) = -0.31;
    // tz (a^2)_2 tz siblings far apart (factor 3) -> kept
    cv.values(op_index(2, 3, 2)) = 0.10;
    cv.values(op_index(2, 4, 2)) = 0.10;
    cv.values(op_index(2, 5, 2)) = 0.30;

    CoefficientVector masked = mask_redundant(cv, basis);
    CHECK(masked.masked[static_cast<std::size_t>(op_index(2, 2, 3))] == 1);
    CHECK(masked.masked[static_cast<std::size_t>(op_index(2, 2, 4))] == 1);
    CHECK(masked.masked[static_cast<std::size_t>(op_index(2, 2, 5))] == 1);
    CHECK(masked.masked[static_cast<std::size_t>(op_index(2, 3, 2))] == 0);
    CHECK(masked.masked[static_cast<std::size_t>(op_index(2, 5, 2))] == 0);
    // values preserved
    CHECK(masked.values(op_index(2, 2, 3)) == doctest::Approx(-0.30));

    // d=2 basis: no identity triple, vector unchanged
    CoefficientVector cv2;
    cv2.n = 2;
    cv2.r = 1;
    cv2.basis_size = 3;
    cv2.values = Eigen::VectorXd::Constant(6, 0.5);
    cv2.masked.assign(6, 0);
    CoefficientVector out2 = mask_redundant(cv2, mps::OperatorBasis::pauli());
    for (char m : out2.masked) CHECK(m == 0);
}

TEST_CASE("solver matches the brute-force primal oracle on small instances") {
    Rng rng(2024);
    for (int inst = 0; inst < 8; ++inst) {
        int dim = 1 + static_cast<int>(rng.uniform_int(3));
        int na = 3 + static_cast<int>(rng.uniform_int(3));
        int nb = 3 + static_cast<int>(rng.uniform_int(3));
        double c = (inst % 2 == 0) ? 1.0 : 10.0;
        std::vector<Eigen::VectorXd> a, b;
        for (int k = 0; k < na; ++k) {
            Eigen::VectorXd v(dim);
            for (int i = 0; i < dim; ++i) v(i) = rng.uniform() * 2 - 1 - 0.4;
            a.push_back(v);
        }
        for (int k = 0; k < nb; ++k) {
            Eigen::VectorXd v(dim);
            for (int i = 0; i < dim; ++i) v(i) = rng.uniform() * 2 - 1 + 0.4;
            b.push_back(v);
        }
        TrainOptions opt;
        opt.c = c;
        SvmModel model = train(a, b, opt);

        testing::PrimalInstance pi;
        for (const auto& v : a) {
            pi.x.push_back(v);
            pi.y.push_back(-1);
        }
        for (const auto& v : b) {
            pi.x.push_back(v);
            pi.y.push_back(+1);
        }
        pi.c = c;
        double oracle = testing::brute_force_primal_optimum(pi);

        Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
        for (std::size_t k = 0; k < model.support.size(); ++k)
            w += model.weights[k] * model.labels[k] * model.support[k];
        double ours = testing::primal_objective(pi, w, model.bias);
        CHECK(ours >= oracle - 1e-9);
        CHECK(std::abs(ours - oracle) < 1e-4 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("non-convergence is reported with the KKT residual") {
    auto a = gaussian_blob(Eigen::Vector2d(-1, 0), 0.5, 10, 20);
    auto b = gaussian_blob(Eigen::Vector2d(1, 0), 0.5, 10, 21);
    TrainOptions opt;
    opt.max_iter = 1;
    CHECK_THROWS_AS(train(a, b, opt), ConvergenceError);
}

TEST_CASE("input validation") {
    auto a = repeated_point({1.0, 0.0}, 3);
    auto b = repeated_point({0.0}, 3);
    CHECK_THROWS_AS(train(a, b), std::invalid_argument);
    CHECK_THROWS_AS(train({}, a), std::invalid_argument);
    SvmModel model = train(a, repeated_point({-1.0, 0.5}, 3));
    Eigen::VectorXd wrong(3);
    wrong.setZero();
    CHECK_THROWS_AS(decision(model, wrong), std::invalid_argument);
}

TEST_CASE("end-to-end: opposite phases separate with order-one bias") {
    auto canon_m = mps::canonicalized(mps::build_family(mps::Family::SpinHalf, -1.0));
    auto canon_p = mps::canonicalized(mps::build_family(mps::Family::SpinHalf, 1.0));
    auto table = shadows::build_table(mps::OperatorBasis::pauli(), shadows::mub_set(2));
    auto sam_m = sampler::sample_mub(canon_m, 5, 30000, 31);
    auto sam_p = sampler::sample_mub(canon_p, 5, 30000, 32);
    auto feat_m = shadows::batch_features(sam_m, 30, 5, 3, table);
    auto feat_p = shadows::batch_features(sam_p, 30, 5, 3, table);

    SvmModel model = train_features(feat_m, feat_p);
    CHECK(std::abs(model.bias) < 2.0);
    int correct = 0;
    for (const auto& fv : feat_m)
        if (decision(model, to_vector(fv)) < 0) ++correct;
    for (const auto& fv : feat_p)
        if (decision(model, to_vector(fv)) > 0) ++correct;
    CHECK(correct == 60);
}

TEST_CASE("end-to-end: dominant coefficient for the spin-one pair correlator") {
    auto canon = mps::canonicalized(mps::build_family(mps::Family::SpinOne, -1.0));
    auto table = shadows::build_table(mps::OperatorBasis::spin_one(), shadows::mub_set(3));
    auto phase = sampler::sample_mub(canon, 2, 40000, 41);
    auto rnd = sampler::sample_random_uniform(3, 2, 40000, 42);
    auto f_phase = shadows::batch_features(phase, 20, 2, 2, table);
    auto f_rnd = shadows::batch_features(rnd, 20, 2, 2, table);
    SvmModel model = train_features(f_rnd, f_phase);  // random = -1, phase = +1
    CoefficientVector cv = coefficient_vector(model, 2, 2, 6);
    auto names = shadows::component_names(mps::OperatorBasis::spin_one(), 2, 2);
    long best = 0;
    for (long i = 1; i < cv.values.size(); ++i)
        if (std::abs(cv.values(i)) > std::abs(cv.values(best))) best = i;
    CHECK(names[static_cast<std::size_t>(best)] == "tz1.tz2");
}

}  // TEST_SUITE
