#include <gtest/gtest.h>

#include <cmath>

#include "rlshrink/matmodel.hpp"
#include "identity_checks.hpp"
#include "support.hpp"

using namespace rlshrink;
using testsupport::center_rows;
using testsupport::gaussian;

namespace {

Spectrum spec_of(const MatrixXd& x) {
    return center_and_whiten(make_data(x, Covariance::identity(x.rows())));
}

}  // namespace

TEST(CenterAndWhiten, ConstantColumnsCenterToZero) {
    MatrixXd x(2, 3);
    x << 1, 1, 1, 0, 0, 0;
    const Spectrum s = spec_of(x);
    EXPECT_EQ(s.m, 2);
    EXPECT_DOUBLE_EQ(s.sv(0), 0.0);
    EXPECT_DOUBLE_EQ(s.sv(1), 0.0);
    EXPECT_DOUBLE_EQ(s.trW, 0.0);
    EXPECT_DOUBLE_EQ(s.xbar(0), 1.0);
    EXPECT_DOUBLE_EQ(s.xbar(1), 0.0);
}

TEST(CenterAndWhiten, OneByTwo) {
    MatrixXd x(1, 2);
    x << 0, 2;
    const Spectrum s = spec_of(x);
    EXPECT_EQ(s.m, 1);
    EXPECT_NEAR(s.sv(0), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(s.trW, 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(s.xbar(0), 1.0);
}

TEST(CenterAndWhiten, MatchesDenseEigenvalues) {
    std::mt19937_64 gen(11);
    const MatrixXd x = gaussian(5, 8, gen);
    const Spectrum s = spec_of(x);
    const VectorXd ev = testsupport::gram_eigenvalues(x);
    ASSERT_EQ(s.m, 5);
    for (Index i = 0; i < 5; ++i) EXPECT_NEAR(s.sv(i), std::sqrt(ev(i)), 1e-10);
}

TEST(CenterAndWhiten, ShapesAndInvariants) {
    std::mt19937_64 gen(12);
    for (auto [p, n] : {std::pair{3, 20}, {20, 3}, {7, 8}, {8, 8}, {1, 5}, {6, 2}}) {
        const MatrixXd x = gaussian(p, n, gen, 3.0);
        const Spectrum s = spec_of(x);
        EXPECT_EQ(s.m, std::min<Index>(p, n - 1));
        EXPECT_EQ(s.a0, std::abs(n - p - 1));
        EXPECT_EQ(s.big_dim(), std::max<Index>(p, n - 1));
        for (Index i = 1; i < s.m; ++i) EXPECT_GE(s.sv(i - 1), s.sv(i));
        EXPECT_NEAR(s.trW, s.ev.sum(), 1e-10 * s.trW);
        EXPECT_NEAR(s.trW, center_rows(x).squaredNorm(), 1e-10 * s.trW);
        const MatrixXd id = MatrixXd::Identity(s.m, s.m);
        EXPECT_LT((s.left_vecs.transpose() * s.left_vecs - id).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((s.right_vecs.transpose() * s.right_vecs - id).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(CenterAndWhiten, ReconstructionUpTo200) {
    std::mt19937_64 gen(13);
    for (auto [p, n] : {std::pair{200, 200}, {200, 50}, {40, 200}, {120, 121}}) {
        const MatrixXd x = gaussian(p, n, gen);
        const Spectrum s = spec_of(x);
        const MatrixXd rebuilt = s.left_vecs * s.sv.asDiagonal() * s.right_vecs.transpose();
        const MatrixXd a = center_rows(x);
        EXPECT_LE((rebuilt - a).norm(), 1e-8 * a.norm()) << p << "x" << n;
        EXPECT_LE((reconstruct(s, VectorXd::Ones(s.m)) - x).norm(), 1e-8 * x.norm());
    }
}

TEST(CenterAndWhiten, FullCovarianceWhitens) {
    std::mt19937_64 gen(14);
    const Index p = 4, n = 9;
    const MatrixXd b = gaussian(p, p, gen);
    const MatrixXd sigma = b * b.transpose() + MatrixXd::Identity(p, p);
    const MatrixXd x = gaussian(p, n, gen);
    const Spectrum s = center_and_whiten(make_data(x, Covariance::full(sigma)));
    // Oracle: eigenvalues of L^{-1} A A^T L^{-T} with L the Cholesky factor share
    // the spectrum of Sigma^{-1} A A^T.
    const MatrixXd a = center_rows(x);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ge(a * a.transpose(), sigma, Eigen::EigenvaluesOnly);
    const VectorXd ev = ge.eigenvalues().reverse();
    for (Index i = 0; i < s.m; ++i) EXPECT_NEAR(s.ev(i), ev(i), 1e-9 * ev(0));
    EXPECT_LE((reconstruct(s, VectorXd::Ones(s.m)) - x).norm(), 1e-9 * x.norm());
}

TEST(CenterAndWhiten, DiagonalCovarianceMatchesFull) {
    std::mt19937_64 gen(15);
    const MatrixXd x = gaussian(3, 6, gen);
    VectorXd var(3);
    var << 0.5, 2.0, 4.0;
    const Spectrum sd = center_and_whiten(make_data(x, Covariance::diagonal(var)));
    const Spectrum sf = center_and_whiten(make_data(x, Covariance::full(MatrixXd(var.asDiagonal()))));
    for (Index i = 0; i < sd.m; ++i) EXPECT_NEAR(sd.sv(i), sf.sv(i), 1e-12);
}

TEST(CenterAndWhiten, Errors) {
    MatrixXd one_col(3, 1);
    one_col.setOnes();
    try {
        make_data(one_col, Covariance::identity(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension);
    }
    MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;  // eigenvalues 3, -1
    try {
        Covariance::full(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::covariance);
    }
    VectorXd neg(2);
    neg << 1, -1;
    EXPECT_THROW(Covariance::diagonal(neg), Error);
    EXPECT_THROW(make_data(MatrixXd::Ones(3, 4), Covariance::identity(2)), Error);
}

TEST(CenterAndWhiten, OrthogonalEquivariance) {
    std::mt19937_64 gen(16);
    for (auto [p, n] : {std::pair{6, 10}, {10, 6}, {5, 6}}) {
        const MatrixXd x = gaussian(p, n, gen);
        const MatrixXd pm = testsupport::random_orthogonal(p, gen);
        // Q fixes the ones vector: H diag(1, Q~) H^T with H's first column 1/sqrt(n).
        MatrixXd basis = gaussian(n, n, gen);
        basis.col(0).setConstant(1.0);
        Eigen::HouseholderQR<MatrixXd> qr(basis);
        const MatrixXd h = qr.householderQ();
        MatrixXd inner = MatrixXd::Identity(n, n);
        inner.bottomRightCorner(n - 1, n - 1) = testsupport::random_orthogonal(n - 1, gen);
        const MatrixXd q = h * inner * h.transpose();
        const Spectrum s0 = spec_of(x);
        const Spectrum s1 = spec_of(pm * x * q);
        for (Index i = 0; i < s0.m; ++i) EXPECT_NEAR(s0.sv(i), s1.sv(i), 1e-10);
    }
}

TEST(RidgeTraces, EqualEigenvalues) {
    VectorXd ev(2);
    ev << 1, 1;
    const Spectrum s = spectrum_from_eigenvalues(10, 2, ev);
    const RidgeConfig r = make_ridge(s, RidgeMode::constant, 1.0);
    const RidgeTraces t = ridge_traces(s, r);
    EXPECT_DOUBLE_EQ(t.trV, 1.0);
    EXPECT_DOUBLE_EQ(t.trVW, 1.0);
    EXPECT_DOUBLE_EQ(t.trV2W, 0.5);
    EXPECT_DOUBLE_EQ(t.trV3W, 0.25);
}

TEST(RidgeTraces, DirectEvaluation) {
    VectorXd ev(2);
    ev << 1, 3;
    const Spectrum s = spectrum_from_eigenvalues(10, 2, ev);
    const RidgeTraces t = ridge_traces(s, make_ridge(s, RidgeMode::constant, 1.0));
    EXPECT_DOUBLE_EQ(t.trV, 0.75);
    EXPECT_DOUBLE_EQ(t.trVW, 1.25);
    EXPECT_DOUBLE_EQ(t.trV2, 1.0 / 16 + 1.0 / 4);
    EXPECT_DOUBLE_EQ(t.trV4W2, 9.0 / 256 + 1.0 / 16);
    EXPECT_DOUBLE_EQ(t.trV3W2, 9.0 / 64 + 1.0 / 8);
    EXPECT_DOUBLE_EQ(t.u, 0.25);
}

TEST(RidgeTraces, MatchesDenseTraces) {
    std::mt19937_64 gen(17);
    const MatrixXd x = gaussian(6, 15, gen);
    const Spectrum s = spec_of(x);
    const RidgeConfig r = make_ridge(s, RidgeMode::trace_proportional, 0.3);
    const RidgeTraces t = ridge_traces(s, r);
    const MatrixXd a = center_rows(x);
    const MatrixXd w = a * a.transpose();
    const MatrixXd v = (w + r.alpha_hat * MatrixXd::Identity(6, 6)).inverse();
    EXPECT_NEAR(t.trV, v.trace(), 1e-12 * v.trace());
    EXPECT_NEAR(t.trVW, (v * w).trace(), 1e-12);
    EXPECT_NEAR(t.trV2W, (v * v * w).trace(), 1e-12 * t.trV2W);
    EXPECT_NEAR(t.trV3W, (v * v * v * w).trace(), 1e-12 * t.trV3W);
    EXPECT_NEAR(r.alpha_hat, 0.3 * w.trace(), 1e-12 * r.alpha_hat);
    EXPECT_DOUBLE_EQ(r.c0, 0.3);
}

TEST(RidgeTraces, Errors) {
    VectorXd ev = VectorXd::Zero(2);
    const Spectrum s = spectrum_from_eigenvalues(10, 2, ev);
    try {
        make_ridge(s, RidgeMode::constant, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ridge);
    }
    EXPECT_THROW(make_ridge(s, RidgeMode::trace_proportional, 1.0), Error);
    try {
        ridge_traces(s, make_ridge(s, RidgeMode::constant, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate);
    }
}

TEST(ApplyRidgeInverse, SingleValue) {
    VectorXd ev(1);
    ev << 4;
    const Spectrum s = spectrum_from_eigenvalues(3, 1, ev);
    EXPECT_DOUBLE_EQ(apply_ridge_inverse(s, 1.0)(0), 0.2);
    EXPECT_THROW(apply_ridge_inverse(s, 0.0), Error);
}

TEST(ApplyRidgeInverse, DenseSolveWhenPExceedsN) {
    std::mt19937_64 gen(18);
    const MatrixXd x = gaussian(6, 4, gen);
    const Spectrum s = spec_of(x);
    const double alpha = 0.7;
    const VectorXd f = apply_ridge_inverse(s, alpha);
    const MatrixXd a = center_rows(x);
    const MatrixXd dense = (a * a.transpose() + alpha * MatrixXd::Identity(6, 6)).ldlt().solve(a);
    const MatrixXd spectral = s.left_vecs * (s.sv.array() * f.array()).matrix().asDiagonal() * s.right_vecs.transpose();
    EXPECT_LT((dense - spectral).cwiseAbs().maxCoeff(), 1e-10);
}

// Push-through identity (AA^T + aI)^{-1} A = A (A^T A + aI)^{-1}, both sides dense.
TEST(ApplyRidgeInverse, PushThroughIdentity100Triples) {
    std::mt19937_64 gen(19);
    std::uniform_int_distribution<int> dim(1, 12);
    std::uniform_real_distribution<double> lg(-3, 2);
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        Index p = dim(gen), n = dim(gen) + 1;
        if (k % 3 == 0) n = p + 1;  // p = n-1
        const double alpha = std::pow(10.0, lg(gen));
        const MatrixXd a = center_rows(gaussian(p, n, gen));
        const MatrixXd lhs = (a * a.transpose() + alpha * MatrixXd::Identity(p, p)).ldlt().solve(a);
        const MatrixXd rhs =
            (a.transpose() * a + alpha * MatrixXd::Identity(n, n)).ldlt().solve(a.transpose()).transpose();
        const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * scale);
        ++checked;
    }
    EXPECT_EQ(checked, 100);
}

TEST(Identities, RidgeInverseIdentity1000Cases) {
    const auto r = testsupport::check_ridge_inverse(1000, 101);
    EXPECT_EQ(r.cases, 1000);
    EXPECT_EQ(r.violations, 0) << r.first_failure;
}

TEST(Identities, TraceInequalities1000Spectra) {
    const auto r = testsupport::check_trace_inequalities(1000, 202);
    EXPECT_EQ(r.cases, 1000);
    EXPECT_EQ(r.violations, 0) << r.first_failure;
}
