#pragma once

// Randomized checks of the ridge-inverse identity and the trace inequalities,
// shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rlshrink/matmodel.hpp"
#include "support.hpp"

namespace testsupport {

struct CheckResult {
    int cases = 0;
    int violations = 0;
    std::string first_failure;

    void fail(const std::string& what) {
        if (violations++ == 0) first_failure = what;
    }
};

/// Spectral (W + aI)^{-1}(X - X̄) against a dense solve, the push-through
/// identity, and the Moore-Penrose form when p > n-1.
inline CheckResult check_ridge_inverse(int cases, std::uint64_t seed) {
    using namespace rlshrink;
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> dim(1, 14);
    std::uniform_real_distribution<double> lg(-3, 2);
    CheckResult r;
    for (int k = 0; k < cases; ++k) {
        Index p = dim(gen);
        Index n = dim(gen) + 1;
        if (k % 4 == 0) n = p + 1;
        const double alpha = std::pow(10.0, lg(gen));
        const MatrixXd x = gaussian(p, n, gen);
        const MatrixXd a = center_rows(x);
        const Spectrum s = center_and_whiten(make_data(x, Covariance::identity(p)));
        const VectorXd f = apply_ridge_inverse(s, alpha);
        const MatrixXd spectral =
            s.left_vecs * (s.sv.array() * f.array()).matrix().asDiagonal() * s.right_vecs.transpose();
        const MatrixXd lhs = (a * a.transpose() + alpha * MatrixXd::Identity(p, p)).ldlt().solve(a);
        const MatrixXd rhs =
            (a.transpose() * a + alpha * MatrixXd::Identity(n, n)).ldlt().solve(a.transpose()).transpose();
        const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
        const double e1 = (lhs - rhs).cwiseAbs().maxCoeff();
        const double e2 = (lhs - spectral).cwiseAbs().maxCoeff();
        ++r.cases;
        if (e1 > 1e-10 * scale || e2 > 1e-10 * scale) {
            r.fail("p=" + std::to_string(p) + " n=" + std::to_string(n) + " err=" + std::to_string(std::max(e1, e2)));
            continue;
        }
        if (p > n - 1) {
            // (AA^T)^+ A = A (A^T A)^{-1} on the (n-1)-dimensional centered space:
            // restrict A to an orthonormal basis B of 1-perp, A = A B B^T.
            MatrixXd basis = gaussian(n, n, gen);
            basis.col(0).setConstant(1.0);
            Eigen::HouseholderQR<MatrixXd> qr(basis);
            const MatrixXd b = MatrixXd(qr.householderQ()).rightCols(n - 1);
            const MatrixXd ab = a * b;
            const MatrixXd mp_lhs = (a * a.transpose()).completeOrthogonalDecomposition().pseudoInverse() * a;
            const MatrixXd mp_rhs = ab * (ab.transpose() * ab).ldlt().solve(b.transpose());
            VectorXd pinv(s.m);
            for (Index i = 0; i < s.m; ++i) pinv(i) = s.sv(i) > 0 ? 1.0 / s.sv(i) : 0.0;
            const MatrixXd mp_spec = s.left_vecs * pinv.asDiagonal() * s.right_vecs.transpose();
            const double sc = std::max(1.0, mp_lhs.cwiseAbs().maxCoeff());
            const double e3 = std::max((mp_lhs - mp_rhs).cwiseAbs().maxCoeff(),
                                       (mp_lhs - mp_spec).cwiseAbs().maxCoeff());
            if (e3 > 1e-8 * sc) {
                r.fail("pinv p=" + std::to_string(p) + " n=" + std::to_string(n) + " err=" + std::to_string(e3));
            }
        }
    }
    return r;
}

/// Random nonnegative spectrum of length m: mixes flat, spiked and
/// heavy-tailed shapes, with occasional exact zeros.
inline VectorXd random_spectrum(Index m, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VectorXd ev(m);
    const int shape = static_cast<int>(u(gen) * 4);
    for (Index i = 0; i < m; ++i) {
        switch (shape) {
        case 0: ev(i) = 1.0 + 0.01 * u(gen); break;
        case 1: ev(i) = std::pow(10.0, 6.0 * u(gen) - 3.0); break;
        case 2: ev(i) = (i == 0 ? 1000.0 : 1.0) * u(gen); break;
        default: ev(i) = u(gen) < 0.2 ? 0.0 : u(gen); break;
        }
    }
    if (ev.maxCoeff() <= 0) ev(0) = 1.0;
    return ev;
}

/// The eight trace inequalities for alpha = c tr W, with p replaced by m.
/// Each side comparison allows a relative slack of 1e-12.
inline CheckResult check_trace_inequalities(int cases, std::uint64_t seed) {
    using namespace rlshrink;
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> mdist(1, 50);
    const double cs[] = {0.01, 0.1, 1.0, 10.0};
    CheckResult r;
    // `scale` is the magnitude of the terms that cancel inside a side.
    auto le = [&](double lhs, double rhs, const char* id, int k, double scale = 0.0) {
        const double slack = 1e-12 * std::max({std::abs(lhs), std::abs(rhs), scale, 1e-300});
        if (!(lhs <= rhs + slack)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s case %d: %.17g > %.17g", id, k, lhs, rhs);
            r.fail(buf);
        }
    };
    for (int k = 0; k < cases; ++k) {
        const Index m = mdist(gen);
        const double c = cs[k % 4];
        const Index n = m + 1 + (k % 7);
        const Spectrum s = spectrum_from_eigenvalues(n, m, random_spectrum(m, gen));
        const RidgeConfig ridge = make_ridge(s, RidgeMode::trace_proportional, c);
        const RidgeTraces t = ridge_traces(s, ridge);
        const double p = static_cast<double>(m);
        const double shrink = 1.0 - (p - 1.0) * c / (p * (1.0 + c));
        ++r.cases;
        le(1.0 / (1.0 + c), t.trVW, "(1) lower", k);
        le(t.trVW, p / (1.0 + c * p), "(1) upper", k);
        le(p * p / (1.0 + c * p), t.trV * s.trW, "(2) lower", k);
        le(t.trV * s.trW, p / c, "(2) upper", k);
        le(t.trV2W, t.trV / (1.0 + c * p), "(3) left", k);
        le(t.trV / (1.0 + c * p), t.trV, "(3) right", k);
        le(t.trV3W, t.trV2 / (1.0 + c * p), "(4) left", k);
        le(t.trV2 / (1.0 + c * p), t.trV * t.trV / (1.0 + c * p), "(4) right", k);
        le(t.trV3W, t.trV2W * t.trV, "(5)", k);
        le(t.trV2, t.trV * t.trV * shrink, "(6)", k);
        le(t.trV3W, t.trV2W * t.trV * shrink, "(7)", k);
        const double mid = -t.trVW + (1.0 + c) * t.trV2W2;
        le(-c * (t.trV * s.trW - t.trVW) / (1.0 + c * p), mid, "(8) left", k, t.trV * s.trW);
        le(mid, 0.0, "(8) right", k, t.trVW);
    }
    return r;
}

}  // namespace testsupport
