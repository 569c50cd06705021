#pragma once

#include <Eigen/Dense>

#include <random>

namespace testsupport {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<double> z(0.0, scale);
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = z(gen);
    return m;
}

inline MatrixXd random_orthogonal(Index k, std::mt19937_64& gen) {
    Eigen::HouseholderQR<MatrixXd> qr(gaussian(k, k, gen));
    MatrixXd q = qr.householderQ();
    const MatrixXd r = qr.matrixQR();
    for (Index j = 0; j < k; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

inline MatrixXd center_rows(const MatrixXd& x) {
    return x.colwise() - x.rowwise().mean();
}

/// Eigenvalues of (X - X̄)(X - X̄)^T by a dense symmetric solver, descending.
inline VectorXd gram_eigenvalues(const MatrixXd& x) {
    const MatrixXd a = center_rows(x);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a * a.transpose(), Eigen::EigenvaluesOnly);
    VectorXd ev = eig.eigenvalues().reverse();
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) < 0) ev(i) = 0;
    return ev;
}

/// Spectrum-free SURE value for the ridge family, written out from the
/// definition term by term in dense matrix form (n-1 >= p only).
inline double dense_sure(const MatrixXd& x, double alpha, double c0, double a, double b) {
    const Index p = x.rows();
    const Index n = x.cols();
    const MatrixXd y = center_rows(x);
    const MatrixXd w = y * y.transpose();
    const MatrixXd v = (w + alpha * MatrixXd::Identity(p, p)).inverse();
    const double trw = w.trace();
    const double trv = v.trace();
    const double a0 = std::abs(static_cast<double>(n - p - 1));
    const double trvw = (v * w).trace();
    const double trv2w = (v * v * w).trace();
    return trv2w * a * a + 2.0 * trvw * a * b / trw + b * b / trw - 2.0 * a0 * trv * a -
           2.0 * static_cast<double>((n - 1) * p) * b / trw - 2.0 * alpha * trv * trv * a +
           2.0 * (2.0 * c0 + 1.0) * trv2w * a + 4.0 * b / trw;
}

}  // namespace testsupport
