#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <memory>

#include "rlshrink/error.hpp"

namespace rlshrink {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class CovarianceKind { identity, diagonal, full };

/// Known noise covariance of the columns of the observation matrix.
///
/// Construction validates positive definiteness and precomputes the symmetric
/// square root and its inverse, so whitening and de-whitening are cheap.
class Covariance {
public:
    static Covariance identity(Index p);
    static Covariance diagonal(const VectorXd& variances);
    static Covariance full(const MatrixXd& sigma);

    CovarianceKind kind() const noexcept { return kind_; }
    Index dim() const noexcept { return dim_; }

    /// Sigma^{-1/2} * x
    MatrixXd whiten(const MatrixXd& x) const;
    /// Sigma^{1/2} * z
    MatrixXd dewhiten(const MatrixXd& z) const;
    /// tr(d^T Sigma^{-1} d)
    double mahalanobis_sq(const MatrixXd& d) const;

    MatrixXd dense() const;

private:
    Covariance(CovarianceKind kind, Index dim) : kind_(kind), dim_(dim) {}

    CovarianceKind kind_;
    Index dim_;
    VectorXd sqrt_diag_;  // diagonal mode
    MatrixXd sqrt_;       // full mode
    MatrixXd inv_sqrt_;   // full mode
};

/// p x n observations (rows = variables, columns = observations).
struct DataMatrix {
    MatrixXd values;
    Covariance sigma;

    Index p() const noexcept { return values.rows(); }
    Index n() const noexcept { return values.cols(); }
};

/// Checks n >= 2, p >= 1, finite entries and matching covariance dimension.
DataMatrix make_data(MatrixXd values, Covariance sigma);

/// Centered, whitened singular-value decomposition of the data.
///
/// Only the m = min(p, n-1) leading singular triplets are kept; the centered
/// matrix has rank at most m, so this is exact. All trace functionals are
/// taken over this min-dimension spectrum, which covers both n-1 >= p and
/// p > n-1 with one code path (|n-p-1| plays the role of the dimension gap).
struct Spectrum {
    Index p = 0;
    Index n = 0;
    Index m = 0;
    VectorXd sv;          // descending, >= 0
    VectorXd ev;          // sv^2
    double trW = 0.0;
    MatrixXd left_vecs;   // p x m, may be empty for eigenvalue-only spectra
    MatrixXd right_vecs;  // n x m, may be empty
    VectorXd xbar;        // row means in the original (unwhitened) scale
    Index a0 = 0;         // |n - p - 1|
    std::shared_ptr<const Covariance> sigma;

    /// max(p, n-1), the dimension paired with m in the canonical form.
    Index big_dim() const noexcept { return std::max(p, n - 1); }
    bool has_vectors() const noexcept {
        return left_vecs.cols() == m && right_vecs.cols() == m && m > 0;
    }
};

/// Singular values below this fraction of the largest are set to zero.
inline constexpr double rank_tolerance = 1e-12;

Spectrum center_and_whiten(const DataMatrix& data);

/// Spectrum carrying only eigenvalues (no singular vectors). `ev` must have
/// length min(p, n-1); it is sorted descending on the way in.
Spectrum spectrum_from_eigenvalues(Index n, Index p, VectorXd ev);

/// Spectrum of W = Y Y^T for a p x (n-1) matrix Y already in canonical
/// (whitened, centered) coordinates. Left vectors are the eigenvectors of W
/// unless `with_vectors` is false; right vectors are not formed.
Spectrum spectrum_from_canonical(const MatrixXd& y, bool with_vectors = true);

enum class RidgeMode { constant, trace_proportional };

struct RidgeConfig {
    RidgeMode mode = RidgeMode::trace_proportional;
    double c = 1.0;
    double alpha_hat = 0.0;  // c, or c * trW
    double c0 = 0.0;         // d alpha_hat / d l_i: 0 or c
};

RidgeConfig make_ridge(const Spectrum& spec, RidgeMode mode, double c);

/// Traces of powers of V = (W + alpha I)^{-1} against W, all over the
/// min-dimension spectrum.
struct RidgeTraces {
    double trV = 0;
    double trVW = 0;
    double trV2W = 0;
    double trV3W = 0;
    double trV2 = 0;
    double trV2W2 = 0;
    double trV3W2 = 0;
    double trV4W2 = 0;
    double u = 0;  // 1 / trW
};

RidgeTraces ridge_traces(const Spectrum& spec, const RidgeConfig& ridge);

/// f_i = 1 / (sigma_i^2 + alpha): the action of (W + alpha I)^{-1} on the
/// i-th singular direction of the centered data.
VectorXd apply_ridge_inverse(const Spectrum& spec, double alpha);

/// X̄ + Sigma^{1/2} * U diag(sv_i * factor_i) V^T
MatrixXd reconstruct(const Spectrum& spec, const VectorXd& factors);

/// Row-mean matrix X̄ = xbar 1_n^T.
MatrixXd mean_matrix(const Spectrum& spec);

}  // namespace rlshrink
