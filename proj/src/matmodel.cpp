#include "rlshrink/matmodel.hpp"

#include <cmath>
#include <string>

namespace rlshrink {

namespace {

std::string dims(Index r, Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

void zero_small(VectorXd& sv) {
    if (sv.size() == 0) return;
    const double cut = rank_tolerance * sv(0);
    for (Index i = 0; i < sv.size(); ++i) {
        if (!(sv(i) > cut)) sv(i) = 0.0;
    }
}

void finish(Spectrum& s) {
    s.ev = s.sv.array().square().matrix();
    s.trW = s.ev.sum();
    s.a0 = std::abs(s.n - s.p - 1);
}

}  // namespace

Covariance Covariance::identity(Index p) {
    if (p < 1) throw Error(ErrorCode::dimension, "covariance dimension must be >= 1");
    return Covariance(CovarianceKind::identity, p);
}

Covariance Covariance::diagonal(const VectorXd& variances) {
    if (variances.size() < 1) {
        throw Error(ErrorCode::dimension, "covariance dimension must be >= 1");
    }
    for (Index i = 0; i < variances.size(); ++i) {
        if (!std::isfinite(variances(i)) || variances(i) <= 0.0) {
            throw Error(ErrorCode::covariance,
                        "diagonal covariance entry " + std::to_string(i) + " is not positive");
        }
    }
    Covariance c(CovarianceKind::diagonal, variances.size());
    c.sqrt_diag_ = variances.array().sqrt().matrix();
    return c;
}

Covariance Covariance::full(const MatrixXd& sigma) {
    const Index p = sigma.rows();
    if (p < 1 || sigma.cols() != p) {
        throw Error(ErrorCode::dimension, "covariance must be square, got " + dims(sigma.rows(), sigma.cols()));
    }
    if (!sigma.allFinite()) throw Error(ErrorCode::covariance, "covariance has non-finite entries");
    const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw Error(ErrorCode::covariance, "covariance is not symmetric");
    }
    const MatrixXd sym = 0.5 * (sigma + sigma.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::covariance, "eigendecomposition of covariance failed");
    }
    const VectorXd& lam = eig.eigenvalues();
    if (!(lam(0) > 1e-14 * lam(p - 1)) || lam(0) <= 0.0) {
        throw Error(ErrorCode::covariance, "covariance is not positive definite");
    }
    const MatrixXd& q = eig.eigenvectors();
    Covariance c(CovarianceKind::full, p);
    c.sqrt_ = q * lam.array().sqrt().matrix().asDiagonal() * q.transpose();
    c.inv_sqrt_ = q * lam.array().rsqrt().matrix().asDiagonal() * q.transpose();
    return c;
}

MatrixXd Covariance::whiten(const MatrixXd& x) const {
    switch (kind_) {
    case CovarianceKind::identity: return x;
    case CovarianceKind::diagonal: return sqrt_diag_.cwiseInverse().asDiagonal() * x;
    case CovarianceKind::full: return inv_sqrt_ * x;
    }
    return x;
}

MatrixXd Covariance::dewhiten(const MatrixXd& z) const {
    switch (kind_) {
    case CovarianceKind::identity: return z;
    case CovarianceKind::diagonal: return sqrt_diag_.asDiagonal() * z;
    case CovarianceKind::full: return sqrt_ * z;
    }
    return z;
}

double Covariance::mahalanobis_sq(const MatrixXd& d) const {
    if (d.rows() != dim_) {
        throw Error(ErrorCode::dimension, "difference has " + std::to_string(d.rows()) +
                                              " rows, covariance is " + std::to_string(dim_));
    }
    if (kind_ == CovarianceKind::identity) return d.squaredNorm();
    return whiten(d).squaredNorm();
}

MatrixXd Covariance::dense() const {
    switch (kind_) {
    case CovarianceKind::identity: return MatrixXd::Identity(dim_, dim_);
    case CovarianceKind::diagonal: return sqrt_diag_.array().square().matrix().asDiagonal();
    case CovarianceKind::full: return sqrt_ * sqrt_;
    }
    return {};
}

DataMatrix make_data(MatrixXd values, Covariance sigma) {
    if (values.cols() < 2) {
        throw Error(ErrorCode::dimension, "need at least 2 observations (columns), got " +
                                              std::to_string(values.cols()));
    }
    if (values.rows() < 1) throw Error(ErrorCode::dimension, "need at least 1 variable (row)");
    if (sigma.dim() != values.rows()) {
        throw Error(ErrorCode::dimension, "covariance is " + dims(sigma.dim(), sigma.dim()) +
                                              " but data has " + std::to_string(values.rows()) + " rows");
    }
    if (!values.allFinite()) throw Error(ErrorCode::invalid_argument, "data has non-finite entries");
    return DataMatrix{std::move(values), std::move(sigma)};
}

Spectrum center_and_whiten(const DataMatrix& data) {
    const Index p = data.p();
    const Index n = data.n();
    if (n < 2) throw Error(ErrorCode::dimension, "need n >= 2");
    if (data.sigma.dim() != p) throw Error(ErrorCode::dimension, "covariance dimension mismatch");

    Spectrum s;
    s.p = p;
    s.n = n;
    s.m = std::min(p, n - 1);
    s.xbar = data.values.rowwise().mean();
    s.sigma = std::make_shared<const Covariance>(data.sigma);

    const MatrixXd centered = data.values.colwise() - s.xbar;
    const MatrixXd z = data.sigma.whiten(centered);

    Eigen::BDCSVD<MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s.sv = svd.singularValues().head(s.m);
    s.left_vecs = svd.matrixU().leftCols(s.m);
    s.right_vecs = svd.matrixV().leftCols(s.m);
    zero_small(s.sv);
    finish(s);
    return s;
}

Spectrum spectrum_from_eigenvalues(Index n, Index p, VectorXd ev) {
    if (n < 2 || p < 1) throw Error(ErrorCode::dimension, "need n >= 2 and p >= 1");
    const Index m = std::min(p, n - 1);
    if (ev.size() != m) {
        throw Error(ErrorCode::dimension, "expected " + std::to_string(m) + " eigenvalues, got " +
                                              std::to_string(ev.size()));
    }
    for (Index i = 0; i < m; ++i) {
        if (!std::isfinite(ev(i)) || ev(i) < 0.0) {
            throw Error(ErrorCode::invalid_argument, "eigenvalues must be finite and >= 0");
        }
    }
    std::sort(ev.data(), ev.data() + m, std::greater<>());
    Spectrum s;
    s.p = p;
    s.n = n;
    s.m = m;
    s.sv = ev.array().sqrt().matrix();
    zero_small(s.sv);
    s.xbar = VectorXd::Zero(p);
    s.sigma = std::make_shared<const Covariance>(Covariance::identity(p));
    finish(s);
    return s;
}

Spectrum spectrum_from_canonical(const MatrixXd& y, bool with_vectors) {
    const Index p = y.rows();
    const Index n = y.cols() + 1;
    if (p < 1 || n < 2) throw Error(ErrorCode::dimension, "canonical matrix must be non-empty");
    Spectrum s;
    s.p = p;
    s.n = n;
    s.m = std::min(p, n - 1);
    s.xbar = VectorXd::Zero(p);
    s.sigma = std::make_shared<const Covariance>(Covariance::identity(p));

    MatrixXd w = MatrixXd::Zero(p, p);
    w.selfadjointView<Eigen::Lower>().rankUpdate(y);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w.selfadjointView<Eigen::Lower>(),
                                                with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::degenerate, "eigendecomposition of W failed");
    }
    // ascending -> descending, keep the m leading ones
    const VectorXd lam = eig.eigenvalues().reverse().head(s.m);
    s.sv = lam.cwiseMax(0.0).array().sqrt().matrix();
    if (with_vectors) s.left_vecs = eig.eigenvectors().rowwise().reverse().leftCols(s.m);
    zero_small(s.sv);
    finish(s);
    return s;
}

RidgeConfig make_ridge(const Spectrum& spec, RidgeMode mode, double c) {
    if (!std::isfinite(c) || c <= 0.0) {
        throw Error(ErrorCode::ridge, "ridge constant c must be positive, got " + std::to_string(c));
    }
    RidgeConfig r;
    r.mode = mode;
    r.c = c;
    if (mode == RidgeMode::constant) {
        r.alpha_hat = c;
        r.c0 = 0.0;
    } else {
        if (!(spec.trW > 0.0)) {
            throw Error(ErrorCode::degenerate, "trace-proportional ridge needs tr(W) > 0");
        }
        r.alpha_hat = c * spec.trW;
        r.c0 = c;
    }
    return r;
}

RidgeTraces ridge_traces(const Spectrum& spec, const RidgeConfig& ridge) {
    const double alpha = ridge.alpha_hat;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::ridge, "ridge parameter must be positive");
    }
    if (!(spec.trW > 0.0)) throw Error(ErrorCode::degenerate, "tr(W) = 0: all columns are equal");
    RidgeTraces t;
    for (Index i = 0; i < spec.m; ++i) {
        const double l = spec.ev(i);
        const double v = 1.0 / (l + alpha);
        const double v2 = v * v;
        const double v3 = v2 * v;
        t.trV += v;
        t.trV2 += v2;
        t.trVW += l * v;
        t.trV2W += l * v2;
        t.trV3W += l * v3;
        t.trV2W2 += l * l * v2;
        t.trV3W2 += l * l * v3;
        t.trV4W2 += l * l * v2 * v2;
    }
    t.u = 1.0 / spec.trW;
    return t;
}

VectorXd apply_ridge_inverse(const Spectrum& spec, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::ridge, "ridge parameter must be positive");
    }
    return (spec.ev.array() + alpha).inverse().matrix();
}

MatrixXd mean_matrix(const Spectrum& spec) {
    return spec.xbar * Eigen::RowVectorXd::Ones(spec.n);
}

MatrixXd reconstruct(const Spectrum& spec, const VectorXd& factors) {
    if (factors.size() != spec.m) {
        throw Error(ErrorCode::dimension, "need one factor per singular value");
    }
    MatrixXd out = mean_matrix(spec);
    if (spec.m == 0) return out;
    if (!spec.has_vectors()) {
        throw Error(ErrorCode::invalid_argument, "spectrum carries no singular vectors");
    }
    const VectorXd scaled = spec.sv.cwiseProduct(factors);
    const MatrixXd shrunk = spec.left_vecs * scaled.asDiagonal() * spec.right_vecs.transpose();
    out += spec.sigma->dewhiten(shrunk);
    return out;
}

}  // namespace rlshrink
