#include "rlshrink/sure.hpp"

#include <cmath>
#include <limits>

namespace rlshrink {

namespace {

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

bool is_equal_ridge(double c, Index q) {
    return std::abs(c * static_cast<double>(q) - 1.0) <= 1e-12;
}

void check_dims(Index n, Index p) {
    if (n < 2 || p < 1) throw Error(ErrorCode::dimension, "need n >= 2 and p >= 1");
}

std::optional<double> positive_root(double a, double b, double c0) {
    // a x^2 + b x + c0 with a < 0 and c0 > 0 has exactly one positive root.
    if (!(a < 0.0)) return std::nullopt;
    const double disc = b * b - 4.0 * a * c0;
    return (-b - std::sqrt(disc)) / (2.0 * a);
}

BayesWeights bayes_from_projection(const Spectrum& spec, const RidgeConfig& ridge, const VectorXd& proj,
                                   double tr_psi_inv, double a_hat) {
    const RidgeTraces t = ridge_traces(spec, ridge);
    double tr_v_psi = 0.0;
    double tr_w_psi = 0.0;
    for (Index i = 0; i < spec.m; ++i) {
        tr_v_psi += proj(i) / (spec.ev(i) + ridge.alpha_hat);
        tr_w_psi += proj(i) * spec.ev(i);
    }
    if (!(t.trV2W > 0.0)) throw Error(ErrorCode::degenerate, "tr(V^2 W) = 0");
    BayesWeights out;
    out.a_star = (tr_psi_inv - ridge.alpha_hat * tr_v_psi) / t.trV2W;
    out.b_star = -a_hat * t.trVW + tr_w_psi;
    return out;
}

void require_full_left(const Spectrum& spec) {
    if (spec.p > spec.n - 1) {
        throw Error(ErrorCode::setting, "optimal Bayes weights need n - 1 >= p");
    }
    if (spec.left_vecs.rows() != spec.p || spec.left_vecs.cols() != spec.p) {
        throw Error(ErrorCode::invalid_argument, "spectrum carries no eigenvectors");
    }
}

}  // namespace

double sure_delta(const Spectrum& spec, const RidgeConfig& ridge, Weights w) {
    const RidgeTraces t = ridge_traces(spec, ridge);
    const double a = w.a;
    const double b = w.b;
    const double alpha = ridge.alpha_hat;
    const double a0 = static_cast<double>(spec.a0);
    const double np1 = static_cast<double>(spec.n - 1) * static_cast<double>(spec.p);
    return t.trV2W * a * a + 2.0 * t.trVW * t.u * a * b + t.u * b * b - 2.0 * a0 * t.trV * a -
           2.0 * np1 * t.u * b - 2.0 * alpha * t.trV * t.trV * a + 2.0 * (2.0 * ridge.c0 + 1.0) * t.trV2W * a +
           4.0 * t.u * b;
}

double sure_delta(const SureInput& in) { return sure_delta(in.spec, in.ridge, in.weights); }

double sure_general(const Spectrum& spec, const ShrinkageProfile& profile) {
    const Index m = spec.m;
    if (profile.g.size() != m || profile.dg.size() != m) {
        throw Error(ErrorCode::dimension, "profile must have one entry per eigenvalue");
    }
    if (profile.slope && profile.slope->size() != m) {
        throw Error(ErrorCode::dimension, "slope must have one entry per eigenvalue");
    }
    const double big = static_cast<double>(spec.big_dim());
    const double gap = collision_tolerance * (m > 0 ? spec.ev(0) : 0.0);
    const VectorXd& l = spec.ev;
    const VectorXd& g = profile.g;

    double total = 0.0;
    for (Index i = 0; i < m; ++i) {
        double cross = 0.0;
        if (l(i) > 0.0) {
            for (Index k = 0; k < m; ++k) {
                if (k == i) continue;
                const double dl = l(i) - l(k);
                if (std::abs(dl) <= gap) {
                    if (!profile.slope) {
                        throw Error(ErrorCode::divided_difference,
                                    "eigenvalues " + std::to_string(i) + " and " + std::to_string(k) +
                                        " collide; supply the profile slope");
                    }
                    cross += 0.5 * ((*profile.slope)(i) + (*profile.slope)(k));
                } else {
                    cross += (g(i) - g(k)) / dl;
                }
            }
        }
        total += l(i) * g(i) * g(i) - 2.0 * big * g(i) - 2.0 * l(i) * cross - 4.0 * l(i) * profile.dg(i);
    }
    return total;
}

ShrinkageProfile ridge_profile(const Spectrum& spec, const RidgeConfig& ridge, Weights w) {
    if (!(spec.trW > 0.0)) throw Error(ErrorCode::degenerate, "tr(W) = 0");
    const VectorXd v = apply_ridge_inverse(spec, ridge.alpha_hat);
    const double u = 1.0 / spec.trW;
    ShrinkageProfile prof;
    prof.g = (w.a * v.array() + w.b * u).matrix();
    prof.dg = (-w.a * (1.0 + ridge.c0) * v.array().square() - w.b * u * u).matrix();
    prof.slope = (-w.a * v.array().square()).matrix();
    return prof;
}

std::string_view to_string(MinimaxStatus s) noexcept {
    switch (s) {
    case MinimaxStatus::minimax: return "minimax";
    case MinimaxStatus::not_covered: return "not-covered";
    case MinimaxStatus::violates_known_bound: return "violates-known-bound";
    }
    return "?";
}

MinimaxVerdict minimax_known(Index n, Index p, RidgeMode mode, double c, Weights w) {
    check_dims(n, p);
    if (!std::isfinite(c) || c <= 0.0) throw Error(ErrorCode::ridge, "ridge constant c must be positive");
    const double q = static_cast<double>(std::min(n - 1, p));
    const double a0 = static_cast<double>(std::abs(n - p - 1));
    const double c0 = mode == RidgeMode::trace_proportional ? c : 0.0;
    const double np1 = static_cast<double>(n - 1) * static_cast<double>(p);

    MinimaxVerdict v;
    if (w.a == 0.0 && w.b == 0.0) {
        v.minimax = true;
        v.status = MinimaxStatus::minimax;
        v.condition_id = "identity";
        v.margin = 0.0;
        return v;
    }

    double margin = std::numeric_limits<double>::infinity();
    if (w.a < 0.0) {
        margin = w.a;
    } else if (w.a > 0.0) {
        margin = 2.0 * ((a0 - 1.0) + (np1 - 2.0) * c0) - w.a;
    }
    if (w.b == 0.0) {
        v.condition_id = "prop1";
    } else {
        v.condition_id = "prop2";
        const double b_margin = w.b < 0.0 ? w.b : 2.0 * np1 - 4.0 - 2.0 * w.a * q / (1.0 + c0 * q) - w.b;
        margin = std::min(margin, b_margin);
    }
    v.margin = margin;
    v.minimax = margin >= 0.0;
    v.status = v.minimax ? MinimaxStatus::minimax : MinimaxStatus::violates_known_bound;
    return v;
}

MinimaxVerdict minimax_estimated(Index n, Index p, RidgeMode mode, double c, bool double_shrink) {
    check_dims(n, p);
    if (!std::isfinite(c) || c <= 0.0) throw Error(ErrorCode::ridge, "ridge constant c must be positive");
    const Index qi = std::min(n - 1, p);
    const double q = static_cast<double>(qi);
    const double a0 = static_cast<double>(std::abs(n - p - 1));

    MinimaxVerdict v;
    if (mode == RidgeMode::constant) {
        if (double_shrink) {
            v.condition_id = "thm:dmin(none)";
            v.margin = std::numeric_limits<double>::quiet_NaN();
            v.status = MinimaxStatus::not_covered;
            return v;
        }
        v.condition_id = "thm:min(i)";
        v.margin = a0 - 10.0;
    } else if (is_equal_ridge(c, qi)) {
        double rhs = 0.0;
        if (qi <= 10000) {
            rhs = to_double(double_shrink ? double_equal_ridge_rhs(qi) : single_equal_ridge_rhs(qi));
        } else {
            rhs = double_shrink ? (-q * q * q * q + 21 * q * q * q + 18 * q * q + 16 * q - 4) / (2 * q * q * (q + 1))
                                : (-q * q * q + 21 * q * q + 14 * q + 16) / (2 * q * (q + 1));
        }
        v.condition_id = double_shrink ? "thm:dmin(ii)" : "thm:min(iii)";
        v.margin = a0 - rhs;
    } else {
        v.condition_id = double_shrink ? "thm:dmin(i)" : "thm:min(ii)";
        v.margin = double_shrink ? double_condition_quadratic(q, a0, c) : single_condition_quadratic(q, a0, c);
    }
    v.minimax = v.margin >= 0.0;
    v.status = v.minimax ? MinimaxStatus::minimax : MinimaxStatus::not_covered;
    return v;
}

double single_condition_numerator(double q, double c) {
    return (12.0 - q * q) * c * c + (-q * q + 8.0 * q + 14.0 + 4.0 / q) * c + 14.0;
}

double single_condition_rhs(double q, double c) {
    return single_condition_numerator(q, c) / ((1.0 + c) * (1.0 + c * q));
}

double single_condition_quadratic(double q, double a0, double c) {
    return (q * a0 + q * q - 12.0) * c * c + ((q + 1.0) * a0 + q * q - 8.0 * q - 14.0 - 4.0 / q) * c + a0 - 14.0;
}

double double_condition_numerator(double q, double c) {
    return (16.0 - 4.0 / q - q * q) * c * c + (-q * q + 8.0 * q + 18.0) * c + 14.0;
}

double double_condition_rhs(double q, double c) {
    return double_condition_numerator(q, c) / ((1.0 + c) * (1.0 + c * q));
}

double double_condition_quadratic(double q, double a0, double c) {
    return (q * a0 + q * q - 16.0 + 4.0 / q) * c * c + ((q + 1.0) * a0 + q * q - 8.0 * q - 18.0) * c + a0 - 14.0;
}

Rational single_equal_ridge_rhs(long long q) {
    if (q < 1) throw Error(ErrorCode::dimension, "q must be >= 1");
    return Rational(-q * q * q + 21 * q * q + 14 * q + 16, 2 * q * (q + 1));
}

Rational double_equal_ridge_rhs(long long q) {
    if (q < 1) throw Error(ErrorCode::dimension, "q must be >= 1");
    return Rational(-q * q * q * q + 21 * q * q * q + 18 * q * q + 16 * q - 4, 2 * q * q * (q + 1));
}

std::optional<double> single_threshold_c(double q) {
    return positive_root(12.0 - q * q, -q * q + 8.0 * q + 14.0 + 4.0 / q, 14.0);
}

std::optional<double> double_threshold_c(double q) {
    return positive_root(16.0 - 4.0 / q - q * q, -q * q + 8.0 * q + 18.0, 14.0);
}

BayesWeights bayes_optimal_weights(const Spectrum& spec, const RidgeConfig& ridge, const MatrixXd& psi,
                                   double a_hat) {
    require_full_left(spec);
    if (psi.rows() != spec.p || psi.cols() != spec.p) {
        throw Error(ErrorCode::dimension, "Psi must be p x p");
    }
    const double scale = std::max(psi.cwiseAbs().maxCoeff(), 1e-300);
    if (!psi.allFinite() || (psi - psi.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw Error(ErrorCode::covariance, "Psi is not symmetric");
    }
    Eigen::LLT<MatrixXd> llt(psi);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::covariance, "Psi is not positive definite");
    const MatrixXd psi_inv = llt.solve(MatrixXd::Identity(spec.p, spec.p));
    const MatrixXd& u = spec.left_vecs;
    const VectorXd proj = (u.transpose() * psi_inv * u).diagonal();
    return bayes_from_projection(spec, ridge, proj, psi_inv.trace(), a_hat);
}

BayesWeights bayes_optimal_weights(const Spectrum& spec, const RidgeConfig& ridge, const VectorXd& psi_eigs,
                                   double a_hat) {
    require_full_left(spec);
    if (psi_eigs.size() != spec.p) throw Error(ErrorCode::dimension, "Psi needs p eigenvalues");
    if (!psi_eigs.allFinite() || psi_eigs.minCoeff() <= 0.0) {
        throw Error(ErrorCode::covariance, "Psi eigenvalues must be positive");
    }
    const VectorXd inv = psi_eigs.cwiseInverse();
    const VectorXd proj = spec.left_vecs.array().square().matrix().transpose() * inv;
    return bayes_from_projection(spec, ridge, proj, inv.sum(), a_hat);
}

}  // namespace rlshrink
