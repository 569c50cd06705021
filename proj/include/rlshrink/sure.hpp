#pragma once

#include <boost/rational.hpp>

#include <optional>
#include <string>

#include "rlshrink/estimators.hpp"
#include "rlshrink/matmodel.hpp"

namespace rlshrink {

struct SureInput {
    const Spectrum& spec;
    RidgeConfig ridge;
    Weights weights;
};

/// Unbiased estimate of np * (risk of the ridge estimator - risk of X) for
/// known weights (a, b). Negative means the estimator improves on X.
double sure_delta(const SureInput& in);
double sure_delta(const Spectrum& spec, const RidgeConfig& ridge, Weights w);

/// Per-eigenvalue shrinkage g_i(l) applied as X - H diag(g) H^T (X - X̄).
struct ShrinkageProfile {
    VectorXd g;      // g_i on the m eigenvalues
    VectorXd dg;     // total partial d g_i / d l_i
    /// Slope of the profile function at l_i with the other eigenvalues held
    /// fixed; used as the limit of the divided difference when two
    /// eigenvalues collide. Without it a collision is an error.
    std::optional<VectorXd> slope;
};

/// Relative gap below which two eigenvalues count as colliding.
inline constexpr double collision_tolerance = 1e-9;

/// General unbiased risk-difference estimate for an arbitrary profile:
///   sum_i l_i { g_i^2 - 2N g_i / l_i - 2 sum_{k!=i} (g_i-g_k)/(l_i-l_k) - 4 dg_i }
/// with N = max(p, n-1) and the sum over the m = min(p, n-1) eigenvalues.
double sure_general(const Spectrum& spec, const ShrinkageProfile& profile);

/// Analytic profile of the ridge family g_i = a/(l_i + alpha) + b/tr W.
ShrinkageProfile ridge_profile(const Spectrum& spec, const RidgeConfig& ridge, Weights w);

enum class MinimaxStatus { minimax, not_covered, violates_known_bound };

std::string_view to_string(MinimaxStatus s) noexcept;

/// Outcome of a sufficient-condition check. `margin` is the decisive
/// inequality's left side minus its right side, so margin >= 0 exactly when
/// the clause holds.
struct MinimaxVerdict {
    bool minimax = false;
    MinimaxStatus status = MinimaxStatus::not_covered;
    std::string condition_id;
    double margin = 0.0;
};

/// Known weights: b == 0 uses the single-shrinkage bound
///   0 < a <= 2[|n-p-1| - 1 + ((n-1)p - 2) c0],
/// b > 0 adds the joint bound on b.
MinimaxVerdict minimax_known(Index n, Index p, RidgeMode mode, double c, Weights w);

/// Estimated weights (a_S, and b_S when double_shrink). Constant ridge:
/// |n-p-1| >= 10 (single only). Trace-proportional ridge: the quadratic in c;
/// at c = 1/min(n-1, p) the closed-form clause is reported.
MinimaxVerdict minimax_estimated(Index n, Index p, RidgeMode mode, double c, bool double_shrink);

// Clause pieces. `q` is min(n-1, p) and `a0` is |n-p-1|.

/// Numerator of the right-hand side of the single-shrinkage condition:
/// (12 - q^2) c^2 + (-q^2 + 8q + 14 + 4/q) c + 14.
double single_condition_numerator(double q, double c);
/// numerator / ((1 + c)(1 + c q)); condition is a0 >= this.
double single_condition_rhs(double q, double c);
/// (q a0 + q^2 - 12) c^2 + ((q+1) a0 + q^2 - 8q - 14 - 4/q) c + a0 - 14 >= 0.
double single_condition_quadratic(double q, double a0, double c);

/// (16 - 4/q - q^2) c^2 + (-q^2 + 8q + 18) c + 14.
double double_condition_numerator(double q, double c);
double double_condition_rhs(double q, double c);
/// (q a0 + q^2 - 16 + 4/q) c^2 + ((q+1) a0 + q^2 - 8q - 18) c + a0 - 14 >= 0.
double double_condition_quadratic(double q, double a0, double c);

using Rational = boost::rational<long long>;

/// Right-hand side at c = 1/q: (-q^3 + 21 q^2 + 14 q + 16) / (2 q (q+1)).
Rational single_equal_ridge_rhs(long long q);
/// (-q^4 + 21 q^3 + 18 q^2 + 16 q - 4) / (2 q^2 (q+1)).
Rational double_equal_ridge_rhs(long long q);

/// Smallest c beyond which the condition numerator is negative, i.e. the
/// threshold on c that gives minimaxity when n - 1 = p. Empty when the
/// numerator stays positive for all large c (q^2 <= 12, resp. the double
/// analogue).
std::optional<double> single_threshold_c(double q);
std::optional<double> double_threshold_c(double q);

struct BayesWeights {
    double a_star = 0.0;
    double b_star = 0.0;
};

/// Loss-optimal weights under the prior covariance Psi (n-1 >= p):
///   a* = (tr Psi^{-1} - alpha tr[V Psi^{-1}]) / tr(V^2 W)
///   b* = -a_hat tr(V W) + tr(W Psi^{-1}).
/// The spectrum must carry left singular vectors.
BayesWeights bayes_optimal_weights(const Spectrum& spec, const RidgeConfig& ridge, const MatrixXd& psi,
                                   double a_hat);
/// Psi given by its eigenvalues in the coordinate basis (diagonal Psi).
BayesWeights bayes_optimal_weights(const Spectrum& spec, const RidgeConfig& ridge, const VectorXd& psi_eigs,
                                   double a_hat);

}  // namespace rlshrink
