#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlshrink/matmodel.hpp"

namespace rlshrink {

/// Weights of the ridge-type linear shrinkage estimator
///   X - { a (W + alpha I)^{-1} + b / tr(W) I } (X - X̄).
/// Negative values are allowed; positive-part handling is separate.
struct Weights {
    double a = 0.0;
    double b = 0.0;
};

enum class EstimatorId {
    S1,
    S2,
    D1,
    D2,
    S2plus,
    D2plus,
    em,
    em2,
    emplus,
    em2plus,
    js,
    jsplus,
    gd,
    identity,  // returns X; harness baseline
    rls,       // direct rls_apply with caller-supplied weights
};

std::string_view to_string(EstimatorId id) noexcept;
/// Throws Error(unknown_estimator).
EstimatorId parse_estimator(std::string_view name);
/// The six estimators compared in the risk tables, in table column order.
std::span<const EstimatorId> table_estimators() noexcept;

/// Per-singular-value multipliers plus the metadata that produced them.
struct Shrinkage {
    VectorXd factors;
    std::optional<Weights> weights;
    double alpha_hat = 0.0;
    std::optional<double> sure_delta;
    std::vector<std::string> warnings;
    /// Set when the estimate is not of the form X̄ + U diag(sv * factors) V^T
    /// (Gavish-Donoho on the transposed matrix); `factors` then refer to the
    /// transposed spectrum.
    std::optional<MatrixXd> theta_hat;
    bool transposed = false;
};

/// The estimated mean matrix for `s`.
MatrixXd estimate_matrix(const Spectrum& spec, const Shrinkage& s);

struct EstimateReport {
    MatrixXd theta_hat;
    std::optional<Weights> weights;
    double alpha_hat = 0.0;
    VectorXd factors;
    std::optional<double> sure_delta;
    EstimatorId estimator_id = EstimatorId::rls;
    std::vector<std::string> warnings;
    bool transposed = false;
};

/// Multipliers g_i = 1 - a/(sigma_i^2 + alpha) - b/tr(W), clamped at zero
/// when positive_part is set.
Shrinkage rls_factors(const Spectrum& spec, const RidgeConfig& ridge, Weights w, bool positive_part);
EstimateReport rls_apply(const Spectrum& spec, const RidgeConfig& ridge, Weights w, bool positive_part);

/// SURE-minimizing single-shrinkage weight
///   a_S = [A0 tr V + alpha (tr V)^2] / tr(V^2 W) - (2 c0 + 1).
double estimate_a_single(const Spectrum& spec, const RidgeConfig& ridge);
/// SURE-minimizing double-shrinkage weight for given a:
///   b_S = (n-1) p - 2 - tr(V W) a.
double estimate_b_double(const Spectrum& spec, const RidgeConfig& ridge, double a_hat);

/// Moore-Penrose extension of the Efron-Morris estimators. Shrinkage constant
/// |n-p-1| - 1 on W^+, plus b0 / tr W in the double variant.
Shrinkage efron_morris_factors(const Spectrum& spec, bool double_shrink, bool positive_part);
EstimateReport efron_morris(const Spectrum& spec, bool double_shrink, bool positive_part);

/// Uniform multiplier 1 - ((n-1)p - 2) / tr W.
Shrinkage james_stein_factors(const Spectrum& spec, bool positive_part);
EstimateReport james_stein(const Spectrum& spec, bool positive_part);

/// Optimal singular value shrinker for Frobenius loss at unit noise. For
/// p > n-1 it is applied to the transposed whitened data, centered along its
/// own rows (the columns of X); this needs singular vectors.
Shrinkage gavish_donoho_factors(const Spectrum& spec);
/// Multipliers for singular values `sv` of a centered matrix whose larger
/// dimension is `nu` (unit noise).
VectorXd gavish_donoho_multipliers(const VectorXd& sv, Index nu);
EstimateReport gavish_donoho(const Spectrum& spec);

/// Coefficient of W^+ in the extended Efron-Morris estimators.
double efron_morris_constant(Index n, Index p) noexcept;
/// b0 = min(p^2 + p - 2, (n-1)^2 + (n-1) - 2)
double efron_morris_b0(Index n, Index p) noexcept;
/// (n-1) p - 2
double james_stein_constant(Index n, Index p) noexcept;

struct EstimatorOptions {
    /// Ridge constant. Unset: 1 for S1/D1, 1/min(n-1, p) for S2/D2.
    std::optional<double> c;
    /// Weights for EstimatorId::rls.
    Weights weights;
    RidgeMode rls_mode = RidgeMode::trace_proportional;
    bool rls_positive_part = false;
};

Shrinkage shrink(const Spectrum& spec, EstimatorId id, const EstimatorOptions& opts = {});
EstimateReport run_estimator(const Spectrum& spec, EstimatorId id, const EstimatorOptions& opts = {});

}  // namespace rlshrink
