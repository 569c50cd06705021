#include "rlshrink/estimators.hpp"

#include <array>
#include <cmath>

#include "rlshrink/sure.hpp"

namespace rlshrink {

namespace {

struct NamedId {
    std::string_view name;
    EstimatorId id;
};

constexpr std::array<NamedId, 15> kNames{{
    {"S1", EstimatorId::S1},
    {"S2", EstimatorId::S2},
    {"D1", EstimatorId::D1},
    {"D2", EstimatorId::D2},
    {"S2plus", EstimatorId::S2plus},
    {"D2plus", EstimatorId::D2plus},
    {"em", EstimatorId::em},
    {"em2", EstimatorId::em2},
    {"emplus", EstimatorId::emplus},
    {"em2plus", EstimatorId::em2plus},
    {"js", EstimatorId::js},
    {"jsplus", EstimatorId::jsplus},
    {"gd", EstimatorId::gd},
    {"identity", EstimatorId::identity},
    {"rls", EstimatorId::rls},
}};

constexpr std::array<EstimatorId, 6> kTableSix{
    EstimatorId::S2plus, EstimatorId::D2plus, EstimatorId::emplus,
    EstimatorId::em2plus, EstimatorId::jsplus, EstimatorId::gd,
};

void require_signal(const Spectrum& spec, const char* who) {
    if (!(spec.trW > 0.0)) {
        throw Error(ErrorCode::degenerate, std::string(who) + ": tr(W) = 0, all columns are equal");
    }
}

void clamp_nonnegative(VectorXd& f) { f = f.cwiseMax(0.0); }

EstimateReport to_report(const Spectrum& spec, Shrinkage s, EstimatorId id) {
    EstimateReport r;
    r.theta_hat = estimate_matrix(spec, s);
    r.transposed = s.transposed;
    r.weights = s.weights;
    r.alpha_hat = s.alpha_hat;
    r.factors = std::move(s.factors);
    r.sure_delta = s.sure_delta;
    r.estimator_id = id;
    r.warnings = std::move(s.warnings);
    return r;
}

Shrinkage ridge_estimator(const Spectrum& spec, RidgeMode mode, double c, bool double_shrink,
                          bool positive_part) {
    require_signal(spec, "ridge shrinkage");
    const RidgeConfig ridge = make_ridge(spec, mode, c);
    Weights w;
    w.a = estimate_a_single(spec, ridge);
    w.b = double_shrink ? estimate_b_double(spec, ridge, w.a) : 0.0;
    Shrinkage s = rls_factors(spec, ridge, w, positive_part);
    s.sure_delta = sure_delta(spec, ridge, w);
    return s;
}

}  // namespace

std::string_view to_string(EstimatorId id) noexcept {
    for (const auto& n : kNames) {
        if (n.id == id) return n.name;
    }
    return "?";
}

EstimatorId parse_estimator(std::string_view name) {
    for (const auto& n : kNames) {
        if (n.name == name) return n.id;
    }
    throw Error(ErrorCode::unknown_estimator, "unknown estimator '" + std::string(name) + "'");
}

std::span<const EstimatorId> table_estimators() noexcept { return kTableSix; }

MatrixXd estimate_matrix(const Spectrum& spec, const Shrinkage& s) {
    if (s.theta_hat) return *s.theta_hat;
    return reconstruct(spec, s.factors);
}

double efron_morris_constant(Index n, Index p) noexcept {
    return static_cast<double>(std::abs(n - p - 1)) - 1.0;
}

double efron_morris_b0(Index n, Index p) noexcept {
    const double pp = static_cast<double>(p);
    const double nn = static_cast<double>(n - 1);
    return std::min(pp * pp + pp - 2.0, nn * nn + nn - 2.0);
}

double james_stein_constant(Index n, Index p) noexcept {
    return static_cast<double>(n - 1) * static_cast<double>(p) - 2.0;
}

Shrinkage rls_factors(const Spectrum& spec, const RidgeConfig& ridge, Weights w, bool positive_part) {
    if (!std::isfinite(w.a) || !std::isfinite(w.b)) {
        throw Error(ErrorCode::invalid_argument, "weights must be finite");
    }
    Shrinkage s;
    s.alpha_hat = ridge.alpha_hat;
    s.weights = w;
    const double trace_term = (w.b == 0.0) ? 0.0 : [&] {
        require_signal(spec, "rls_apply");
        return w.b / spec.trW;
    }();
    s.factors = 1.0 - w.a * apply_ridge_inverse(spec, ridge.alpha_hat).array() - trace_term;
    if (positive_part) clamp_nonnegative(s.factors);
    return s;
}

EstimateReport rls_apply(const Spectrum& spec, const RidgeConfig& ridge, Weights w, bool positive_part) {
    return to_report(spec, rls_factors(spec, ridge, w, positive_part), EstimatorId::rls);
}

double estimate_a_single(const Spectrum& spec, const RidgeConfig& ridge) {
    require_signal(spec, "estimate_a_single");
    const RidgeTraces t = ridge_traces(spec, ridge);
    if (!(t.trV2W > 0.0)) throw Error(ErrorCode::degenerate, "tr(V^2 W) = 0");
    const double a0 = static_cast<double>(spec.a0);
    return (a0 * t.trV + ridge.alpha_hat * t.trV * t.trV) / t.trV2W - (2.0 * ridge.c0 + 1.0);
}

double estimate_b_double(const Spectrum& spec, const RidgeConfig& ridge, double a_hat) {
    require_signal(spec, "estimate_b_double");
    const RidgeTraces t = ridge_traces(spec, ridge);
    return james_stein_constant(spec.n, spec.p) - t.trVW * a_hat;
}

Shrinkage efron_morris_factors(const Spectrum& spec, bool double_shrink, bool positive_part) {
    require_signal(spec, "efron_morris");
    Shrinkage s;
    const double k = efron_morris_constant(spec.n, spec.p);
    const double trace_term = double_shrink ? efron_morris_b0(spec.n, spec.p) / spec.trW : 0.0;
    s.factors.resize(spec.m);
    for (Index i = 0; i < spec.m; ++i) {
        // W^+ acts on the nonzero directions only; the rest are already zero.
        s.factors(i) = spec.ev(i) > 0.0 ? 1.0 - k / spec.ev(i) - trace_term : 1.0;
    }
    if (positive_part) clamp_nonnegative(s.factors);
    if (spec.a0 < 2) {
        s.warnings.emplace_back("|n-p-1| = " + std::to_string(spec.a0) +
                                ": the Moore-Penrose Efron-Morris estimator is unstable here and not minimax");
    }
    return s;
}

EstimateReport efron_morris(const Spectrum& spec, bool double_shrink, bool positive_part) {
    const EstimatorId id = double_shrink ? (positive_part ? EstimatorId::em2plus : EstimatorId::em2)
                                         : (positive_part ? EstimatorId::emplus : EstimatorId::em);
    return to_report(spec, efron_morris_factors(spec, double_shrink, positive_part), id);
}

Shrinkage james_stein_factors(const Spectrum& spec, bool positive_part) {
    require_signal(spec, "james_stein");
    Shrinkage s;
    const double g = 1.0 - james_stein_constant(spec.n, spec.p) / spec.trW;
    s.factors = VectorXd::Constant(spec.m, positive_part ? std::max(g, 0.0) : g);
    return s;
}

EstimateReport james_stein(const Spectrum& spec, bool positive_part) {
    return to_report(spec, james_stein_factors(spec, positive_part),
                     positive_part ? EstimatorId::jsplus : EstimatorId::js);
}

VectorXd gavish_donoho_multipliers(const VectorXd& sv, Index nu) {
    const double big = static_cast<double>(nu);
    const double beta = static_cast<double>(sv.size()) / big;
    const double root_nu = std::sqrt(big);
    VectorXd f = VectorXd::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        const double y = sv(i) / root_nu;
        if (!(y > 0.0)) continue;
        const double d = (y * y - beta - 1.0) * (y * y - beta - 1.0) - 4.0 * beta;
        if (d <= 0.0 || y * y < 1.0 + beta) continue;
        // shrunk value sqrt(d)/y in noise units, back to data units by root_nu
        f(i) = std::sqrt(d) / y / y;
    }
    return f;
}

Shrinkage gavish_donoho_factors(const Spectrum& spec) {
    if (spec.m < 1) throw Error(ErrorCode::degenerate, "gavish_donoho: empty spectrum");
    Shrinkage s;
    if (spec.p <= spec.n - 1) {
        s.factors = gavish_donoho_multipliers(spec.sv, spec.big_dim());
        return s;
    }
    if (!spec.has_vectors()) {
        throw Error(ErrorCode::invalid_argument, "gavish_donoho with p > n-1 needs singular vectors");
    }
    // whitened data, transposed: n variables observed p times
    const MatrixXd z = spec.sigma->whiten(spec.xbar) * Eigen::RowVectorXd::Ones(spec.n) +
                       spec.left_vecs * spec.sv.asDiagonal() * spec.right_vecs.transpose();
    const MatrixXd zt = z.transpose();
    const VectorXd mu = zt.rowwise().mean();
    const Index mt = std::min(spec.n, spec.p - 1);
    Eigen::BDCSVD<MatrixXd> svd(zt.colwise() - mu, Eigen::ComputeThinU | Eigen::ComputeThinV);
    VectorXd sv = svd.singularValues().head(mt);
    for (Index i = 0; i < mt; ++i) {
        if (!(sv(i) > rank_tolerance * sv(0))) sv(i) = 0.0;
    }
    s.factors = gavish_donoho_multipliers(sv, std::max(spec.n, spec.p - 1));
    const MatrixXd shrunk = svd.matrixU().leftCols(mt) * sv.cwiseProduct(s.factors).asDiagonal() *
                            svd.matrixV().leftCols(mt).transpose();
    const MatrixXd est_t = shrunk.colwise() + mu;
    s.theta_hat = spec.sigma->dewhiten(est_t.transpose());
    s.transposed = true;
    return s;
}

EstimateReport gavish_donoho(const Spectrum& spec) {
    return to_report(spec, gavish_donoho_factors(spec), EstimatorId::gd);
}

Shrinkage shrink(const Spectrum& spec, EstimatorId id, const EstimatorOptions& opts) {
    const double c_one = opts.c.value_or(1.0);
    const double c_min = opts.c.value_or(1.0 / static_cast<double>(std::max<Index>(spec.m, 1)));
    switch (id) {
    case EstimatorId::S1: return ridge_estimator(spec, RidgeMode::constant, c_one, false, false);
    case EstimatorId::D1: return ridge_estimator(spec, RidgeMode::constant, c_one, true, false);
    case EstimatorId::S2: return ridge_estimator(spec, RidgeMode::trace_proportional, c_min, false, false);
    case EstimatorId::D2: return ridge_estimator(spec, RidgeMode::trace_proportional, c_min, true, false);
    case EstimatorId::S2plus: return ridge_estimator(spec, RidgeMode::trace_proportional, c_min, false, true);
    case EstimatorId::D2plus: return ridge_estimator(spec, RidgeMode::trace_proportional, c_min, true, true);
    case EstimatorId::em: return efron_morris_factors(spec, false, false);
    case EstimatorId::em2: return efron_morris_factors(spec, true, false);
    case EstimatorId::emplus: return efron_morris_factors(spec, false, true);
    case EstimatorId::em2plus: return efron_morris_factors(spec, true, true);
    case EstimatorId::js: return james_stein_factors(spec, false);
    case EstimatorId::jsplus: return james_stein_factors(spec, true);
    case EstimatorId::gd: return gavish_donoho_factors(spec);
    case EstimatorId::identity: {
        Shrinkage s;
        s.factors = VectorXd::Ones(spec.m);
        return s;
    }
    case EstimatorId::rls: {
        const RidgeConfig ridge = make_ridge(spec, opts.rls_mode, opts.c.value_or(1.0));
        Shrinkage s = rls_factors(spec, ridge, opts.weights, opts.rls_positive_part);
        if (spec.trW > 0.0) s.sure_delta = sure_delta(spec, ridge, opts.weights);
        return s;
    }
    }
    throw Error(ErrorCode::unknown_estimator, "unhandled estimator id");
}

EstimateReport run_estimator(const Spectrum& spec, EstimatorId id, const EstimatorOptions& opts) {
    return to_report(spec, shrink(spec, id, opts), id);
}

}  // namespace rlshrink
