#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlshrink/matmodel.hpp"
#include "rlshrink/simlab.hpp"

namespace rlshrink {

/// Prior covariance Psi = I + Lambda, given by its eigenvalues (all >= 1).
struct PriorSpec {
    VectorXd psi_eigs;

    static PriorSpec identity(Index p);
    /// Eigenvalues at the fixed quantiles lo + (hi - lo)(j - 1/2)/p of
    /// Uniform[lo, hi]; deterministic, so the spectral distribution converges.
    static PriorSpec uniform_quantiles(Index p, double lo = 1.0, double hi = 3.0);
};

/// Throws Error(covariance) if any eigenvalue is below 1 or not finite.
void validate(const PriorSpec& prior);

struct ConvergenceRecord {
    Index n = 0;
    Index p = 0;
    double gamma = 0.0;  // p / n
    double a_hat = 0.0;
    double a_star = 0.0;
    double b_hat = 0.0;
    double b_star = 0.0;
    double gap_a = 0.0;  // |a_hat - a_star| / n
    double gap_b = 0.0;  // |b_hat - b_star| / tr W
    std::uint64_t seed = 0;
};

/// Draws Y (p x (n-1), columns N(0, Psi)), estimates (a_S, b_S) and compares
/// them with the loss-optimal weights under Psi. Only the trace-proportional
/// ridge is accepted; p >= n is a setting error.
ConvergenceRecord rmt_trial(Index n, Index p, const PriorSpec& prior, RidgeMode mode, double c,
                            std::uint64_t seed);

/// Stieltjes transform of the Marchenko-Pastur law with ratio gamma at -x:
/// the positive root of gamma x m^2 + (1 - gamma + x) m - 1 = 0.
double mp_stieltjes_identity(double gamma, double x);
/// -d/dx of the above, the limit of p^{-1} tr[(W/(n-1) + x I)^{-2}].
double mp_stieltjes_derivative(double gamma, double x);

struct EsdTraces {
    double t1 = 0.0;  // p^{-1} tr[(W/(n-1) + x I)^{-1}]
    double t2 = 0.0;  // p^{-1} tr[(W/(n-1) + x I)^{-2}]
};

/// Zero eigenvalues beyond the m-dimensional spectrum contribute 1/x and 1/x^2.
EsdTraces esd_traces(const Spectrum& spec, double x);

/// Canonical p x (n-1) sample with columns N(0, diag(psi_eigs)).
MatrixXd draw_canonical(Index n, const PriorSpec& prior, SplitMix64& rng);

struct SweepConfig {
    std::vector<SizePair> sizes;
    Index seeds = 20;
    std::uint64_t master_seed = 0;
    /// Ridge constant; unset means 1/p at each size.
    std::optional<double> c;
    double prior_lo = 1.0;
    double prior_hi = 3.0;
};

/// All trials, ordered by size then seed index; independent of `workers`.
std::vector<ConvergenceRecord> rmt_sweep(const SweepConfig& cfg, unsigned workers = 1);

/// Median of one gap field over `records`.
double median_gap(const std::vector<ConvergenceRecord>& records, double ConvergenceRecord::*field);

/// n,p,gamma,gap_a,gap_b,seed
std::string sweep_csv(const std::vector<ConvergenceRecord>& records);

}  // namespace rlshrink
