#include "rlshrink/rmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "rlshrink/estimators.hpp"
#include "rlshrink/sure.hpp"

namespace rlshrink {

PriorSpec PriorSpec::identity(Index p) {
    if (p < 1) throw Error(ErrorCode::dimension, "prior dimension must be >= 1");
    return PriorSpec{VectorXd::Ones(p)};
}

PriorSpec PriorSpec::uniform_quantiles(Index p, double lo, double hi) {
    if (p < 1) throw Error(ErrorCode::dimension, "prior dimension must be >= 1");
    if (!(lo >= 1.0) || !(hi >= lo)) throw Error(ErrorCode::covariance, "need 1 <= lo <= hi");
    PriorSpec prior;
    prior.psi_eigs.resize(p);
    for (Index j = 0; j < p; ++j) {
        prior.psi_eigs(j) = lo + (hi - lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(p);
    }
    return prior;
}

void validate(const PriorSpec& prior) {
    if (prior.psi_eigs.size() < 1) throw Error(ErrorCode::dimension, "empty prior");
    for (Index j = 0; j < prior.psi_eigs.size(); ++j) {
        const double t = prior.psi_eigs(j);
        if (!std::isfinite(t) || t < 1.0) {
            throw Error(ErrorCode::covariance, "prior eigenvalue " + std::to_string(j) + " is below 1");
        }
    }
}

MatrixXd draw_canonical(Index n, const PriorSpec& prior, SplitMix64& rng) {
    const Index p = prior.psi_eigs.size();
    MatrixXd y(p, n - 1);
    std::normal_distribution<double> gauss;
    const VectorXd scale = prior.psi_eigs.array().sqrt().matrix();
    for (Index j = 0; j < n - 1; ++j) {
        for (Index i = 0; i < p; ++i) y(i, j) = scale(i) * gauss(rng);
    }
    return y;
}

ConvergenceRecord rmt_trial(Index n, Index p, const PriorSpec& prior, RidgeMode mode, double c,
                            std::uint64_t seed) {
    if (p >= n) throw Error(ErrorCode::setting, "consistency trials need p < n");
    if (mode != RidgeMode::trace_proportional) {
        throw Error(ErrorCode::setting, "consistency trials need the trace-proportional ridge");
    }
    validate(prior);
    if (prior.psi_eigs.size() != p) throw Error(ErrorCode::dimension, "prior must have p eigenvalues");

    SplitMix64 rng(seed);
    const Spectrum spec = spectrum_from_canonical(draw_canonical(n, prior, rng));
    const RidgeConfig ridge = make_ridge(spec, mode, c);

    ConvergenceRecord rec;
    rec.n = n;
    rec.p = p;
    rec.gamma = static_cast<double>(p) / static_cast<double>(n);
    rec.seed = seed;
    rec.a_hat = estimate_a_single(spec, ridge);
    rec.b_hat = estimate_b_double(spec, ridge, rec.a_hat);
    const BayesWeights opt = bayes_optimal_weights(spec, ridge, prior.psi_eigs, rec.a_hat);
    rec.a_star = opt.a_star;
    rec.b_star = opt.b_star;
    rec.gap_a = std::abs(rec.a_hat - rec.a_star) / static_cast<double>(n);
    rec.gap_b = std::abs(rec.b_hat - rec.b_star) / spec.trW;
    return rec;
}

double mp_stieltjes_identity(double gamma, double x) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::invalid_argument, "gamma must be positive");
    if (gamma == 1.0) throw Error(ErrorCode::setting, "gamma = 1 is excluded");
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::invalid_argument, "x must be positive");
    const double b = 1.0 - gamma + x;
    // rationalized root; no cancellation when b > 0
    return 2.0 / (b + std::sqrt(b * b + 4.0 * gamma * x));
}

double mp_stieltjes_derivative(double gamma, double x) {
    const double m = mp_stieltjes_identity(gamma, x);
    return (gamma * m * m + m) / (2.0 * gamma * x * m + 1.0 - gamma + x);
}

EsdTraces esd_traces(const Spectrum& spec, double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::invalid_argument, "x must be positive");
    const double scale = 1.0 / static_cast<double>(spec.n - 1);
    EsdTraces t;
    for (Index i = 0; i < spec.m; ++i) {
        const double r = 1.0 / (spec.ev(i) * scale + x);
        t.t1 += r;
        t.t2 += r * r;
    }
    const double zeros = static_cast<double>(spec.p - spec.m);
    t.t1 += zeros / x;
    t.t2 += zeros / (x * x);
    t.t1 /= static_cast<double>(spec.p);
    t.t2 /= static_cast<double>(spec.p);
    return t;
}

std::vector<ConvergenceRecord> rmt_sweep(const SweepConfig& cfg, unsigned workers) {
    if (cfg.sizes.empty()) throw Error(ErrorCode::config, "sweep lists no sizes");
    if (cfg.seeds < 1) throw Error(ErrorCode::config, "sweep needs at least one seed");
    for (const auto& s : cfg.sizes) {
        if (s.p < 1 || s.p >= s.n) throw Error(ErrorCode::setting, "sweep sizes need 1 <= p < n");
    }
    const auto per = static_cast<std::size_t>(cfg.seeds);
    const std::size_t jobs = cfg.sizes.size() * per;
    std::vector<ConvergenceRecord> out(jobs);
    std::vector<std::string> errors(jobs);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const SizePair sz = cfg.sizes[job / per];
            const std::uint64_t seed = substream_seed(cfg.master_seed, job / per, job % per, 2);
            const double c = cfg.c.value_or(1.0 / static_cast<double>(sz.p));
            try {
                out[job] = rmt_trial(sz.n, sz.p, PriorSpec::uniform_quantiles(sz.p, cfg.prior_lo, cfg.prior_hi),
                                     RidgeMode::trace_proportional, c, seed);
            } catch (const Error& e) {
                errors[job] = e.what();
            }
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(ErrorCode::degenerate, "sweep trial failed: " + e);
    }
    return out;
}

double median_gap(const std::vector<ConvergenceRecord>& records, double ConvergenceRecord::*field) {
    if (records.empty()) throw Error(ErrorCode::invalid_argument, "no records");
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.*field);
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::string sweep_csv(const std::vector<ConvergenceRecord>& records) {
    std::ostringstream out;
    out << "n,p,gamma,gap_a,gap_b,seed\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g,%.17g,%llu\n", static_cast<long long>(r.n),
                      static_cast<long long>(r.p), r.gamma, r.gap_a, r.gap_b,
                      static_cast<unsigned long long>(r.seed));
        out << buf;
    }
    return out.str();
}

}  // namespace rlshrink
