#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rlshrink/estimators.hpp"
#include "rlshrink/matmodel.hpp"

namespace rlshrink {

/// SplitMix64. Small, fast, and cheap to split: every (setting, replication)
/// pair gets its own generator seeded from the master seed, so results do not
/// depend on how replications are scheduled across threads.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Seed of substream (a, b, c) under `master`.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) noexcept;

enum class ProfileKind { linear_ramp5, linear_ramp10 };

/// How the tail singular values are set: 10^q (table captions) or
/// min(n, p)^q (body text of the second setup).
enum class TailRule { power_of_ten, power_of_min };

struct MeanProfile {
    ProfileKind kind = ProfileKind::linear_ramp5;
    double q = -1.0;
    TailRule tail = TailRule::power_of_ten;

    double base() const noexcept { return kind == ProfileKind::linear_ramp5 ? 10.0 : 100.0; }
    Index divisor() const noexcept { return kind == ProfileKind::linear_ramp5 ? 5 : 10; }
};

/// Singular values of the mean matrix: a linear ramp from base to 2*base over
/// the first floor(min(n,p)/divisor) values, then the tail value. A ramp of
/// length one is the single value base.
VectorXd profile_singular_values(Index n, Index p, const MeanProfile& profile);

/// Theta = U0 diag(s) V0^T with Haar-distributed frames drawn from `seed`.
MatrixXd make_mean(Index n, Index p, const MeanProfile& profile, std::uint64_t seed);

/// p x k matrix with orthonormal columns, Haar distributed.
MatrixXd haar_frame(Index rows, Index cols, SplitMix64& rng);

enum class NoiseKind { gaussian, student_t3, chisq2 };

std::string_view to_string(NoiseKind k) noexcept;
std::string_view to_string(ProfileKind k) noexcept;

/// X = Theta + E, E i.i.d. with mean 0 and variance 1, Sigma = I.
DataMatrix sample_data(const MatrixXd& theta, NoiseKind noise, std::uint64_t seed);
void fill_noise(MatrixXd& e, NoiseKind noise, SplitMix64& rng);

/// (np)^{-1} tr[(theta_hat - theta)^T Sigma^{-1} (theta_hat - theta)]
double loss(const MatrixXd& theta_hat, const MatrixXd& theta, const Covariance& sigma);

struct SizePair {
    Index n = 0;
    Index p = 0;
    bool operator==(const SizePair&) const = default;
};

struct ExperimentConfig {
    std::vector<SizePair> sizes;
    MeanProfile profile;
    NoiseKind noise = NoiseKind::gaussian;
    Index reps = 1;
    std::uint64_t seed = 0;
    std::vector<EstimatorId> estimators;
};

/// Parses the JSON form:
///   {"sizes": [[n, p], ...], "profile": {"kind": "LinearRamp5", "q": -1},
///    "noise": "gaussian", "reps": 1000, "seed": 1, "estimators": [...]}
/// `estimators` defaults to the six table columns. Throws Error(config).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& cfg);

struct RiskCell {
    double mean = 0.0;
    double se = 0.0;
    Index failures = 0;  // replications where the estimator raised an error
    std::string note;    // first failure message
};

struct RiskTable {
    std::vector<SizePair> sizes;
    std::vector<EstimatorId> estimators;
    std::vector<RiskCell> cells;  // row-major: sizes x estimators
    Index reps = 0;

    const RiskCell& at(std::size_t row, std::size_t col) const { return cells.at(row * estimators.size() + col); }
    RiskCell& at(std::size_t row, std::size_t col) { return cells.at(row * estimators.size() + col); }
    /// Cell for (n, p, id); throws Error(invalid_argument) if absent.
    const RiskCell& find(Index n, Index p, EstimatorId id) const;

    /// n,p,<id>_mean...,<id>_se...,<id>_failures... with 17 significant digits.
    std::string to_csv() const;
    /// Aligned table with three significant figures; flagged cells marked '*'.
    std::string to_text() const;
};

/// Table column label: S2+, D2+, em+, em2+, js+, gd, ...
std::string_view display_name(EstimatorId id) noexcept;

/// Sum in fixed pairwise order, independent of how the values were produced.
double pairwise_sum(const double* x, std::size_t count) noexcept;

/// Runs every (size, replication) on `workers` threads (0 = hardware
/// concurrency). The table is bit-identical for any worker count.
RiskTable run_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

}  // namespace rlshrink
