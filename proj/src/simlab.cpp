#include "rlshrink/simlab.hpp"

#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace rlshrink {

namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t x) noexcept {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

ProfileKind parse_profile_kind(const std::string& s) {
    if (s == "LinearRamp5" || s == "linear_ramp5" || s == "ramp5") return ProfileKind::linear_ramp5;
    if (s == "LinearRamp10" || s == "linear_ramp10" || s == "ramp10") return ProfileKind::linear_ramp10;
    throw Error(ErrorCode::config, "unknown profile kind '" + s + "'");
}

NoiseKind parse_noise(const std::string& s) {
    if (s == "gaussian" || s == "Gaussian" || s == "normal") return NoiseKind::gaussian;
    if (s == "t3" || s == "StudentT3" || s == "student_t3") return NoiseKind::student_t3;
    if (s == "chisq2" || s == "ChiSq2") return NoiseKind::chisq2;
    throw Error(ErrorCode::config, "unknown noise kind '" + s + "'");
}

SizePair parse_size(const json& j) {
    SizePair s;
    if (j.is_array() && j.size() == 2) {
        s.n = j[0].get<Index>();
        s.p = j[1].get<Index>();
    } else if (j.is_object()) {
        s.n = j.at("n").get<Index>();
        s.p = j.at("p").get<Index>();
    } else {
        throw Error(ErrorCode::config, "each size must be [n, p] or {\"n\":..,\"p\":..}");
    }
    return s;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%#.3g", v);
    return buf;
}

std::string fmt17(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CellSamples {
    std::vector<double> losses;  // NaN marks a failed replication
    Index first_failure = -1;
    std::string note;
};

RiskCell summarize(const CellSamples& s) {
    RiskCell cell;
    std::vector<double> ok;
    ok.reserve(s.losses.size());
    for (double x : s.losses) {
        if (std::isnan(x)) {
            ++cell.failures;
        } else {
            ok.push_back(x);
        }
    }
    cell.note = s.note;
    if (ok.empty()) {
        cell.mean = std::numeric_limits<double>::quiet_NaN();
        cell.se = std::numeric_limits<double>::quiet_NaN();
        return cell;
    }
    const double k = static_cast<double>(ok.size());
    cell.mean = pairwise_sum(ok.data(), ok.size()) / k;
    if (ok.size() > 1) {
        std::vector<double> sq(ok.size());
        for (std::size_t i = 0; i < ok.size(); ++i) sq[i] = (ok[i] - cell.mean) * (ok[i] - cell.mean);
        cell.se = std::sqrt(pairwise_sum(sq.data(), sq.size()) / (k - 1.0) / k);
    }
    return cell;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    std::uint64_t h = mix(master ^ 0x243f6a8885a308d3ULL);
    h = mix(h ^ (a + 0x13198a2e03707344ULL));
    h = mix(h ^ (b + 0xa4093822299f31d0ULL));
    h = mix(h ^ (c + 0x082efa98ec4e6c89ULL));
    return h;
}

VectorXd profile_singular_values(Index n, Index p, const MeanProfile& profile) {
    if (n < 1 || p < 1) throw Error(ErrorCode::dimension, "need n >= 1 and p >= 1");
    const Index k = std::min(n, p);
    const Index lead = k / profile.divisor();
    if (lead < 1) {
        throw Error(ErrorCode::setting, "min(n, p) = " + std::to_string(k) + " leaves no ramp values for divisor " +
                                            std::to_string(profile.divisor()));
    }
    const double base = profile.base();
    const double tail_base = profile.tail == TailRule::power_of_ten ? 10.0 : static_cast<double>(k);
    const double tail = std::pow(tail_base, profile.q);
    VectorXd s = VectorXd::Constant(k, tail);
    for (Index i = 0; i < lead; ++i) {
        s(i) = lead == 1 ? base : base + base * static_cast<double>(i) / static_cast<double>(lead - 1);
    }
    return s;
}

MatrixXd haar_frame(Index rows, Index cols, SplitMix64& rng) {
    std::normal_distribution<double> gauss;
    MatrixXd g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows, cols);
    const MatrixXd& r = qr.matrixQR();
    for (Index j = 0; j < cols; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

MatrixXd make_mean(Index n, Index p, const MeanProfile& profile, std::uint64_t seed) {
    const VectorXd s = profile_singular_values(n, p, profile);
    SplitMix64 rng(seed);
    const Index k = s.size();
    const MatrixXd u0 = haar_frame(p, k, rng);
    const MatrixXd v0 = haar_frame(n, k, rng);
    return u0 * s.asDiagonal() * v0.transpose();
}

std::string_view to_string(NoiseKind k) noexcept {
    switch (k) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::student_t3: return "t3";
    case NoiseKind::chisq2: return "chisq2";
    }
    return "?";
}

std::string_view to_string(ProfileKind k) noexcept {
    return k == ProfileKind::linear_ramp5 ? "LinearRamp5" : "LinearRamp10";
}

void fill_noise(MatrixXd& e, NoiseKind noise, SplitMix64& rng) {
    const Index total = e.size();
    double* d = e.data();
    switch (noise) {
    case NoiseKind::gaussian: {
        std::normal_distribution<double> dist;
        for (Index i = 0; i < total; ++i) d[i] = dist(rng);
        break;
    }
    case NoiseKind::student_t3: {
        std::student_t_distribution<double> dist(3.0);
        const double scale = std::sqrt(1.0 / 3.0);
        for (Index i = 0; i < total; ++i) d[i] = dist(rng) * scale;
        break;
    }
    case NoiseKind::chisq2: {
        std::chi_squared_distribution<double> dist(2.0);
        for (Index i = 0; i < total; ++i) d[i] = (dist(rng) - 2.0) / 2.0;
        break;
    }
    }
}

DataMatrix sample_data(const MatrixXd& theta, NoiseKind noise, std::uint64_t seed) {
    SplitMix64 rng(seed);
    MatrixXd x(theta.rows(), theta.cols());
    fill_noise(x, noise, rng);
    x += theta;
    return make_data(std::move(x), Covariance::identity(theta.rows()));
}

double loss(const MatrixXd& theta_hat, const MatrixXd& theta, const Covariance& sigma) {
    if (theta_hat.rows() != theta.rows() || theta_hat.cols() != theta.cols()) {
        throw Error(ErrorCode::dimension, "estimate and mean have different shapes");
    }
    const double np = static_cast<double>(theta.rows()) * static_cast<double>(theta.cols());
    return sigma.mahalanobis_sq(theta_hat - theta) / np;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.sizes.empty()) throw Error(ErrorCode::config, "config lists no sizes");
    if (cfg.reps < 1) throw Error(ErrorCode::config, "reps must be >= 1");
    if (cfg.estimators.empty()) throw Error(ErrorCode::config, "config lists no estimators");
    for (const auto& s : cfg.sizes) {
        if (s.n < 2 || s.p < 1) {
            throw Error(ErrorCode::config,
                        "size (" + std::to_string(s.n) + ", " + std::to_string(s.p) + ") needs n >= 2 and p >= 1");
        }
        if (std::min(s.n, s.p) / cfg.profile.divisor() < 1) {
            throw Error(ErrorCode::config, "size (" + std::to_string(s.n) + ", " + std::to_string(s.p) +
                                               ") is too small for the mean profile");
        }
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    ExperimentConfig cfg;
    try {
        const json j = json::parse(json_text);
        for (const auto& s : j.at("sizes")) cfg.sizes.push_back(parse_size(s));
        if (j.contains("profile")) {
            const json& pr = j.at("profile");
            cfg.profile.kind = parse_profile_kind(pr.at("kind").get<std::string>());
            if (pr.contains("q")) cfg.profile.q = pr.at("q").get<double>();
            if (pr.contains("tail")) {
                const std::string t = pr.at("tail").get<std::string>();
                if (t == "pow10") {
                    cfg.profile.tail = TailRule::power_of_ten;
                } else if (t == "min") {
                    cfg.profile.tail = TailRule::power_of_min;
                } else {
                    throw Error(ErrorCode::config, "profile.tail must be \"pow10\" or \"min\"");
                }
            }
        }
        if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise").get<std::string>());
        cfg.reps = j.value("reps", Index{1});
        cfg.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("estimators")) {
            for (const auto& e : j.at("estimators")) cfg.estimators.push_back(parse_estimator(e.get<std::string>()));
        } else {
            const auto six = table_estimators();
            cfg.estimators.assign(six.begin(), six.end());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config, std::string("bad experiment config: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::config) throw;
        throw Error(ErrorCode::config, e.what());
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string_view display_name(EstimatorId id) noexcept {
    switch (id) {
    case EstimatorId::S2plus: return "S2+";
    case EstimatorId::D2plus: return "D2+";
    case EstimatorId::emplus: return "em+";
    case EstimatorId::em2plus: return "em2+";
    case EstimatorId::jsplus: return "js+";
    default: return to_string(id);
    }
}

const RiskCell& RiskTable::find(Index n, Index p, EstimatorId id) const {
    for (std::size_t r = 0; r < sizes.size(); ++r) {
        if (sizes[r].n != n || sizes[r].p != p) continue;
        for (std::size_t c = 0; c < estimators.size(); ++c) {
            if (estimators[c] == id) return at(r, c);
        }
    }
    throw Error(ErrorCode::invalid_argument, "no cell for (" + std::to_string(n) + ", " + std::to_string(p) +
                                                 ", " + std::string(to_string(id)) + ")");
}

std::string RiskTable::to_csv() const {
    std::ostringstream out;
    out << "n,p";
    for (auto id : estimators) out << ',' << to_string(id) << "_mean";
    for (auto id : estimators) out << ',' << to_string(id) << "_se";
    for (auto id : estimators) out << ',' << to_string(id) << "_failures";
    out << '\n';
    for (std::size_t r = 0; r < sizes.size(); ++r) {
        out << sizes[r].n << ',' << sizes[r].p;
        for (std::size_t c = 0; c < estimators.size(); ++c) out << ',' << fmt17(at(r, c).mean);
        for (std::size_t c = 0; c < estimators.size(); ++c) out << ',' << fmt17(at(r, c).se);
        for (std::size_t c = 0; c < estimators.size(); ++c) out << ',' << at(r, c).failures;
        out << '\n';
    }
    return out.str();
}

std::string RiskTable::to_text() const {
    constexpr int first = 12;
    constexpr int width = 10;
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", first, "(n, p)");
    out << buf;
    for (auto id : estimators) {
        std::snprintf(buf, sizeof buf, "%*s", width, std::string(display_name(id)).c_str());
        out << buf;
    }
    out << '\n';
    bool flagged = false;
    for (std::size_t r = 0; r < sizes.size(); ++r) {
        const std::string label = "(" + std::to_string(sizes[r].n) + ", " + std::to_string(sizes[r].p) + ")";
        std::snprintf(buf, sizeof buf, "%-*s", first, label.c_str());
        out << buf;
        for (std::size_t c = 0; c < estimators.size(); ++c) {
            const RiskCell& cell = at(r, c);
            std::string v = std::isfinite(cell.mean) ? fmt3(cell.mean) : "NA";
            if (cell.failures > 0) {
                v += '*';
                flagged = true;
            }
            std::snprintf(buf, sizeof buf, "%*s", width, v.c_str());
            out << buf;
        }
        out << '\n';
    }
    if (flagged) out << "* some replications failed; mean over the rest\n";
    return out.str();
}

double pairwise_sum(const double* x, std::size_t count) noexcept {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += x[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, count - half);
}

RiskTable run_experiment(const ExperimentConfig& cfg, unsigned workers) {
    validate(cfg);
    const std::size_t n_sizes = cfg.sizes.size();
    const std::size_t n_est = cfg.estimators.size();
    const auto reps = static_cast<std::size_t>(cfg.reps);

    std::vector<CellSamples> samples(n_sizes * n_est);
    for (auto& s : samples) s.losses.assign(reps, 0.0);
    std::mutex note_mutex;

    const std::size_t jobs = n_sizes * reps;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t si = job / reps;
            const std::size_t rep = job % reps;
            const SizePair sz = cfg.sizes[si];
            const MatrixXd theta = make_mean(sz.n, sz.p, cfg.profile, substream_seed(cfg.seed, si, rep, 0));
            const DataMatrix data = sample_data(theta, cfg.noise, substream_seed(cfg.seed, si, rep, 1));
            std::optional<Spectrum> spec;
            std::string spec_error;
            try {
                spec = center_and_whiten(data);
            } catch (const Error& e) {
                spec_error = e.what();
            }
            for (std::size_t ei = 0; ei < n_est; ++ei) {
                CellSamples& cell = samples[si * n_est + ei];
                std::string failure = spec_error;
                if (spec) {
                    try {
                        const Shrinkage s = shrink(*spec, cfg.estimators[ei]);
                        cell.losses[rep] = loss(estimate_matrix(*spec, s), theta, data.sigma);
                        continue;
                    } catch (const Error& e) {
                        failure = e.what();
                    }
                }
                cell.losses[rep] = std::numeric_limits<double>::quiet_NaN();
                std::lock_guard<std::mutex> lock(note_mutex);
                if (cell.first_failure < 0 || static_cast<Index>(rep) < cell.first_failure) {
                    cell.first_failure = static_cast<Index>(rep);
                    cell.note = failure;
                }
            }
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    RiskTable table;
    table.sizes = cfg.sizes;
    table.estimators = cfg.estimators;
    table.reps = cfg.reps;
    table.cells.reserve(samples.size());
    for (const auto& s : samples) table.cells.push_back(summarize(s));
    return table;
}

}  // namespace rlshrink
