// rlshrink command line front end. Links only the C interface.
#include "CLI11.hpp"
#include "rlshrink/rlshrink.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;

int fail(rls_status s) {
    std::cerr << "error (" << rls_status_string(s) << "): " << rls_last_error() << "\n";
    switch (s) {
    case RLS_ERR_UNKNOWN_ESTIMATOR:
    case RLS_ERR_CONFIG:
    case RLS_ERR_INVALID_ARGUMENT: return exit_usage;
    default: return exit_data;
    }
}

rls_ridge_mode parse_mode(const std::string& s) { return s == "const" ? RLS_RIDGE_CONSTANT : RLS_RIDGE_TRACE; }

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct DataHandle {
    rls_data* ptr = nullptr;
    ~DataHandle() { rls_data_destroy(ptr); }
};

struct Common {
    std::string sigma;
    std::string ridge_mode = "trace";
    std::optional<double> c;
    std::string out;
};

rls_status load(const std::string& matrix, const Common& common, DataHandle& data) {
    return rls_data_load_csv(matrix.c_str(), common.sigma.empty() ? nullptr : common.sigma.c_str(), &data.ptr);
}

int cmd_estimate(const std::string& matrix, const std::string& estimator, const Common& common,
                 std::optional<double> a, std::optional<double> b, bool positive_part) {
    DataHandle data;
    if (rls_status s = load(matrix, common, data); s != RLS_OK) return fail(s);

    rls_estimate_options opts;
    rls_estimate_options_init(&opts);
    opts.estimator = estimator.c_str();
    opts.ridge_mode = parse_mode(common.ridge_mode);
    if (common.c) {
        opts.has_c = 1;
        opts.c = *common.c;
    }
    opts.a = a.value_or(0.0);
    opts.b = b.value_or(0.0);
    opts.positive_part = positive_part ? 1 : 0;

    rls_estimate* est = nullptr;
    if (rls_status s = rls_estimate_run(data.ptr, &opts, &est); s != RLS_OK) return fail(s);
    const std::string prefix = common.out.empty() ? "estimate" : common.out;
    const std::string csv = prefix + ".csv";
    const std::string sidecar = prefix + ".json";
    rls_status s = rls_estimate_write_csv(est, csv.c_str());
    if (s == RLS_OK) s = rls_estimate_write_sidecar(est, sidecar.c_str());
    if (s != RLS_OK) {
        rls_estimate_destroy(est);
        return fail(s);
    }
    rls_estimate_summary sum{};
    rls_estimate_summary_get(est, &sum);
    std::cout << "estimator " << estimator << ": wrote " << csv << " and " << sidecar << "\n";
    if (sum.has_weights) std::cout << "  weights a = " << sum.a << ", b = " << sum.b << "\n";
    if (sum.has_weights) std::cout << "  alpha_hat = " << sum.alpha_hat << "\n";
    if (sum.has_sure) std::cout << "  sure_delta = " << sum.sure_delta << " (negative: lower risk than X)\n";
    for (size_t i = 0; i < sum.warning_count; ++i) std::cout << "  warning: " << rls_estimate_warning(est, i) << "\n";
    rls_estimate_destroy(est);
    return exit_ok;
}

int cmd_sure(const std::string& matrix, const Common& common, std::optional<double> a, std::optional<double> b,
             bool double_shrink) {
    DataHandle data;
    if (rls_status s = load(matrix, common, data); s != RLS_OK) return fail(s);
    const rls_ridge_mode mode = parse_mode(common.ridge_mode);
    size_t p = 0, n = 0, m = 0;
    rls_data_dims(data.ptr, &p, &n);
    rls_data_spectrum(data.ptr, nullptr, 0, &m, nullptr);
    const double c = common.c.value_or(mode == RLS_RIDGE_TRACE ? 1.0 / static_cast<double>(m) : 1.0);

    double wa = 0.0, wb = 0.0, alpha = 0.0;
    if (rls_status s = rls_sure_weights(data.ptr, mode, c, double_shrink ? 1 : 0, &wa, &wb, &alpha); s != RLS_OK) {
        return fail(s);
    }
    const bool estimated = !a && !b;
    if (a) wa = *a;
    if (b) wb = *b;
    if (!estimated && !b) wb = 0.0;
    double delta = 0.0;
    if (rls_status s = rls_sure_delta(data.ptr, mode, c, wa, wb, &delta); s != RLS_OK) return fail(s);

    std::ostringstream js;
    js << "{\"n\": " << n << ", \"p\": " << p << ", \"ridge_mode\": \"" << common.ridge_mode
       << "\", \"c\": " << json_number(c) << ", \"alpha_hat\": " << json_number(alpha)
       << ", \"weights_source\": \"" << (estimated ? "sure" : "given") << "\", \"a\": " << json_number(wa)
       << ", \"b\": " << json_number(wb) << ", \"sure_delta\": " << json_number(delta)
       << ", \"risk_difference_estimate\": " << json_number(delta / static_cast<double>(n * p)) << "}";
    std::cout << js.str() << "\n";
    if (!common.out.empty()) {
        std::FILE* f = std::fopen((common.out + ".json").c_str(), "w");
        if (!f) {
            std::cerr << "error (io): cannot write " << common.out << ".json\n";
            return exit_data;
        }
        std::fprintf(f, "%s\n", js.str().c_str());
        std::fclose(f);
    }
    return exit_ok;
}

int cmd_minimax(size_t n, size_t p, const Common& common, bool double_shrink, std::optional<double> a,
                std::optional<double> b) {
    const rls_ridge_mode mode = parse_mode(common.ridge_mode);
    const size_t q = std::min(n - 1, p);
    const double c = common.c.value_or(mode == RLS_RIDGE_TRACE ? 1.0 / static_cast<double>(q) : 1.0);
    rls_minimax_result res{};
    const bool known = a.has_value() || b.has_value();
    rls_status s = known ? rls_minimax_known(n, p, mode, c, a.value_or(0.0), b.value_or(0.0), &res)
                         : rls_minimax_estimated(n, p, mode, c, double_shrink ? 1 : 0, &res);
    if (s != RLS_OK) return fail(s);
    const char* verdict = res.status == RLS_MINIMAX       ? "minimax"
                          : res.status == RLS_NOT_COVERED ? "not-covered"
                                                          : "violates-known-bound";
    std::cout << "clause " << res.condition_id << ", margin " << json_number(res.margin) << ": " << verdict << "\n";
    std::ostringstream js;
    js << "{\"n\": " << n << ", \"p\": " << p << ", \"ridge_mode\": \"" << common.ridge_mode
       << "\", \"c\": " << json_number(c) << ", \"weights\": \"" << (known ? "known" : "estimated")
       << "\", \"shrinkage\": \"" << (double_shrink || b ? "double" : "single") << "\", \"condition_id\": \""
       << res.condition_id << "\", \"margin\": " << json_number(res.margin) << ", \"verdict\": \"" << verdict
       << "\"}";
    std::cout << js.str() << "\n";
    if (!common.out.empty()) {
        std::FILE* f = std::fopen((common.out + ".json").c_str(), "w");
        if (!f) {
            std::cerr << "error (io): cannot write " << common.out << ".json\n";
            return exit_data;
        }
        std::fprintf(f, "%s\n", js.str().c_str());
        std::fclose(f);
    }
    return exit_ok;
}

int cmd_simulate(const std::string& config, std::optional<std::uint64_t> seed, std::optional<size_t> reps,
                 unsigned workers, const std::string& out) {
    rls_experiment* exp = nullptr;
    if (rls_status s = rls_experiment_load(config.c_str(), &exp); s != RLS_OK) return fail(s);
    rls_status s = RLS_OK;
    if (seed) s = rls_experiment_set_seed(exp, *seed);
    if (s == RLS_OK && reps) s = rls_experiment_set_reps(exp, *reps);
    if (s != RLS_OK) {
        rls_experiment_destroy(exp);
        return fail(s);
    }
    const auto t0 = std::chrono::steady_clock::now();
    rls_risk_table* table = nullptr;
    s = rls_experiment_run(exp, workers, &table);
    rls_experiment_destroy(exp);
    if (s != RLS_OK) return fail(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string prefix = out.empty() ? "risk" : out;
    s = rls_risk_table_write_csv(table, (prefix + ".csv").c_str());
    if (s == RLS_OK) s = rls_risk_table_write_text(table, (prefix + ".txt").c_str());
    if (s != RLS_OK) {
        rls_risk_table_destroy(table);
        return fail(s);
    }
    std::cout << rls_risk_table_text(table);
    std::cout << "replications: " << rls_risk_table_total_reps(table) << "\n";
    std::printf("wall time: %.2f s\n", secs);
    std::cout << "wrote " << prefix << ".csv and " << prefix << ".txt\n";
    rls_risk_table_destroy(table);
    return exit_ok;
}

bool parse_sizes(const std::string& text, std::vector<size_t>& ns, std::vector<size_t>& ps) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos) return false;
        try {
            ns.push_back(std::stoul(item.substr(0, x)));
            ps.push_back(std::stoul(item.substr(x + 1)));
        } catch (const std::exception&) {
            return false;
        }
    }
    return !ns.empty();
}

int cmd_rmt_sweep(const std::string& sizes, size_t seeds, std::uint64_t seed, std::optional<double> c,
                  unsigned workers, const std::string& out) {
    std::vector<size_t> ns, ps;
    if (!parse_sizes(sizes, ns, ps)) {
        std::cerr << "error: --sizes must look like 200x100,400x200\n";
        return exit_usage;
    }
    std::vector<double> ga(ns.size()), gb(ns.size());
    const std::string path = (out.empty() ? "rmt_sweep" : out) + ".csv";
    const rls_status s = rls_rmt_sweep(ns.data(), ps.data(), ns.size(), seeds, seed, c.value_or(0.0), workers,
                                       path.c_str(), ga.data(), gb.data());
    if (s != RLS_OK) return fail(s);
    std::printf("%8s %8s %14s %14s\n", "n", "p", "median gap_a", "median gap_b");
    for (size_t i = 0; i < ns.size(); ++i) std::printf("%8zu %8zu %14.6g %14.6g\n", ns[i], ps[i], ga[i], gb[i]);
    std::cout << "wrote " << path << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ridge-type linear shrinkage of a normal mean matrix"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool with_sigma) {
        if (with_sigma) sub->add_option("--sigma", common.sigma, "Covariance CSV: p x p matrix or p variances");
        sub->add_option("--ridge-mode", common.ridge_mode, "Ridge: const (alpha = c) or trace (alpha = c tr W)")
            ->check(CLI::IsMember({"const", "trace"}));
        sub->add_option("--c", common.c, "Ridge constant (> 0)")->check(CLI::PositiveNumber);
        sub->add_option("--out", common.out, "Output file prefix");
    };

    std::string matrix;
    std::string estimator = "S2plus";
    std::optional<double> a, b;
    bool positive_part = false;
    bool double_shrink = false;

    auto* est = app.add_subcommand("estimate", "Estimate the mean matrix from a p x n CSV");
    est->add_option("matrix", matrix, "Observation matrix CSV (rows = variables)")->required();
    est->add_option("--estimator", estimator, "S1 S2 D1 D2 S2plus D2plus em em2 emplus em2plus js jsplus gd rls");
    est->add_option("--a", a, "Weight a for --estimator rls");
    est->add_option("--b", b, "Weight b for --estimator rls");
    est->add_flag("--positive-part", positive_part, "Clamp multipliers at zero (rls)");
    add_common(est, true);

    auto* sure = app.add_subcommand("sure", "Unbiased risk-difference estimate for the ridge estimator");
    sure->add_option("matrix", matrix, "Observation matrix CSV")->required();
    sure->add_option("--a", a, "Weight a (default: SURE-minimizing)");
    sure->add_option("--b", b, "Weight b (default: 0, or SURE-minimizing with --double)");
    sure->add_flag("--double", double_shrink, "Use double-shrinkage weights");
    add_common(sure, true);

    size_t n = 0, p = 0;
    auto* mm = app.add_subcommand("minimax-check", "Check the sufficient minimaxity conditions");
    mm->add_option("--n", n, "Number of observations")->required()->check(CLI::Range(size_t{2}, size_t{1} << 40));
    mm->add_option("--p", p, "Dimension")->required()->check(CLI::Range(size_t{1}, size_t{1} << 40));
    mm->add_flag("--double", double_shrink, "Double shrinkage");
    mm->add_option("--a", a, "Known weight a (omit for estimated weights)");
    mm->add_option("--b", b, "Known weight b");
    add_common(mm, false);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<size_t> reps;
    unsigned workers = 1;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo risk table from a JSON config");
    sim->add_option("config", config, "Experiment config JSON")->required();
    sim->add_option("--seed", seed, "Override the config seed");
    sim->add_option("--reps", reps, "Override the replication count")->check(CLI::PositiveNumber);
    sim->add_option("--workers", workers, "Worker threads (0 = all cores)");
    sim->add_option("--out", common.out, "Output prefix for .csv and .txt");

    std::string sizes = "200x100,400x200,800x400";
    size_t seeds = 20;
    std::uint64_t sweep_seed = 1;
    auto* rmt = app.add_subcommand("rmt-sweep", "Gap between estimated and loss-optimal weights across sizes");
    rmt->add_option("--sizes", sizes, "Comma-separated nxp list");
    rmt->add_option("--seeds", seeds, "Trials per size")->check(CLI::PositiveNumber);
    rmt->add_option("--seed", sweep_seed, "Master seed");
    rmt->add_option("--c", common.c, "Ridge constant (default 1/p)")->check(CLI::PositiveNumber);
    rmt->add_option("--workers", workers, "Worker threads (0 = all cores)");
    rmt->add_option("--out", common.out, "Output prefix for .csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    if (*est) return cmd_estimate(matrix, estimator, common, a, b, positive_part);
    if (*sure) return cmd_sure(matrix, common, a, b, double_shrink);
    if (*mm) return cmd_minimax(n, p, common, double_shrink, a, b);
    if (*sim) return cmd_simulate(config, seed, reps, workers, common.out);
    if (*rmt) return cmd_rmt_sweep(sizes, seeds, sweep_seed, common.c, workers, common.out);
    return exit_usage;
}
