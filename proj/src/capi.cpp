#include "rlshrink/rlshrink.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "rlshrink/estimators.hpp"
#include "rlshrink/io.hpp"
#include "rlshrink/matmodel.hpp"
#include "rlshrink/rmt.hpp"
#include "rlshrink/simlab.hpp"
#include "rlshrink/sure.hpp"

using namespace rlshrink;

struct rls_data {
    DataMatrix data;
    Spectrum spec;
};

struct rls_estimate {
    EstimateReport report;
};

struct rls_experiment {
    ExperimentConfig cfg;
};

struct rls_risk_table {
    RiskTable table;
    std::string text;
};

namespace {

thread_local std::string last_error;

rls_status from_code(ErrorCode c) { return static_cast<rls_status>(static_cast<int>(c)); }

template <class F>
rls_status guard(F&& f) noexcept {
    try {
        last_error.clear();
        f();
        return RLS_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return from_code(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return RLS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return RLS_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return RLS_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw Error(ErrorCode::invalid_argument, std::string(what) + " is null");
}

RidgeMode to_mode(rls_ridge_mode m) {
    switch (m) {
    case RLS_RIDGE_CONSTANT: return RidgeMode::constant;
    case RLS_RIDGE_TRACE: return RidgeMode::trace_proportional;
    }
    throw Error(ErrorCode::invalid_argument, "unknown ridge mode");
}

void fill_verdict(const MinimaxVerdict& v, rls_minimax_result* out) {
    out->minimax = v.minimax ? 1 : 0;
    out->status = static_cast<rls_minimax_status>(static_cast<int>(v.status));
    std::memset(out->condition_id, 0, sizeof out->condition_id);
    std::strncpy(out->condition_id, v.condition_id.c_str(), sizeof out->condition_id - 1);
    out->margin = v.margin;
}

void copy_out(const double* src, std::size_t count, double* dst, std::size_t cap) {
    if (cap < count) {
        throw Error(ErrorCode::dimension,
                    "buffer holds " + std::to_string(cap) + " values, need " + std::to_string(count));
    }
    std::memcpy(dst, src, count * sizeof(double));
}

}  // namespace

extern "C" {

const char* rls_version(void) { return "0.1.0"; }

const char* rls_status_string(rls_status status) {
    if (status == RLS_OK) return "ok";
    if (status == RLS_ERR_INTERNAL) return "internal";
    if (status >= RLS_ERR_DIMENSION && status <= RLS_ERR_INVALID_ARGUMENT) {
        return to_string(static_cast<ErrorCode>(static_cast<int>(status)));
    }
    return "unknown status";
}

const char* rls_last_error(void) { return last_error.c_str(); }

rls_status rls_data_create(const double* values, size_t p, size_t n, rls_sigma_kind sigma_kind, const double* sigma,
                           rls_data** out) {
    return guard([&] {
        require(values, "values");
        require(out, "out");
        *out = nullptr;
        const auto pi = static_cast<Index>(p);
        const auto ni = static_cast<Index>(n);
        MatrixXd x = Eigen::Map<const MatrixXd>(values, pi, ni);
        Covariance cov = Covariance::identity(std::max<Index>(pi, 1));
        switch (sigma_kind) {
        case RLS_SIGMA_IDENTITY: break;
        case RLS_SIGMA_DIAGONAL:
            require(sigma, "sigma");
            cov = Covariance::diagonal(Eigen::Map<const VectorXd>(sigma, pi));
            break;
        case RLS_SIGMA_FULL:
            require(sigma, "sigma");
            cov = Covariance::full(Eigen::Map<const MatrixXd>(sigma, pi, pi));
            break;
        default: throw Error(ErrorCode::invalid_argument, "unknown covariance kind");
        }
        DataMatrix d = make_data(std::move(x), std::move(cov));
        Spectrum s = center_and_whiten(d);
        *out = new rls_data{std::move(d), std::move(s)};
    });
}

rls_status rls_data_load_csv(const char* matrix_path, const char* sigma_path, rls_data** out) {
    return guard([&] {
        require(matrix_path, "matrix_path");
        require(out, "out");
        *out = nullptr;
        MatrixXd x = read_matrix_csv(matrix_path);
        Covariance cov = sigma_path ? read_covariance(sigma_path, x.rows()) : Covariance::identity(x.rows());
        DataMatrix d = make_data(std::move(x), std::move(cov));
        Spectrum s = center_and_whiten(d);
        *out = new rls_data{std::move(d), std::move(s)};
    });
}

void rls_data_destroy(rls_data* data) { delete data; }

rls_status rls_data_dims(const rls_data* data, size_t* p, size_t* n) {
    return guard([&] {
        require(data, "data");
        if (p) *p = static_cast<size_t>(data->data.p());
        if (n) *n = static_cast<size_t>(data->data.n());
    });
}

rls_status rls_data_spectrum(const rls_data* data, double* sv, size_t cap, size_t* m, double* trW) {
    return guard([&] {
        require(data, "data");
        const Spectrum& s = data->spec;
        if (m) *m = static_cast<size_t>(s.m);
        if (trW) *trW = s.trW;
        if (sv) std::memcpy(sv, s.sv.data(), std::min<size_t>(cap, s.m) * sizeof(double));
    });
}

void rls_estimate_options_init(rls_estimate_options* opts) {
    if (!opts) return;
    opts->estimator = "S2plus";
    opts->ridge_mode = RLS_RIDGE_TRACE;
    opts->has_c = 0;
    opts->c = 0.0;
    opts->a = 0.0;
    opts->b = 0.0;
    opts->positive_part = 0;
}

rls_status rls_estimate_run(const rls_data* data, const rls_estimate_options* opts, rls_estimate** out) {
    return guard([&] {
        require(data, "data");
        require(opts, "opts");
        require(opts->estimator, "estimator");
        require(out, "out");
        *out = nullptr;
        const EstimatorId id = parse_estimator(opts->estimator);
        EstimatorOptions eo;
        if (opts->has_c) eo.c = opts->c;
        eo.weights = Weights{opts->a, opts->b};
        eo.rls_mode = to_mode(opts->ridge_mode);
        eo.rls_positive_part = opts->positive_part != 0;
        *out = new rls_estimate{run_estimator(data->spec, id, eo)};
    });
}

void rls_estimate_destroy(rls_estimate* est) { delete est; }

rls_status rls_estimate_summary_get(const rls_estimate* est, rls_estimate_summary* out) {
    return guard([&] {
        require(est, "estimate");
        require(out, "out");
        const EstimateReport& r = est->report;
        out->p = static_cast<size_t>(r.theta_hat.rows());
        out->n = static_cast<size_t>(r.theta_hat.cols());
        out->factor_count = static_cast<size_t>(r.factors.size());
        out->has_weights = r.weights ? 1 : 0;
        out->a = r.weights ? r.weights->a : 0.0;
        out->b = r.weights ? r.weights->b : 0.0;
        out->alpha_hat = r.alpha_hat;
        out->has_sure = r.sure_delta ? 1 : 0;
        out->sure_delta = r.sure_delta.value_or(0.0);
        out->transposed = r.transposed ? 1 : 0;
        out->warning_count = r.warnings.size();
    });
}

rls_status rls_estimate_theta(const rls_estimate* est, double* out, size_t cap) {
    return guard([&] {
        require(est, "estimate");
        require(out, "out");
        const MatrixXd& t = est->report.theta_hat;
        copy_out(t.data(), static_cast<std::size_t>(t.size()), out, cap);
    });
}

rls_status rls_estimate_factors(const rls_estimate* est, double* out, size_t cap) {
    return guard([&] {
        require(est, "estimate");
        require(out, "out");
        const VectorXd& f = est->report.factors;
        copy_out(f.data(), static_cast<std::size_t>(f.size()), out, cap);
    });
}

const char* rls_estimate_warning(const rls_estimate* est, size_t i) {
    if (!est || i >= est->report.warnings.size()) return nullptr;
    return est->report.warnings[i].c_str();
}

rls_status rls_estimate_write_csv(const rls_estimate* est, const char* path) {
    return guard([&] {
        require(est, "estimate");
        require(path, "path");
        write_matrix_csv(path, est->report.theta_hat);
    });
}

rls_status rls_estimate_write_sidecar(const rls_estimate* est, const char* path) {
    return guard([&] {
        require(est, "estimate");
        require(path, "path");
        write_text_file(path, estimate_sidecar_json(est->report));
    });
}

rls_status rls_sure_delta(const rls_data* data, rls_ridge_mode mode, double c, double a, double b, double* out) {
    return guard([&] {
        require(data, "data");
        require(out, "out");
        const RidgeConfig ridge = make_ridge(data->spec, to_mode(mode), c);
        *out = sure_delta(data->spec, ridge, Weights{a, b});
    });
}

rls_status rls_sure_weights(const rls_data* data, rls_ridge_mode mode, double c, int double_shrink, double* a,
                            double* b, double* alpha_hat) {
    return guard([&] {
        require(data, "data");
        const RidgeConfig ridge = make_ridge(data->spec, to_mode(mode), c);
        const double ah = estimate_a_single(data->spec, ridge);
        if (a) *a = ah;
        if (b) *b = double_shrink ? estimate_b_double(data->spec, ridge, ah) : 0.0;
        if (alpha_hat) *alpha_hat = ridge.alpha_hat;
    });
}

rls_status rls_minimax_known(size_t n, size_t p, rls_ridge_mode mode, double c, double a, double b,
                             rls_minimax_result* out) {
    return guard([&] {
        require(out, "out");
        fill_verdict(minimax_known(static_cast<Index>(n), static_cast<Index>(p), to_mode(mode), c, Weights{a, b}),
                     out);
    });
}

rls_status rls_minimax_estimated(size_t n, size_t p, rls_ridge_mode mode, double c, int double_shrink,
                                 rls_minimax_result* out) {
    return guard([&] {
        require(out, "out");
        fill_verdict(
            minimax_estimated(static_cast<Index>(n), static_cast<Index>(p), to_mode(mode), c, double_shrink != 0),
            out);
    });
}

rls_status rls_experiment_load(const char* config_path, rls_experiment** out) {
    return guard([&] {
        require(config_path, "config_path");
        require(out, "out");
        *out = nullptr;
        *out = new rls_experiment{load_config(config_path)};
    });
}

rls_status rls_experiment_parse(const char* json_text, rls_experiment** out) {
    return guard([&] {
        require(json_text, "json_text");
        require(out, "out");
        *out = nullptr;
        *out = new rls_experiment{parse_config(json_text)};
    });
}

void rls_experiment_destroy(rls_experiment* exp) { delete exp; }

rls_status rls_experiment_set_seed(rls_experiment* exp, uint64_t seed) {
    return guard([&] {
        require(exp, "experiment");
        exp->cfg.seed = seed;
    });
}

rls_status rls_experiment_set_reps(rls_experiment* exp, size_t reps) {
    return guard([&] {
        require(exp, "experiment");
        if (reps < 1) throw Error(ErrorCode::config, "reps must be >= 1");
        exp->cfg.reps = static_cast<Index>(reps);
    });
}

rls_status rls_experiment_run(const rls_experiment* exp, unsigned workers, rls_risk_table** out) {
    return guard([&] {
        require(exp, "experiment");
        require(out, "out");
        *out = nullptr;
        RiskTable t = run_experiment(exp->cfg, workers);
        std::string text = t.to_text();
        *out = new rls_risk_table{std::move(t), std::move(text)};
    });
}

void rls_risk_table_destroy(rls_risk_table* table) { delete table; }

size_t rls_risk_table_total_reps(const rls_risk_table* table) {
    if (!table) return 0;
    return static_cast<size_t>(table->table.reps) * table->table.sizes.size();
}

rls_status rls_risk_table_cell(const rls_risk_table* table, size_t row, size_t col, double* mean, double* se,
                               size_t* failures) {
    return guard([&] {
        require(table, "table");
        const RiskTable& t = table->table;
        if (row >= t.sizes.size() || col >= t.estimators.size()) {
            throw Error(ErrorCode::invalid_argument, "cell index out of range");
        }
        const RiskCell& c = t.at(row, col);
        if (mean) *mean = c.mean;
        if (se) *se = c.se;
        if (failures) *failures = static_cast<size_t>(c.failures);
    });
}

rls_status rls_risk_table_write_csv(const rls_risk_table* table, const char* path) {
    return guard([&] {
        require(table, "table");
        require(path, "path");
        write_text_file(path, table->table.to_csv());
    });
}

rls_status rls_risk_table_write_text(const rls_risk_table* table, const char* path) {
    return guard([&] {
        require(table, "table");
        require(path, "path");
        write_text_file(path, table->text);
    });
}

const char* rls_risk_table_text(const rls_risk_table* table) { return table ? table->text.c_str() : ""; }

rls_status rls_rmt_sweep(const size_t* ns, const size_t* ps, size_t count, size_t seeds, uint64_t seed, double c,
                         unsigned workers, const char* csv_path, double* median_gap_a, double* median_gap_b) {
    return guard([&] {
        require(ns, "ns");
        require(ps, "ps");
        require(csv_path, "csv_path");
        SweepConfig cfg;
        for (size_t i = 0; i < count; ++i) {
            cfg.sizes.push_back(SizePair{static_cast<Index>(ns[i]), static_cast<Index>(ps[i])});
        }
        cfg.seeds = static_cast<Index>(seeds);
        cfg.master_seed = seed;
        if (c > 0.0) cfg.c = c;
        const std::vector<ConvergenceRecord> recs = rmt_sweep(cfg, workers);
        write_text_file(csv_path, sweep_csv(recs));
        for (size_t i = 0; i < count; ++i) {
            const auto first = recs.begin() + static_cast<std::ptrdiff_t>(i * seeds);
            const std::vector<ConvergenceRecord> group(first, first + static_cast<std::ptrdiff_t>(seeds));
            if (median_gap_a) median_gap_a[i] = median_gap(group, &ConvergenceRecord::gap_a);
            if (median_gap_b) median_gap_b[i] = median_gap(group, &ConvergenceRecord::gap_b);
        }
    });
}

rls_status rls_mp_stieltjes(double gamma, double x, double* out) {
    return guard([&] {
        require(out, "out");
        *out = mp_stieltjes_identity(gamma, x);
    });
}

}  // extern "C"
