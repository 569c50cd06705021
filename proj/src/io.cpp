#include "rlshrink/io.hpp"

#include "json.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace rlshrink {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

MatrixXd parse_matrix_csv(const std::string& text, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> row;
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = t.find(',', start);
            const std::string tok = trim(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            ++col;
            char* end = nullptr;
            errno = 0;
            const double v = tok.empty() ? 0.0 : std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) {
                throw Error(ErrorCode::io, source + ": line " + std::to_string(line_no) + ", column " +
                                               std::to_string(col) + ": '" + tok + "' is not a finite number");
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorCode::io, source + ": line " + std::to_string(line_no) + " has " +
                                           std::to_string(row.size()) + " columns, expected " +
                                           std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::io, source + ": no data rows");
    MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

MatrixXd read_matrix_csv(const std::string& path) { return parse_matrix_csv(read_all(path), path); }

void write_matrix_csv(const std::string& path, const MatrixXd& m) {
    std::string out;
    char buf[32];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j > 0) out += ',';
            out += buf;
        }
        out += '\n';
    }
    write_text_file(path, out);
}

Covariance read_covariance(const std::string& path, Index p) {
    const MatrixXd s = read_matrix_csv(path);
    if (s.rows() == p && s.cols() == p && p > 1) return Covariance::full(s);
    if (s.rows() == 1 && s.cols() == p) return Covariance::diagonal(s.row(0).transpose());
    if (s.cols() == 1 && s.rows() == p) return Covariance::diagonal(s.col(0));
    throw Error(ErrorCode::dimension, path + ": covariance is " + std::to_string(s.rows()) + "x" +
                                          std::to_string(s.cols()) + ", expected " + std::to_string(p) + "x" +
                                          std::to_string(p) + " or a vector of length " + std::to_string(p));
}

std::string estimate_sidecar_json(const EstimateReport& r) {
    nlohmann::ordered_json j;
    j["estimator"] = std::string(to_string(r.estimator_id));
    if (r.weights) {
        j["weights"] = {{"a", r.weights->a}, {"b", r.weights->b}};
    } else {
        j["weights"] = nullptr;
    }
    j["alpha_hat"] = r.alpha_hat;
    j["multipliers"] = std::vector<double>(r.factors.data(), r.factors.data() + r.factors.size());
    if (r.sure_delta) {
        j["sure_delta"] = *r.sure_delta;
    } else {
        j["sure_delta"] = nullptr;
    }
    j["sure_sign_convention"] = "negative means lower risk than X";
    j["transposed"] = r.transposed;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace rlshrink
