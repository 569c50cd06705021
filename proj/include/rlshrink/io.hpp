#pragma once

#include <string>

#include "rlshrink/estimators.hpp"
#include "rlshrink/matmodel.hpp"

namespace rlshrink {

/// Numeric CSV, one matrix row per line. Blank lines and lines starting with
/// '#' are skipped. Throws Error(io) naming the offending row and column.
MatrixXd read_matrix_csv(const std::string& path);
MatrixXd parse_matrix_csv(const std::string& text, const std::string& source = "<string>");
void write_matrix_csv(const std::string& path, const MatrixXd& m);

/// A p x p matrix gives a full covariance; a single row or column of length p
/// gives a diagonal one.
Covariance read_covariance(const std::string& path, Index p);

/// JSON with estimator, weights, alpha_hat, multipliers, sure_delta and
/// warnings.
std::string estimate_sidecar_json(const EstimateReport& report);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rlshrink
