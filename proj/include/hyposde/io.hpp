#pragma once

#include <string>
#include <vector>

#include "hyposde/contrast.hpp"
#include "hyposde/kalman.hpp"
#include "hyposde/optimize.hpp"
#include "hyposde/path.hpp"

namespace hyposde {

// Path CSV: header "t,x1,...,xN", one row per grid point, 17 significant
// digits so a round trip is bit-exact.
void write_path_csv(const PathSample& path, const std::string& file);
PathSample read_path_csv(const std::string& file);

// Filter trace CSV: "k,m_1..m_H,q_11..q_HH" with the covariance row-major.
void write_filter_trace_csv(const FilterTrace& trace, const std::string& file);

// Fit result JSON: {theta_hat, se, contrast_value, converged, config, seed}.
std::string fit_result_json(const ContrastResult& result, const VectorXd& standard_errors,
                            const std::string& config_description, std::uint64_t seed);
void write_text_file(const std::string& file, const std::string& content);
std::string format_double(double v);

}  // namespace hyposde
