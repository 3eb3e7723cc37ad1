#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "hyposde/params.hpp"

namespace hyposde::oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Brute-force reference implementations used by the test suites and the
// `verify` command. They deliberately avoid the library's filtering and
// density code paths: the linear-model transition matrices below are written
// out from the scheme displays, not taken from the model registry.

// One-step transition of the locally Gaussian scheme on the linear
// (q, p, s) model with drift parameter beta, written out explicitly:
//   T = [[1, d, d^2/2 - beta d^3/6], [0, 1, d - beta d^2/2], [0, 0, 1 - beta d]]
// and noise covariance sigma^2 * (delta-scaled constant matrix).
struct LinearToy3Step {
    MatrixXd transition;  // 3x3
    MatrixXd noise_cov;   // 3x3
};
LinearToy3Step toy3_lg2_step(double delta, double beta, double sigma, bool corrected);

// Log marginal density of the q-series q_1..q_n given q_0, with hidden prior
// (p_0, s_0) ~ N(m0, Q0), computed by assembling the dense joint Gaussian of
// all 3n coordinates and selecting the q rows.
double toy3_dense_marginal_loglik(const VectorXd& q, double delta, double beta, double sigma, bool corrected,
                                  const VectorXd& m0, const MatrixXd& q0);

// Two-sample Kolmogorov-Smirnov statistic and the alpha=0.01 threshold.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_threshold_alpha01(std::size_t n, std::size_t m);

}  // namespace hyposde::oracles
