#pragma once

#include <functional>
#include <string>

#include "hyposde/params.hpp"

namespace hyposde {

// Sentinel returned by objectives at infeasible points (non-PD covariance,
// diverged filter); large but finite so simplex methods can retreat.
inline constexpr double kInfiniteContrast = 1e300;

enum class OptMethod { NelderMead, Adam };

OptMethod opt_method_from_string(const std::string& s);

struct OptimizerConfig {
    OptMethod method = OptMethod::NelderMead;
    long budget = 10000;  // Nelder-Mead: objective evaluations; Adam: iterations

    // Nelder-Mead: standard coefficients; converged when the simplex diameter
    // and the value spread both fall below their tolerances.
    double nm_reflection = 1.0;
    double nm_expansion = 2.0;
    double nm_contraction = 0.5;
    double nm_shrink = 0.5;
    double nm_initial_step = 0.1;  // relative to max(1, |theta0_k|)
    double nm_simplex_tol = 1e-8;
    double nm_value_tol = 1e-10;

    // Adam with central finite-difference gradients.
    double adam_step = 0.1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double adam_plateau_tol = 1e-5;  // converged when theta moved less than this over a 20-iteration window
    double fd_step_rel = 1e-5;       // gradient step 1e-5 * max(1, |theta_k|)
};

struct ContrastResult {
    ParamVector theta_hat;
    double contrast_value = 0.0;
    long iterations = 0;
    bool converged = false;
    std::string optimizer_tag;
};

using Objective = std::function<double(const ParamVector&)>;

// Minimize over the box given by theta0's bounds; iterates are clamped.
ContrastResult minimize(const Objective& objective, const ParamVector& theta0, const OptimizerConfig& config);

// Central finite-difference gradient with the optimizer's step rule and
// sentinel handling (one-sided fallback at infeasible probes).
VectorXd fd_gradient(const Objective& objective, const ParamVector& theta, double step_rel);

}  // namespace hyposde
