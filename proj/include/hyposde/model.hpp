#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "hyposde/params.hpp"

namespace hyposde {

// All drift terms of the locally Gaussian one-step mean at one state, in one
// callback. Hot loops (contrast sums, filters, path simulation) consume this
// bundle; the individual operators below remain available for generic models
// and cross-checks.
struct DriftBundle {
    VectorXd v_s1;     // V_{S1,0}(x_S, theta)
    VectorXd v_s2;     // V_{S2,0}(x, theta)
    VectorXd v_r;      // V_{R,0}(x, theta)
    VectorXd l_v_s1;   // L V_{S1,0}
    VectorXd l_v_s2;   // L V_{S2,0}
    VectorXd l2_v_s1;  // L^2 V_{S1,0}
};

// Degenerate SDE model of the two-smooth-layer class: state (x_S1, x_S2, x_R),
// noise enters only the rough block, the smoothest drift depends on (x_S1,
// x_S2) alone. Evaluators receive the full ParamVector because several of the
// built-in models share parameters across drift blocks (e.g. the QGLE coupling
// appears in both the second smooth and the rough drift).
//
// Evaluators must be pure; they are called concurrently from replication
// workers.
struct ModelSpec {
    std::string name;
    Dims dims;

    // x_s has length n_s1+n_s2; x has length n.
    std::function<VectorXd(const VectorXd& x_s, const ParamVector&)> drift_s1;
    std::function<VectorXd(const VectorXd& x, const ParamVector&)> drift_s2;
    std::function<VectorXd(const VectorXd& x, const ParamVector&)> drift_r;
    // j in [0, d): diffusion column V_{R,j+1}.
    std::function<VectorXd(const VectorXd& x, const ParamVector&, int j)> diff_r;

    std::function<MatrixXd(const VectorXd& x_s, const ParamVector&)> jac_s1_wrt_s2;  // n_s1 x n_s2
    std::function<MatrixXd(const VectorXd& x, const ParamVector&)> jac_s2_wrt_r;     // n_s2 x n_r

    // Optional analytic generator terms; nested central differences otherwise.
    std::function<VectorXd(const VectorXd& x, const ParamVector&)> gen_l_s1;
    std::function<VectorXd(const VectorXd& x, const ParamVector&)> gen_l_s2;
    std::function<VectorXd(const VectorXd& x, const ParamVector&)> gen_l2_s1;

    bool constant_diffusion = false;   // V_{R,j} independent of x (skips the Stratonovich correction)
    bool constant_covariance = false;  // a_R, a_S2, a_S1 independent of x (per-theta covariance cache)

    bool has_analytic_generators() const { return gen_l_s1 && gen_l_s2 && gen_l2_s1; }
};

enum class GeneratorTarget { v_s1_0, v_s2_0 };

// Stacked drift [V_{S1,0}; V_{S2,0}; V_{R,0}]. Throws ShapeError on length
// mismatch and NumericError naming the offending block on non-finite output.
VectorXd eval_drift(const ModelSpec& model, const VectorXd& x, const ParamVector& theta);

// Full diffusion column j (zeros on the smooth blocks).
VectorXd eval_diffusion_column(const ModelSpec& model, const VectorXd& x, const ParamVector& theta, int j);

// Generator applied to a drift block: L V_{S1,0} or L V_{S2,0}. Uses the
// model's analytic supplier when present, otherwise central finite
// differences with step h_i = cbrt(machine eps) * max(1, |x_i|).
VectorXd apply_generator(const ModelSpec& model, GeneratorTarget phi, const VectorXd& x, const ParamVector& theta);

// L^2 V_{S1,0}; the fallback nests apply_generator.
VectorXd apply_generator_squared_s1(const ModelSpec& model, const VectorXd& x, const ParamVector& theta);

// All six drift/generator terms at once.
DriftBundle eval_bundle(const ModelSpec& model, const VectorXd& x, const ParamVector& theta);

// Diffusion building blocks of the one-step covariance.
MatrixXd a_r_matrix(const ModelSpec& model, const VectorXd& x, const ParamVector& theta);
MatrixXd a_s2_matrix(const ModelSpec& model, const VectorXd& x, const ParamVector& theta, const MatrixXd& a_r);
MatrixXd a_s1_matrix(const ModelSpec& model, const VectorXd& x, const ParamVector& theta, const MatrixXd& a_s2);

// Finite-difference helpers shared with the rank checks.
namespace fd {

double step_for(double xi);

// Central-difference Jacobian of a vector field R^n -> R^m.
MatrixXd jacobian(const std::function<VectorXd(const VectorXd&)>& f, const VectorXd& x, int out_dim);

}  // namespace fd

// Prony-series memory kernel K(t) = sum_l (c_l / tau_l) exp(-t / tau_l).
double memory_kernel_prony(double t, const VectorXd& c, const VectorXd& tau);

}  // namespace hyposde
