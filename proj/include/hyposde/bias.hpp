#pragma once

#include <Eigen/Dense>

#include "hyposde/params.hpp"
#include "hyposde/path.hpp"

namespace hyposde {

// Constants of the incorrect-drift case study, derived once from the exact
// inverse of the constant unit covariance of the linear three-dimensional
// model. The biased estimator converges to predicted_limit_factor times the
// true drift parameter.
struct CaseStudyConstants {
    Eigen::Matrix3d sigma;      // [[1/20,1/8,1/6],[1/8,1/3,1/2],[1/6,1/2,1]]
    Eigen::Matrix3d sigma_inv;
    double c1 = 0.0;  //  1/2 L32 + L33 + 1/4 L22 + 1/2 L23
    double c2 = 0.0;  //  1/6 L31 + 1/12 L21
    double predicted_limit_factor = 0.0;  // 1 + c2/c1

    static const CaseStudyConstants& instance();
};

// Closed-form drift estimator from the scheme that truncates the smoothest
// mean at second order. Input: complete (q, p, s) states on a constant grid.
// Asymptotically biased: converges to (1 + c2/c1) * beta.
double estimator_incorrect_drift(const MatrixXd& states, double delta);
double estimator_incorrect_drift(const PathSample& path);

// Closed-form diffusion estimator that imputes the momentum by finite
// differences of q; q must be one entry longer than s. Converges to
// (8/5) sigma^2.
double estimator_finite_difference_sigma(const VectorXd& q, const VectorXd& s, double delta);
double estimator_finite_difference_sigma(const PathSample& path);

}  // namespace hyposde
