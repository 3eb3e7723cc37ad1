#pragma once

#include "hyposde/model.hpp"

namespace hyposde {

// Numerical evaluation of the rank (span) conditions that make the
// two-smooth-layer class well posed: the rough diffusion spans R^{n_r}, the
// first Lie brackets with the Stratonovich drift span the (S2, R) projection,
// and the second brackets complete the full space.
struct ConditionA2Report {
    int rank_r = 0;
    int rank_s2r = 0;
    int rank_full = 0;
    bool pass = false;
    MatrixXd basis_r;     // n_r x d
    MatrixXd basis_s2r;   // (n_s2+n_r) x 2d
    MatrixXd basis_full;  // n x 3d
};

ConditionA2Report check_condition_a2(const ModelSpec& model, const VectorXd& x, const ParamVector& theta,
                                     double tol = 1e-8);

// Stratonovich-corrected drift of the SDE at x. The correction is exactly
// zero for state-independent diffusion and skipped in that case.
VectorXd stratonovich_drift(const ModelSpec& model, const VectorXd& x, const ParamVector& theta);

}  // namespace hyposde
