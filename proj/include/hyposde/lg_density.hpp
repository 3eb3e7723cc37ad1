#pragma once

#include <Eigen/Dense>

#include "hyposde/model.hpp"

namespace hyposde {

// One-step conditional mean of the locally Gaussian scheme: third-order drift
// expansion on the smoothest block, second-order on the second smooth block,
// Euler on the rough block.
struct MeanVector {
    VectorXd mu_s1, mu_s2, mu_r;
    double delta = 0.0;

    VectorXd stacked() const {
        VectorXd out(mu_s1.size() + mu_s2.size() + mu_r.size());
        out << mu_s1, mu_s2, mu_r;
        return out;
    }
};

// Unit-step covariance Sigma(1, x, theta) together with its building matrices.
// Block scaling in delta is metadata: block (i1,i2) of Sigma(delta,...) carries
// delta^((k_i1+k_i2)/2) with k = (5, 3, 1) per block row.
struct BlockCovariance {
    Dims dims;
    MatrixXd a_r, a_s2, a_s1;
    MatrixXd d1;  // d_{x_S2} V_{S1,0}, n_s1 x n_s2
    MatrixXd d2;  // d_{x_R} V_{S2,0},  n_s2 x n_r
    MatrixXd sigma_unit;  // Sigma(1, x, theta), n x n

    static constexpr int kDeltaPowS1 = 5;
    static constexpr int kDeltaPowS2 = 3;
    static constexpr int kDeltaPowR = 1;

    int delta_exponent() const { return 5 * dims.n_s1 + 3 * dims.n_s2 + dims.n_r; }

    // Sigma(delta, x, theta) by blockwise rescaling.
    MatrixXd scaled(double delta) const;
};

// Residual (y - mu) with blocks scaled by delta^{-5/2}, delta^{-3/2}, delta^{-1/2}.
struct Residual {
    VectorXd m;
};

// Inverse of the unit covariance plus cached factorization results.
struct Precision {
    MatrixXd lambda;    // Sigma(1,x,theta)^{-1}
    double log_det = 0; // log |Sigma(1,x,theta)|
};

MeanVector mean_lg2(const ModelSpec& model, double delta, const VectorXd& x, const ParamVector& theta);
MeanVector mean_lg2(const ModelSpec& model, double delta, const VectorXd& x, const DriftBundle& bundle);

// Comparison scheme of the linear-SDE experiment: first-order means on both
// smooth blocks, same Gaussian part.
MeanVector mean_lg2_nocorr(const ModelSpec& model, double delta, const VectorXd& x, const DriftBundle& bundle);

BlockCovariance covariance_blocks(const ModelSpec& model, const VectorXd& x, const ParamVector& theta);

// det Sigma(delta, x, theta) = delta^(5 n_s1 + 3 n_s2 + n_r) det Sigma(1, x, theta),
// computed via Cholesky; throws DefinitenessError when not positive definite.
double determinant_sigma(const BlockCovariance& cov, double delta);

// Closed-form determinant |a_R| |a_S2|/12^{n_s2} |a_S1|/720^{n_s1} (equals the
// 1/8640 expression when all smooth blocks are scalar). Test oracle companion
// to determinant_sigma.
double determinant_sigma_product_form(const BlockCovariance& cov, double delta);

// Lambda = Sigma(1,x,theta)^{-1} by SPD factorization, verified against the
// blockwise closed forms (720 a_S1^{-1}, the -1/2 link, the 12 a_S2^{-1}
// identity and Phi = 0) to relative 1e-10. A violation throws
// InternalConsistencyError since it can only come from a covariance
// construction bug.
Precision precision_closed_form(const BlockCovariance& cov);

// Factorize without the identity checks (hot path).
Precision precision_of(const BlockCovariance& cov);

Residual residual_m(const ModelSpec& model, double delta, const VectorXd& x, const VectorXd& y,
                    const ParamVector& theta);
Residual residual_m(const Dims& dims, double delta, const MeanVector& mu, const VectorXd& y);

// log p(y | x) of the locally Gaussian scheme.
double log_transition_density(const ModelSpec& model, double delta, const VectorXd& x, const VectorXd& y,
                              const ParamVector& theta);

}  // namespace hyposde
