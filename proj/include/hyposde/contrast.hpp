#pragma once

#include <array>

#include "hyposde/lg_density.hpp"
#include "hyposde/model.hpp"
#include "hyposde/optimize.hpp"
#include "hyposde/path.hpp"

namespace hyposde {

// Contrast over complete observations:
//   sum_i m_i^T Lambda(X_{i-1}, theta) m_i + log |Sigma(X_{i-1}, theta)|
// with unit-step covariance and delta-scaled residuals. Returns the
// infinite-contrast sentinel when any transition covariance fails positive
// definiteness.
double contrast(const ModelSpec& model, const ObservationSet& data, const ParamVector& theta);

ContrastResult estimate_complete(const ModelSpec& model, const ObservationSet& data, const ParamVector& theta0,
                                 const OptimizerConfig& config);

// Plug-in estimate of the asymptotic precision matrix: the invariant-measure
// integrals are replaced by empirical averages over the observed states, and
// parameter derivatives of the drift blocks by central finite differences.
struct PrecisionMatrix {
    std::array<MatrixXd, 4> gamma_blocks;  // beta_s1, beta_s2, beta_r, sigma
    VectorXd rate_vector;                  // per-parameter CLT rates
    VectorXd standard_errors;              // sqrt([Gamma_block^{-1}]_kk) / rate_k
    bool pinv_used = false;                // some block inverted by pseudo-inverse
};

PrecisionMatrix asymptotic_precision(const ModelSpec& model, const ObservationSet& data,
                                     const ParamVector& theta_hat);

}  // namespace hyposde
