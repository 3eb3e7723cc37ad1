#pragma once

#include <string>
#include <vector>

#include "hyposde/kalman.hpp"
#include "hyposde/model.hpp"

namespace hyposde {

// A registered model: the SDE spec with closed-form generator terms, the true
// parameter preset, the conditionally Gaussian coefficients for the filter,
// and defaults used by the experiment drivers.
struct BuiltinModel {
    ModelSpec spec;
    ParamVector theta_true;
    CondGaussCoeffs cond_gauss;
    VectorXd kalman_m0;
    MatrixXd kalman_q0;
    VectorXd x0;
    std::vector<std::string> coord_names;
};

// Registry names: "toy3", "toy2", "qgle_ho", "qgle_dw", "qgle_prony".
BuiltinModel builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

CondGaussSpec make_cond_gauss_spec(const BuiltinModel& model, SchemeVariant variant);

}  // namespace hyposde
