#include "hyposde/hormander.hpp"

#include <Eigen/SVD>

#include "hyposde/errors.hpp"

namespace hyposde {

namespace {

using Field = std::function<VectorXd(const VectorXd&)>;

// [W, Z](x) = J_Z(x) W(x) - J_W(x) Z(x)
VectorXd lie_bracket(const Field& w, const Field& z, const VectorXd& x, int n) {
    const MatrixXd jz = fd::jacobian(z, x, n);
    const MatrixXd jw = fd::jacobian(w, x, n);
    return jz * w(x) - jw * z(x);
}

int numerical_rank(const MatrixXd& m, double tol) {
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] >= tol * sv[0]) ++rank;
    return rank;
}

}  // namespace

VectorXd stratonovich_drift(const ModelSpec& model, const VectorXd& x, const ParamVector& theta) {
    VectorXd v0 = eval_drift(model, x, theta);
    if (model.constant_diffusion) return v0;
    const int n = model.dims.n();
    for (int k = 0; k < model.dims.d; ++k) {
        Field vk = [&, k](const VectorXd& y) { return eval_diffusion_column(model, y, theta, k); };
        const MatrixXd jk = fd::jacobian(vk, x, n);
        v0 -= 0.5 * (jk * vk(x));
    }
    return v0;
}

ConditionA2Report check_condition_a2(const ModelSpec& model, const VectorXd& x, const ParamVector& theta,
                                     double tol) {
    if (!(tol > 0.0)) throw ConfigError("check_condition_a2: tol must be > 0");
    const Dims& dims = model.dims;
    if (dims.n_s1 < 1) throw ConfigError("check_condition_a2: model is not of the two-smooth-layer class");
    if (x.size() != dims.n()) throw ShapeError("check_condition_a2: state length != N");
    const int n = dims.n(), d = dims.d;

    Field v0_tilde = [&](const VectorXd& y) { return stratonovich_drift(model, y, theta); };

    ConditionA2Report rep;
    rep.basis_r.resize(dims.n_r, d);
    rep.basis_s2r.resize(dims.n_s2 + dims.n_r, 2 * d);
    rep.basis_full.resize(n, 3 * d);

    for (int k = 0; k < d; ++k) {
        Field vk = [&, k](const VectorXd& y) { return eval_diffusion_column(model, y, theta, k); };
        const VectorXd vk_x = vk(x);
        Field bracket1 = [&, k](const VectorXd& y) {
            Field vkk = [&, k](const VectorXd& z) { return eval_diffusion_column(model, z, theta, k); };
            return lie_bracket(v0_tilde, vkk, y, n);
        };
        const VectorXd b1 = bracket1(x);
        const VectorXd b2 = lie_bracket(v0_tilde, bracket1, x, n);

        rep.basis_r.col(k) = vk_x.tail(dims.n_r);
        rep.basis_s2r.col(k) = vk_x.tail(dims.n_s2 + dims.n_r);
        rep.basis_s2r.col(d + k) = b1.tail(dims.n_s2 + dims.n_r);
        rep.basis_full.col(k) = vk_x;
        rep.basis_full.col(d + k) = b1;
        rep.basis_full.col(2 * d + k) = b2;
    }

    rep.rank_r = numerical_rank(rep.basis_r, tol);
    rep.rank_s2r = numerical_rank(rep.basis_s2r, tol);
    rep.rank_full = numerical_rank(rep.basis_full, tol);
    rep.pass = rep.rank_r == dims.n_r && rep.rank_s2r == dims.n_s2 + dims.n_r && rep.rank_full == n;
    return rep;
}

}  // namespace hyposde
