#include "hyposde/lg_density.hpp"

#include <cmath>

#include "hyposde/errors.hpp"

namespace hyposde {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_lg2_applicable(const ModelSpec& model, double delta) {
    if (model.dims.n_s1 < 1)
        throw ConfigError("locally Gaussian two-layer scheme requires n_s1 >= 1");
    if (delta < 0.0) throw ConfigError("delta must be >= 0");
}

}  // namespace

MatrixXd BlockCovariance::scaled(double delta) const {
    const int n1 = dims.n_s1, n2 = dims.n_s2, nr = dims.n_r;
    MatrixXd s = sigma_unit;
    const double d5 = std::pow(delta, 5), d4 = std::pow(delta, 4), d3 = delta * delta * delta,
                 d2 = delta * delta;
    s.topLeftCorner(n1, n1) *= d5;
    s.block(0, n1, n1, n2) *= d4;
    s.block(n1, 0, n2, n1) *= d4;
    s.topRightCorner(n1, nr) *= d3;
    s.bottomLeftCorner(nr, n1) *= d3;
    s.block(n1, n1, n2, n2) *= d3;
    s.block(n1, n1 + n2, n2, nr) *= d2;
    s.block(n1 + n2, n1, nr, n2) *= d2;
    s.bottomRightCorner(nr, nr) *= delta;
    return s;
}

MeanVector mean_lg2(const ModelSpec& model, double delta, const VectorXd& x, const ParamVector& theta) {
    return mean_lg2(model, delta, x, eval_bundle(model, x, theta));
}

MeanVector mean_lg2(const ModelSpec& model, double delta, const VectorXd& x, const DriftBundle& b) {
    check_lg2_applicable(model, delta);
    const Dims& d = model.dims;
    if (x.size() != d.n()) throw ShapeError("mean_lg2: state length != N");
    MeanVector mu;
    mu.delta = delta;
    const double d2 = delta * delta / 2.0, d3 = delta * delta * delta / 6.0;
    mu.mu_s1 = x.head(d.n_s1) + b.v_s1 * delta + b.l_v_s1 * d2 + b.l2_v_s1 * d3;
    mu.mu_s2 = x.segment(d.n_s1, d.n_s2) + b.v_s2 * delta + b.l_v_s2 * d2;
    mu.mu_r = x.tail(d.n_r) + b.v_r * delta;
    return mu;
}

MeanVector mean_lg2_nocorr(const ModelSpec& model, double delta, const VectorXd& x, const DriftBundle& b) {
    check_lg2_applicable(model, delta);
    const Dims& d = model.dims;
    MeanVector mu;
    mu.delta = delta;
    mu.mu_s1 = x.head(d.n_s1) + b.v_s1 * delta;
    mu.mu_s2 = x.segment(d.n_s1, d.n_s2) + b.v_s2 * delta;
    mu.mu_r = x.tail(d.n_r) + b.v_r * delta;
    return mu;
}

BlockCovariance covariance_blocks(const ModelSpec& model, const VectorXd& x, const ParamVector& theta) {
    const Dims& d = model.dims;
    if (x.size() != d.n()) throw ShapeError("covariance_blocks: state length != N");
    BlockCovariance cov;
    cov.dims = d;
    cov.a_r = a_r_matrix(model, x, theta);
    cov.d2 = model.jac_s2_wrt_r(x, theta);
    cov.d1 = model.jac_s1_wrt_s2(x.head(d.n_s()), theta);
    cov.a_s2 = cov.d2 * cov.a_r * cov.d2.transpose();
    cov.a_s1 = cov.d1 * cov.a_s2 * cov.d1.transpose();

    const int n1 = d.n_s1, n2 = d.n_s2, nr = d.n_r;
    MatrixXd s(d.n(), d.n());
    s.topLeftCorner(n1, n1) = cov.a_s1 / 20.0;
    s.block(0, n1, n1, n2) = cov.d1 * cov.a_s2 / 8.0;
    s.topRightCorner(n1, nr) = cov.d1 * cov.d2 * cov.a_r / 6.0;
    s.block(n1, n1, n2, n2) = cov.a_s2 / 3.0;
    s.block(n1, n1 + n2, n2, nr) = cov.d2 * cov.a_r / 2.0;
    s.bottomRightCorner(nr, nr) = cov.a_r;
    s.block(n1, 0, n2, n1) = s.block(0, n1, n1, n2).transpose();
    s.bottomLeftCorner(nr, n1) = s.topRightCorner(n1, nr).transpose();
    s.block(n1 + n2, n1, nr, n2) = s.block(n1, n1 + n2, n2, nr).transpose();
    cov.sigma_unit = std::move(s);
    return cov;
}

namespace {

// Cholesky log-determinant with the library's near-singularity policy: an
// indefinite or nearly singular matrix raises rather than being jittered,
// since jitter would silently bias the diffusion-parameter estimates.
double spd_log_det(const MatrixXd& m, Eigen::LLT<MatrixXd>& llt) {
    llt.compute(m);
    if (llt.info() != Eigen::Success) throw DefinitenessError("covariance is not positive definite");
    double log_det = 0.0;
    const auto& l = llt.matrixLLT();
    double min_diag = l(0, 0);
    for (int i = 0; i < m.rows(); ++i) {
        log_det += 2.0 * std::log(l(i, i));
        min_diag = std::min(min_diag, l(i, i));
    }
    if (min_diag * min_diag < 1e-12 * m.trace())
        throw DefinitenessError("covariance is numerically singular (smallest pivot below 1e-12 * trace)");
    return log_det;
}

}  // namespace

double determinant_sigma(const BlockCovariance& cov, double delta) {
    if (!(delta > 0.0)) throw ConfigError("determinant_sigma: delta must be > 0");
    Eigen::LLT<MatrixXd> llt;
    const double log_det_unit = spd_log_det(cov.sigma_unit, llt);
    return std::exp(log_det_unit + cov.delta_exponent() * std::log(delta));
}

double determinant_sigma_product_form(const BlockCovariance& cov, double delta) {
    const double det_ar = cov.a_r.determinant();
    const double det_as2 = cov.a_s2.determinant();
    const double det_as1 = cov.a_s1.determinant();
    const double unit = det_ar * det_as2 / std::pow(12.0, cov.dims.n_s2) * det_as1 / std::pow(720.0, cov.dims.n_s1);
    return unit * std::pow(delta, cov.delta_exponent());
}

Precision precision_of(const BlockCovariance& cov) {
    Eigen::LLT<MatrixXd> llt;
    Precision p;
    p.log_det = spd_log_det(cov.sigma_unit, llt);
    p.lambda = llt.solve(MatrixXd::Identity(cov.sigma_unit.rows(), cov.sigma_unit.cols()));
    return p;
}

Precision precision_closed_form(const BlockCovariance& cov) {
    Precision p = precision_of(cov);
    const int n1 = cov.dims.n_s1, n2 = cov.dims.n_s2;
    const auto rel_err = [](const MatrixXd& got, const MatrixXd& want) {
        const double scale = std::max(want.norm(), 1e-300);
        return (got - want).norm() / scale;
    };

    const MatrixXd lam_s1s1 = p.lambda.topLeftCorner(n1, n1);
    const MatrixXd lam_s1s2 = p.lambda.block(0, n1, n1, n2);
    const MatrixXd lam_s2s1 = p.lambda.block(n1, 0, n2, n1);
    const MatrixXd lam_s2s2 = p.lambda.block(n1, n1, n2, n2);

    const MatrixXd want_s1s1 = 720.0 * cov.a_s1.inverse();
    if (rel_err(lam_s1s1, want_s1s1) > 1e-10)
        throw InternalConsistencyError("Lambda_S1S1 != 720 a_S1^{-1}: covariance construction bug");

    const MatrixXd want_s1s2 = -0.5 * lam_s1s1 * cov.d1;
    if (rel_err(lam_s1s2, want_s1s2) > 1e-10)
        throw InternalConsistencyError("Lambda_S1S2 != -1/2 Lambda_S1S1 d_{x_S2} V_{S1,0}");

    const MatrixXd want_s2s2 = 12.0 * cov.a_s2.inverse() - 0.5 * lam_s2s1 * cov.d1;
    if (rel_err(lam_s2s2, want_s2s2) > 1e-10)
        throw InternalConsistencyError("Lambda_S2S2 identity violated");

    const MatrixXd phi = lam_s1s1 * cov.d1 + 2.0 * lam_s1s2;
    if (phi.norm() > 1e-10 * std::max(1.0, (lam_s1s1 * cov.d1).norm()))
        throw InternalConsistencyError("Phi(x, theta) != 0");
    return p;
}

Residual residual_m(const Dims& dims, double delta, const MeanVector& mu, const VectorXd& y) {
    if (y.size() != dims.n()) throw ShapeError("residual_m: y length != N");
    Residual r;
    r.m.resize(dims.n());
    const double s1 = std::pow(delta, -2.5), s2 = std::pow(delta, -1.5), sr = std::pow(delta, -0.5);
    r.m.head(dims.n_s1) = (y.head(dims.n_s1) - mu.mu_s1) * s1;
    r.m.segment(dims.n_s1, dims.n_s2) = (y.segment(dims.n_s1, dims.n_s2) - mu.mu_s2) * s2;
    r.m.tail(dims.n_r) = (y.tail(dims.n_r) - mu.mu_r) * sr;
    return r;
}

Residual residual_m(const ModelSpec& model, double delta, const VectorXd& x, const VectorXd& y,
                    const ParamVector& theta) {
    if (!(delta > 0.0)) throw ConfigError("residual_m: delta must be > 0");
    return residual_m(model.dims, delta, mean_lg2(model, delta, x, theta), y);
}

double log_transition_density(const ModelSpec& model, double delta, const VectorXd& x, const VectorXd& y,
                              const ParamVector& theta) {
    if (!(delta > 0.0)) throw ConfigError("log_transition_density: delta must be > 0");
    const BlockCovariance cov = covariance_blocks(model, x, theta);
    const Precision prec = precision_of(cov);
    const Residual r = residual_m(model, delta, x, y, theta);
    const double quad = r.m.dot(prec.lambda * r.m);
    const int n = model.dims.n();
    return -0.5 * (n * std::log(kTwoPi) + cov.delta_exponent() * std::log(delta) + prec.log_det + quad);
}

}  // namespace hyposde
