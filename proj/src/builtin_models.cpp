#include "hyposde/builtin_models.hpp"

#include <cmath>

#include "hyposde/errors.hpp"

namespace hyposde {

namespace {

VectorXd vec1(double a) {
    VectorXd v(1);
    v << a;
    return v;
}

MatrixXd mat1(double a) {
    MatrixXd m(1, 1);
    m << a;
    return m;
}

ParamVector make_params(std::array<int, 4> sizes, std::vector<double> values, std::vector<std::string> names,
                        double lo = 1e-3, double hi = 50.0) {
    const int total = sizes[0] + sizes[1] + sizes[2] + sizes[3];
    VectorXd v(total), lower(total), upper(total);
    for (int i = 0; i < total; ++i) {
        v[i] = values[i];
        lower[i] = lo;
        upper[i] = hi;
    }
    return ParamVector(sizes, v, lower, upper, std::move(names));
}

BuiltinModel make_toy3() {
    BuiltinModel m;
    m.spec.name = "toy3";
    m.spec.dims = {1, 1, 1, 1};
    m.spec.constant_diffusion = true;
    m.spec.constant_covariance = true;
    // theta = (beta_R, sigma); the smooth drifts carry no parameters.
    m.theta_true = make_params({0, 0, 1, 1}, {2.0, 4.0}, {"beta", "sigma"});

    m.spec.drift_s1 = [](const VectorXd& xs, const ParamVector&) { return vec1(xs[1]); };
    m.spec.drift_s2 = [](const VectorXd& x, const ParamVector&) { return vec1(x[2]); };
    m.spec.drift_r = [](const VectorXd& x, const ParamVector& th) { return vec1(-th.beta_r()[0] * x[2]); };
    m.spec.diff_r = [](const VectorXd&, const ParamVector& th, int) { return vec1(th.sigma()[0]); };
    m.spec.jac_s1_wrt_s2 = [](const VectorXd&, const ParamVector&) { return mat1(1.0); };
    m.spec.jac_s2_wrt_r = [](const VectorXd&, const ParamVector&) { return mat1(1.0); };
    m.spec.gen_l_s1 = [](const VectorXd& x, const ParamVector&) { return vec1(x[2]); };
    m.spec.gen_l_s2 = [](const VectorXd& x, const ParamVector& th) { return vec1(-th.beta_r()[0] * x[2]); };
    m.spec.gen_l2_s1 = [](const VectorXd& x, const ParamVector& th) { return vec1(-th.beta_r()[0] * x[2]); };

    m.cond_gauss.c1 = [](const ParamVector&) { return mat1(0.0); };
    m.cond_gauss.c1hat = [](const ParamVector&) { return mat1(1.0); };
    m.cond_gauss.f_s2 = [](const VectorXd&, const ParamVector&) { return vec1(0.0); };
    m.cond_gauss.df_s2 = [](const VectorXd&, const ParamVector&) { return mat1(0.0); };
    m.cond_gauss.c2 = [](const ParamVector&) {
        MatrixXd c(1, 2);
        c << 0.0, 1.0;
        return c;
    };
    m.cond_gauss.f_r = [](const VectorXd&, const ParamVector&) { return vec1(0.0); };
    m.cond_gauss.cr = [](const ParamVector& th) {
        MatrixXd c(1, 2);
        c << 0.0, -th.beta_r()[0];
        return c;
    };

    m.kalman_m0 = VectorXd::Zero(2);
    m.kalman_q0 = 10.0 * MatrixXd::Identity(2, 2);
    m.x0 = VectorXd::Zero(3);
    m.coord_names = {"q", "p", "s"};
    return m;
}

BuiltinModel make_toy2() {
    BuiltinModel m;
    m.spec.name = "toy2";
    m.spec.dims = {1, 1, 1, 1};
    m.spec.constant_diffusion = true;
    m.spec.constant_covariance = true;
    // Drift parameter fixed to 1; theta = (sigma).
    m.theta_true = make_params({0, 0, 0, 1}, {1.0}, {"sigma"});

    m.spec.drift_s1 = [](const VectorXd& xs, const ParamVector&) { return vec1(xs[1]); };
    m.spec.drift_s2 = [](const VectorXd& x, const ParamVector&) { return vec1(x[2]); };
    m.spec.drift_r = [](const VectorXd& x, const ParamVector&) { return vec1(-x[2]); };
    m.spec.diff_r = [](const VectorXd&, const ParamVector& th, int) { return vec1(th.sigma()[0]); };
    m.spec.jac_s1_wrt_s2 = [](const VectorXd&, const ParamVector&) { return mat1(1.0); };
    m.spec.jac_s2_wrt_r = [](const VectorXd&, const ParamVector&) { return mat1(1.0); };
    m.spec.gen_l_s1 = [](const VectorXd& x, const ParamVector&) { return vec1(x[2]); };
    m.spec.gen_l_s2 = [](const VectorXd& x, const ParamVector&) { return vec1(-x[2]); };
    m.spec.gen_l2_s1 = [](const VectorXd& x, const ParamVector&) { return vec1(-x[2]); };

    m.cond_gauss.c1 = [](const ParamVector&) { return mat1(0.0); };
    m.cond_gauss.c1hat = [](const ParamVector&) { return mat1(1.0); };
    m.cond_gauss.f_s2 = [](const VectorXd&, const ParamVector&) { return vec1(0.0); };
    m.cond_gauss.df_s2 = [](const VectorXd&, const ParamVector&) { return mat1(0.0); };
    m.cond_gauss.c2 = [](const ParamVector&) {
        MatrixXd c(1, 2);
        c << 0.0, 1.0;
        return c;
    };
    m.cond_gauss.f_r = [](const VectorXd&, const ParamVector&) { return vec1(0.0); };
    m.cond_gauss.cr = [](const ParamVector&) {
        MatrixXd c(1, 2);
        c << 0.0, -1.0;
        return c;
    };

    m.kalman_m0 = VectorXd::Zero(2);
    m.kalman_q0 = 10.0 * MatrixXd::Identity(2, 2);
    m.x0 = VectorXd::Zero(3);
    m.coord_names = {"q", "p", "s"};
    return m;
}

// Scalar-extended-state QGLE with potential U; harmonic or uneven double well.
BuiltinModel make_qgle(bool double_well) {
    BuiltinModel m;
    m.spec.name = double_well ? "qgle_dw" : "qgle_ho";
    m.spec.dims = {1, 1, 1, 1};
    m.spec.constant_diffusion = true;
    m.spec.constant_covariance = true;
    // theta = (D, lambda | alpha | sigma)
    const double sigma_true = double_well ? 4.0 : 1.0;
    m.theta_true = make_params({0, 2, 1, 1}, {1.0, 2.0, 4.0, sigma_true}, {"D", "lambda", "alpha", "sigma"});

    auto du = [double_well](double q, double d_pot) {
        return double_well ? d_pot * q + 2.0 * std::cos(0.25 + 2.0 * q) : d_pot * q;
    };
    auto ddu = [double_well](double q, double d_pot) {
        return double_well ? d_pot - 4.0 * std::sin(0.25 + 2.0 * q) : d_pot;
    };

    m.spec.drift_s1 = [](const VectorXd& xs, const ParamVector&) { return vec1(xs[1]); };
    m.spec.drift_s2 = [du](const VectorXd& x, const ParamVector& th) {
        return vec1(-du(x[0], th.beta_s2()[0]) + th.beta_s2()[1] * x[2]);
    };
    m.spec.drift_r = [](const VectorXd& x, const ParamVector& th) {
        return vec1(-th.beta_s2()[1] * x[1] - th.beta_r()[0] * x[2]);
    };
    m.spec.diff_r = [](const VectorXd&, const ParamVector& th, int) { return vec1(th.sigma()[0]); };
    m.spec.jac_s1_wrt_s2 = [](const VectorXd&, const ParamVector&) { return mat1(1.0); };
    m.spec.jac_s2_wrt_r = [](const VectorXd&, const ParamVector& th) { return mat1(th.beta_s2()[1]); };
    m.spec.gen_l_s1 = [du](const VectorXd& x, const ParamVector& th) {
        return vec1(-du(x[0], th.beta_s2()[0]) + th.beta_s2()[1] * x[2]);
    };
    m.spec.gen_l_s2 = [ddu](const VectorXd& x, const ParamVector& th) {
        const double lambda = th.beta_s2()[1], alpha = th.beta_r()[0];
        return vec1(-(ddu(x[0], th.beta_s2()[0]) + lambda * lambda) * x[1] - lambda * alpha * x[2]);
    };
    m.spec.gen_l2_s1 = m.spec.gen_l_s2;

    m.cond_gauss.c1 = [](const ParamVector&) { return mat1(0.0); };
    m.cond_gauss.c1hat = [](const ParamVector&) { return mat1(1.0); };
    m.cond_gauss.f_s2 = [du](const VectorXd& q, const ParamVector& th) {
        return vec1(-du(q[0], th.beta_s2()[0]));
    };
    m.cond_gauss.df_s2 = [ddu](const VectorXd& q, const ParamVector& th) {
        return mat1(-ddu(q[0], th.beta_s2()[0]));
    };
    m.cond_gauss.c2 = [](const ParamVector& th) {
        MatrixXd c(1, 2);
        c << 0.0, th.beta_s2()[1];
        return c;
    };
    m.cond_gauss.f_r = [](const VectorXd&, const ParamVector&) { return vec1(0.0); };
    m.cond_gauss.cr = [](const ParamVector& th) {
        MatrixXd c(1, 2);
        c << -th.beta_s2()[1], -th.beta_r()[0];
        return c;
    };

    m.kalman_m0 = VectorXd::Zero(2);
    m.kalman_q0 = MatrixXd::Identity(2, 2);
    m.kalman_q0(0, 0) = 10.0;  // broad momentum prior; s_0 ~ N(0, 1)
    m.x0 = VectorXd::Zero(3);
    m.coord_names = {"q", "p", "s"};
    return m;
}

// GLE with a two-term Prony memory kernel; free-energy constants and inverse
// temperature fixed to the experiment values.
BuiltinModel make_qgle_prony() {
    constexpr double kQmin = 0.30, kQmax = 0.90, kA = 1200.0, kB = 0.001;
    constexpr double kBetaInv = 2.949;

    auto du = [](double q) {
        return 2.0 * kA * (q - kQmin) * (q - kQmax) * (2.0 * q - kQmin - kQmax) + 3.0 * kB * q * q;
    };
    auto ddu = [](double q) {
        return 2.0 * kA *
                   ((q - kQmax) * (2.0 * q - kQmin - kQmax) + (q - kQmin) * (2.0 * q - kQmin - kQmax) +
                    2.0 * (q - kQmin) * (q - kQmax)) +
               6.0 * kB * q;
    };

    BuiltinModel m;
    m.spec.name = "qgle_prony";
    m.spec.dims = {1, 1, 2, 2};
    m.spec.constant_diffusion = true;
    m.spec.constant_covariance = true;
    // theta = (c1, tau1, c2, tau2), all in the rough-drift block; they also
    // parameterize the diffusion through the fluctuation-dissipation relation.
    m.theta_true = make_params({0, 0, 4, 0}, {0.22, 0.007, 1.2, 4.6}, {"c1", "tau1", "c2", "tau2"}, 1e-4, 100.0);

    m.spec.drift_s1 = [](const VectorXd& xs, const ParamVector&) { return vec1(xs[1]); };
    m.spec.drift_s2 = [du](const VectorXd& x, const ParamVector&) { return vec1(-du(x[0]) + x[2] + x[3]); };
    m.spec.drift_r = [](const VectorXd& x, const ParamVector& th) {
        const auto b = th.beta_r();
        VectorXd v(2);
        v << -b[0] / b[1] * x[1] - x[2] / b[1], -b[2] / b[3] * x[1] - x[3] / b[3];
        return v;
    };
    m.spec.diff_r = [](const VectorXd&, const ParamVector& th, int j) {
        const auto b = th.beta_r();
        VectorXd v = VectorXd::Zero(2);
        const double c = b[2 * j], tau = b[2 * j + 1];
        v[j] = std::sqrt(2.0 * kBetaInv * c) / tau;
        return v;
    };
    m.spec.jac_s1_wrt_s2 = [](const VectorXd&, const ParamVector&) { return mat1(1.0); };
    m.spec.jac_s2_wrt_r = [](const VectorXd&, const ParamVector&) {
        MatrixXd j(1, 2);
        j << 1.0, 1.0;
        return j;
    };
    m.spec.gen_l_s1 = m.spec.drift_s2;
    m.spec.gen_l_s2 = [ddu](const VectorXd& x, const ParamVector& th) {
        const auto b = th.beta_r();
        const double friction = b[0] / b[1] + b[2] / b[3];
        return vec1(-(ddu(x[0]) + friction) * x[1] - x[2] / b[1] - x[3] / b[3]);
    };
    m.spec.gen_l2_s1 = m.spec.gen_l_s2;

    m.cond_gauss.c1 = [](const ParamVector&) { return mat1(0.0); };
    m.cond_gauss.c1hat = [](const ParamVector&) { return mat1(1.0); };
    m.cond_gauss.f_s2 = [du](const VectorXd& q, const ParamVector&) { return vec1(-du(q[0])); };
    m.cond_gauss.df_s2 = [ddu](const VectorXd& q, const ParamVector&) { return mat1(-ddu(q[0])); };
    m.cond_gauss.c2 = [](const ParamVector&) {
        MatrixXd c(1, 3);
        c << 0.0, 1.0, 1.0;
        return c;
    };
    m.cond_gauss.f_r = [](const VectorXd&, const ParamVector&) { return VectorXd::Zero(2).eval(); };
    m.cond_gauss.cr = [](const ParamVector& th) {
        const auto b = th.beta_r();
        MatrixXd c(2, 3);
        c << -b[0] / b[1], -1.0 / b[1], 0.0, -b[2] / b[3], 0.0, -1.0 / b[3];
        return c;
    };

    m.kalman_m0 = VectorXd::Zero(3);
    m.kalman_q0 = MatrixXd::Identity(3, 3) * kBetaInv;
    m.kalman_q0(0, 0) = 10.0;  // momentum prior broad; s_l ~ N(0, beta^{-1})
    m.x0 = VectorXd::Zero(4);
    m.x0[0] = kQmin;
    m.coord_names = {"q", "p", "s1", "s2"};
    return m;
}

}  // namespace

BuiltinModel builtin_model(const std::string& name) {
    if (name == "toy3") return make_toy3();
    if (name == "toy2") return make_toy2();
    if (name == "qgle_ho") return make_qgle(false);
    if (name == "qgle_dw") return make_qgle(true);
    if (name == "qgle_prony") return make_qgle_prony();
    std::string msg = "unknown model '" + name + "'; available:";
    for (const auto& n : builtin_model_names()) msg += " " + n;
    throw LookupError(msg);
}

std::vector<std::string> builtin_model_names() { return {"toy3", "toy2", "qgle_ho", "qgle_dw", "qgle_prony"}; }

CondGaussSpec make_cond_gauss_spec(const BuiltinModel& model, SchemeVariant variant) {
    CondGaussSpec spec;
    spec.base = model.spec;
    spec.coeffs = model.cond_gauss;
    spec.variant = variant;
    spec.m0 = model.kalman_m0;
    spec.q0 = model.kalman_q0;
    return spec;
}

}  // namespace hyposde
