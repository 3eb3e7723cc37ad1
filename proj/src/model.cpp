#include "hyposde/model.hpp"

#include <cmath>
#include <limits>

#include "hyposde/errors.hpp"

namespace hyposde {

namespace {

void require_finite(const VectorXd& v, const char* block) {
    if (!v.allFinite()) throw NumericError(std::string("non-finite drift output in block ") + block);
}

VectorXd x_s_part(const Dims& dims, const VectorXd& x) { return x.head(dims.n_s()); }

}  // namespace

namespace fd {

double step_for(double xi) {
    static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    return h0 * std::max(1.0, std::abs(xi));
}

MatrixXd jacobian(const std::function<VectorXd(const VectorXd&)>& f, const VectorXd& x, int out_dim) {
    const int n = static_cast<int>(x.size());
    MatrixXd jac(out_dim, n);
    VectorXd xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        const double h = step_for(x[i]);
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const double two_h = xp[i] - xm[i];
        if (two_h == 0.0) throw NumericError("finite-difference step underflow");
        jac.col(i) = (f(xp) - f(xm)) / two_h;
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return jac;
}

}  // namespace fd

VectorXd eval_drift(const ModelSpec& model, const VectorXd& x, const ParamVector& theta) {
    const Dims& d = model.dims;
    if (x.size() != d.n()) throw ShapeError("eval_drift: state length != N");
    VectorXd out(d.n());
    const VectorXd xs = x_s_part(d, x);
    VectorXd v = model.drift_s1(xs, theta);
    if (v.size() != d.n_s1) throw ShapeError("drift_s1 output length != N_S1");
    require_finite(v, "S1");
    out.head(d.n_s1) = v;
    v = model.drift_s2(x, theta);
    if (v.size() != d.n_s2) throw ShapeError("drift_s2 output length != N_S2");
    require_finite(v, "S2");
    out.segment(d.n_s1, d.n_s2) = v;
    v = model.drift_r(x, theta);
    if (v.size() != d.n_r) throw ShapeError("drift_r output length != N_R");
    require_finite(v, "R");
    out.tail(d.n_r) = v;
    return out;
}

VectorXd eval_diffusion_column(const ModelSpec& model, const VectorXd& x, const ParamVector& theta, int j) {
    const Dims& d = model.dims;
    if (j < 0 || j >= d.d) throw ShapeError("diffusion column index out of range");
    VectorXd out = VectorXd::Zero(d.n());
    VectorXd v = model.diff_r(x, theta, j);
    if (v.size() != d.n_r) throw ShapeError("diff_r output length != N_R");
    require_finite(v, "R diffusion");
    out.tail(d.n_r) = v;
    return out;
}

namespace {

// L phi = sum_i V_0^i d_i phi + 1/2 sum_k sum_{i1,i2} V_k^{i1} V_k^{i2} d^2_{i1 i2} phi.
// The diffusion columns vanish outside the rough block, so the second-order
// part runs over the trailing n_r coordinates only.
VectorXd generator_fd(const ModelSpec& model, const std::function<VectorXd(const VectorXd&)>& phi, int phi_dim,
                      const VectorXd& x, const ParamVector& theta) {
    const Dims& dims = model.dims;
    const VectorXd v0 = eval_drift(model, x, theta);
    const MatrixXd jac = fd::jacobian(phi, x, phi_dim);
    VectorXd out = jac * v0;

    const int r0 = dims.n_s();
    const VectorXd phi_x = phi(x);
    for (int a = 0; a < dims.n_r; ++a) {
        for (int b = a; b < dims.n_r; ++b) {
            const int ia = r0 + a, ib = r0 + b;
            VectorXd hess_ab(phi_dim);
            if (a == b) {
                const double h = fd::step_for(x[ia]);
                VectorXd xp = x, xm = x;
                xp[ia] += h;
                xm[ia] -= h;
                hess_ab = (phi(xp) - 2.0 * phi_x + phi(xm)) / (h * h);
            } else {
                const double ha = fd::step_for(x[ia]);
                const double hb = fd::step_for(x[ib]);
                VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[ia] += ha; xpp[ib] += hb;
                xpm[ia] += ha; xpm[ib] -= hb;
                xmp[ia] -= ha; xmp[ib] += hb;
                xmm[ia] -= ha; xmm[ib] -= hb;
                hess_ab = (phi(xpp) - phi(xpm) - phi(xmp) + phi(xmm)) / (4.0 * ha * hb);
            }
            double coeff = 0.0;
            for (int k = 0; k < dims.d; ++k) {
                const VectorXd vk = model.diff_r(x, theta, k);
                coeff += vk[a] * vk[b];
            }
            out += (a == b ? 0.5 : 1.0) * coeff * hess_ab;
        }
    }
    if (!out.allFinite()) throw NumericError("generator finite-difference produced non-finite values");
    return out;
}

}  // namespace

VectorXd apply_generator(const ModelSpec& model, GeneratorTarget target, const VectorXd& x, const ParamVector& theta) {
    const Dims& dims = model.dims;
    if (x.size() != dims.n()) throw ShapeError("apply_generator: state length != N");
    if (target == GeneratorTarget::v_s1_0) {
        if (model.gen_l_s1) return model.gen_l_s1(x, theta);
        // V_{S1,0} is independent of x_R, so only the first-order part acts.
        auto phi = [&](const VectorXd& y) { return model.drift_s1(x_s_part(dims, y), theta); };
        const MatrixXd jac = fd::jacobian(phi, x, dims.n_s1);
        return jac * eval_drift(model, x, theta);
    }
    if (model.gen_l_s2) return model.gen_l_s2(x, theta);
    auto phi = [&](const VectorXd& y) { return model.drift_s2(y, theta); };
    return generator_fd(model, phi, dims.n_s2, x, theta);
}

VectorXd apply_generator_squared_s1(const ModelSpec& model, const VectorXd& x, const ParamVector& theta) {
    const Dims& dims = model.dims;
    if (x.size() != dims.n()) throw ShapeError("apply_generator_squared_s1: state length != N");
    if (model.gen_l2_s1) return model.gen_l2_s1(x, theta);
    auto phi = [&](const VectorXd& y) { return apply_generator(model, GeneratorTarget::v_s1_0, y, theta); };
    return generator_fd(model, phi, dims.n_s1, x, theta);
}

DriftBundle eval_bundle(const ModelSpec& model, const VectorXd& x, const ParamVector& theta) {
    DriftBundle b;
    b.v_s1 = model.drift_s1(x_s_part(model.dims, x), theta);
    b.v_s2 = model.drift_s2(x, theta);
    b.v_r = model.drift_r(x, theta);
    b.l_v_s1 = apply_generator(model, GeneratorTarget::v_s1_0, x, theta);
    b.l_v_s2 = apply_generator(model, GeneratorTarget::v_s2_0, x, theta);
    b.l2_v_s1 = apply_generator_squared_s1(model, x, theta);
    return b;
}

MatrixXd a_r_matrix(const ModelSpec& model, const VectorXd& x, const ParamVector& theta) {
    MatrixXd a = MatrixXd::Zero(model.dims.n_r, model.dims.n_r);
    for (int k = 0; k < model.dims.d; ++k) {
        const VectorXd v = model.diff_r(x, theta, k);
        a.noalias() += v * v.transpose();
    }
    return a;
}

MatrixXd a_s2_matrix(const ModelSpec& model, const VectorXd& x, const ParamVector& theta, const MatrixXd& a_r) {
    const MatrixXd j = model.jac_s2_wrt_r(x, theta);
    if (j.rows() != model.dims.n_s2 || j.cols() != model.dims.n_r)
        throw ShapeError("jac_s2_wrt_r has wrong shape");
    return j * a_r * j.transpose();
}

MatrixXd a_s1_matrix(const ModelSpec& model, const VectorXd& x, const ParamVector& theta, const MatrixXd& a_s2) {
    const MatrixXd j = model.jac_s1_wrt_s2(x_s_part(model.dims, x), theta);
    if (j.rows() != model.dims.n_s1 || j.cols() != model.dims.n_s2)
        throw ShapeError("jac_s1_wrt_s2 has wrong shape");
    return j * a_s2 * j.transpose();
}

double memory_kernel_prony(double t, const VectorXd& c, const VectorXd& tau) {
    if (t < 0.0) throw ConfigError("memory_kernel_prony: t must be >= 0");
    if (c.size() != tau.size()) throw ShapeError("memory_kernel_prony: c and tau length mismatch");
    double k = 0.0;
    for (int l = 0; l < c.size(); ++l) {
        if (!(tau[l] > 0.0)) throw ConfigError("memory_kernel_prony: tau entries must be positive");
        k += c[l] / tau[l] * std::exp(-t / tau[l]);
    }
    return k;
}

}  // namespace hyposde
