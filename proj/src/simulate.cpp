#include "hyposde/simulate.hpp"

#include <cmath>

#include "hyposde/errors.hpp"
#include "hyposde/lg_density.hpp"

namespace hyposde {

Scheme scheme_from_string(const std::string& s) {
    if (s == "em") return Scheme::EM;
    if (s == "lg1") return Scheme::LG1;
    if (s == "lg2") return Scheme::LG2;
    if (s == "lg2_nocorr") return Scheme::LG2_nocorr;
    throw LookupError("unknown scheme '" + s + "' (available: em, lg1, lg2, lg2_nocorr)");
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::EM: return "em";
        case Scheme::LG1: return "lg1";
        case Scheme::LG2: return "lg2";
        case Scheme::LG2_nocorr: return "lg2_nocorr";
    }
    return "?";
}

IteratedIncrement sample_increment(double delta, int d, const CounterRng& rng, std::uint64_t step) {
    if (!(delta > 0.0)) throw ConfigError("sample_increment: delta must be > 0");
    if (d < 1) throw ConfigError("sample_increment: Brownian dimension must be >= 1");
    static const double inv_2s3 = 1.0 / (2.0 * std::sqrt(3.0));
    static const double inv_4s3 = 1.0 / (4.0 * std::sqrt(3.0));
    static const double inv_12s5 = 1.0 / (12.0 * std::sqrt(5.0));
    IteratedIncrement inc;
    inc.delta = delta;
    inc.db.resize(d);
    inc.i10.resize(d);
    inc.i110.resize(d);
    const double s1 = std::sqrt(delta);
    const double s3 = s1 * delta;
    const double s5 = s3 * delta;
    for (int j = 0; j < d; ++j) {
        const auto z = rng.normals3(step, static_cast<std::uint32_t>(j));
        inc.db[j] = s1 * z[0];
        inc.i10[j] = s3 * (0.5 * z[0] + inv_2s3 * z[1]);
        inc.i110[j] = s5 * (z[0] / 6.0 + inv_4s3 * z[1] + inv_12s5 * z[2]);
    }
    return inc;
}

namespace {

struct Stepper {
    const ModelSpec& model;
    const ParamVector& theta;
    Scheme scheme;
    double delta;
    double guard;

    void advance(VectorXd& x, const IteratedIncrement& inc, long step_index) const {
        const Dims& d = model.dims;
        VectorXd next(d.n());
        switch (scheme) {
            case Scheme::EM: {
                next = x + eval_drift(model, x, theta) * delta;
                for (int j = 0; j < d.d; ++j)
                    next.tail(d.n_r) += model.diff_r(x, theta, j) * inc.db[j];
                break;
            }
            case Scheme::LG1: {
                const DriftBundle b = eval_bundle(model, x, theta);
                const double d2 = delta * delta / 2.0;
                next.head(d.n_s1) = x.head(d.n_s1) + b.v_s1 * delta + b.l_v_s1 * d2;
                next.segment(d.n_s1, d.n_s2) = x.segment(d.n_s1, d.n_s2) + b.v_s2 * delta + b.l_v_s2 * d2;
                next.tail(d.n_r) = x.tail(d.n_r) + b.v_r * delta;
                const MatrixXd jac2 = model.jac_s2_wrt_r(x, theta);
                for (int j = 0; j < d.d; ++j) {
                    const VectorXd vj = model.diff_r(x, theta, j);
                    next.segment(d.n_s1, d.n_s2) += (jac2 * vj) * inc.i10[j];
                    next.tail(d.n_r) += vj * inc.db[j];
                }
                break;
            }
            case Scheme::LG2:
            case Scheme::LG2_nocorr: {
                const DriftBundle b = eval_bundle(model, x, theta);
                const MeanVector mu = scheme == Scheme::LG2 ? mean_lg2(model, delta, x, b)
                                                            : mean_lg2_nocorr(model, delta, x, b);
                next.head(d.n_s1) = mu.mu_s1;
                next.segment(d.n_s1, d.n_s2) = mu.mu_s2;
                next.tail(d.n_r) = mu.mu_r;
                const MatrixXd jac2 = model.jac_s2_wrt_r(x, theta);
                const MatrixXd jac1 = model.jac_s1_wrt_s2(x.head(d.n_s()), theta);
                const MatrixXd jac12 = jac1 * jac2;
                for (int j = 0; j < d.d; ++j) {
                    const VectorXd vj = model.diff_r(x, theta, j);
                    next.head(d.n_s1) += (jac12 * vj) * inc.i110[j];
                    next.segment(d.n_s1, d.n_s2) += (jac2 * vj) * inc.i10[j];
                    next.tail(d.n_r) += vj * inc.db[j];
                }
                break;
            }
        }
        if (!next.allFinite() || next.cwiseAbs().maxCoeff() > guard)
            throw DivergenceError("simulation diverged", step_index);
        x = std::move(next);
    }
};

void check_scheme_compat(const ModelSpec& model, Scheme scheme) {
    if ((scheme == Scheme::LG2 || scheme == Scheme::LG2_nocorr) && model.dims.n_s1 < 1)
        throw ConfigError("LG2-type schemes require n_s1 >= 1");
}

}  // namespace

PathSample simulate(const ModelSpec& model, const ParamVector& theta, const VectorXd& x0, double delta, long n,
                    Scheme scheme, std::uint64_t seed, const SimulateOptions& opts) {
    if (!(delta > 0.0)) throw ConfigError("simulate: delta must be > 0");
    if (n < 0) throw ConfigError("simulate: negative step count");
    if (x0.size() != model.dims.n()) throw ShapeError("simulate: x0 length != N");
    check_scheme_compat(model, scheme);

    const CounterRng rng(seed, opts.rng_stream);
    Stepper stepper{model, theta, scheme, delta, opts.divergence_guard};

    PathSample out;
    out.seed = seed;
    out.scheme_tag = to_string(scheme);
    out.times.resize(n + 1);
    out.states.resize(n + 1, model.dims.n());
    VectorXd x = x0;
    out.times[0] = 0.0;
    out.states.row(0) = x;
    for (long i = 0; i < n; ++i) {
        const IteratedIncrement inc = sample_increment(delta, model.dims.d, rng, opts.step_offset + i);
        stepper.advance(x, inc, i);
        out.times[i + 1] = (i + 1) * delta;
        out.states.row(i + 1) = x;
    }
    return out;
}

PathSample simulate_subsampled(const ModelSpec& model, const ParamVector& theta, const VectorXd& x0,
                               double fine_delta, long n_coarse, long stride, long burn_in_steps, Scheme scheme,
                               std::uint64_t seed, const SimulateOptions& opts) {
    if (!(fine_delta > 0.0)) throw ConfigError("simulate_subsampled: fine_delta must be > 0");
    if (stride < 1) throw ConfigError("simulate_subsampled: stride must be >= 1");
    if (n_coarse < 0 || burn_in_steps < 0) throw ConfigError("simulate_subsampled: negative step count");
    if (x0.size() != model.dims.n()) throw ShapeError("simulate_subsampled: x0 length != N");
    check_scheme_compat(model, scheme);

    const CounterRng rng(seed, opts.rng_stream);
    Stepper stepper{model, theta, scheme, fine_delta, opts.divergence_guard};
    const double coarse_delta = fine_delta * stride;

    PathSample out;
    out.seed = seed;
    out.scheme_tag = to_string(scheme);
    out.times.resize(n_coarse + 1);
    out.states.resize(n_coarse + 1, model.dims.n());

    VectorXd x = x0;
    for (long i = 0; i < burn_in_steps; ++i) {
        const IteratedIncrement inc = sample_increment(fine_delta, model.dims.d, rng, opts.step_offset + i);
        stepper.advance(x, inc, i);
    }
    out.times[0] = 0.0;
    out.states.row(0) = x;
    for (long k = 0; k < n_coarse; ++k) {
        for (long s = 0; s < stride; ++s) {
            const long i = burn_in_steps + k * stride + s;
            const IteratedIncrement inc = sample_increment(fine_delta, model.dims.d, rng, opts.step_offset + i);
            stepper.advance(x, inc, i);
        }
        out.times[k + 1] = (k + 1) * coarse_delta;
        out.states.row(k + 1) = x;
    }
    return out;
}

}  // namespace hyposde
