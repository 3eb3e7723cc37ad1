#include "hyposde/kalman.hpp"

#include <cmath>

#include "hyposde/errors.hpp"

namespace hyposde {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

SchemeVariant scheme_variant_from_string(const std::string& s) {
    if (s == "lg2") return SchemeVariant::LG2;
    if (s == "lg2_nocorr") return SchemeVariant::LG2_nocorr;
    throw LookupError("unknown scheme variant '" + s + "' (available: lg2, lg2_nocorr)");
}

std::string to_string(SchemeVariant v) { return v == SchemeVariant::LG2 ? "lg2" : "lg2_nocorr"; }

namespace {

VectorXd full_state(const Dims& dims, const VectorXd& x_s1, const VectorXd& h) {
    VectorXd x(dims.n());
    x << x_s1, h;
    return x;
}

// Builds the affine one-step map for a fixed (theta, delta). The
// theta/delta-only matrix products are cached here so that a filter pass only
// evaluates f_s2, df_s2, f_r per step.
class AffineStepBuilder {
  public:
    AffineStepBuilder(const CondGaussSpec& spec, double delta, const ParamVector& theta)
        : spec_(spec), theta_(theta), delta_(delta) {
        const Dims& dims = spec.base.dims;
        n1_ = dims.n_s1;
        n2_ = dims.n_s2;
        nr_ = dims.n_r;
        nh_ = dims.n_hidden();
        analytic_ = spec.coeffs && spec.coeffs->complete();
        if (!analytic_) return;

        const auto& co = *spec.coeffs;
        c1_ = co.c1(theta);
        c1hat_ = co.c1hat(theta);
        c2_ = co.c2(theta);
        cr_ = co.cr(theta);
        if (c1_.rows() != n1_ || c1_.cols() != n1_ || c1hat_.rows() != n1_ || c1hat_.cols() != n2_ ||
            c2_.rows() != n2_ || c2_.cols() != nh_ || cr_.rows() != nr_ || cr_.cols() != nh_)
            throw ShapeError("CondGaussCoeffs: coefficient matrix shape mismatch");

        m_a_ = MatrixXd::Zero(n1_, nh_);
        m_a_.leftCols(n2_) = c1hat_;  // linear part of V_{S1,0} in the hidden block

        ch_.resize(n2_ + nr_, nh_);
        ch_ << c2_, cr_;

        l_vs1_lin_ = c1_ * m_a_ + c1hat_ * c2_;
        k_c2ch_ = c2_ * ch_;
        k_l2_const_lin_ = c1_ * l_vs1_lin_ + c1hat_ * k_c2ch_;

        const double d2 = delta * delta / 2.0, d3 = delta * delta * delta / 6.0;
        corr_ = spec.variant == SchemeVariant::LG2;
        top0_ = delta * m_a_;
        if (corr_) top0_ += d2 * l_vs1_lin_ + d3 * k_l2_const_lin_;
        mid0_ = delta * c2_;
        mid0_.leftCols(n2_) += MatrixXd::Identity(n2_, n2_);
        if (corr_) mid0_ += d2 * k_c2ch_;
        bot_ = delta * cr_;
        bot_.rightCols(nr_) += MatrixXd::Identity(nr_, nr_);
    }

    bool analytic() const { return analytic_; }

    void build(const VectorXd& x_s1, AffineStep& out) const {
        if (analytic_) {
            build_analytic(x_s1, out);
        } else {
            build_probed(x_s1, out);
        }
    }

    VectorXd mean_at(const VectorXd& x_s1, const VectorXd& h) const {
        const VectorXd x = full_state(spec_.base.dims, x_s1, h);
        const DriftBundle b = eval_bundle(spec_.base, x, theta_);
        const MeanVector mu = spec_.variant == SchemeVariant::LG2 ? mean_lg2(spec_.base, delta_, x, b)
                                                                  : mean_lg2_nocorr(spec_.base, delta_, x, b);
        return mu.stacked();
    }

  private:
    void build_analytic(const VectorXd& x_s1, AffineStep& out) const {
        const auto& co = *spec_.coeffs;
        const VectorXd f2 = co.f_s2(x_s1, theta_);
        const MatrixXd df2 = co.df_s2(x_s1, theta_);
        const VectorXd fr = co.f_r(x_s1, theta_);
        const double d2 = delta_ * delta_ / 2.0, d3 = delta_ * delta_ * delta_ / 6.0;

        out.b.resize(n1_ + n2_ + nr_);
        out.a.resize(n1_ + n2_ + nr_, nh_);

        const VectorXd vs1_c = c1_ * x_s1;
        const VectorXd lvs1_c = c1_ * vs1_c + c1hat_ * f2;
        VectorXd vh_c(n2_ + nr_);
        vh_c << f2, fr;
        const VectorXd lvs2_c = df2 * vs1_c + c2_ * vh_c;

        out.b.head(n1_) = x_s1 + delta_ * vs1_c;
        out.a.topRows(n1_) = top0_;
        out.b.segment(n1_, n2_) = delta_ * f2;
        out.a.middleRows(n1_, n2_) = mid0_;
        out.b.tail(nr_) = delta_ * fr;
        out.a.bottomRows(nr_) = bot_;

        if (corr_) {
            const VectorXd l2vs1_c = c1_ * lvs1_c + c1hat_ * lvs2_c;
            out.b.head(n1_) += d2 * lvs1_c + d3 * l2vs1_c;
            out.b.segment(n1_, n2_) += d2 * lvs2_c;

            const MatrixXd df2_ma = df2 * m_a_;  // x-dependent part of the S2 generator row
            out.a.middleRows(n1_, n2_) += d2 * df2_ma;
            out.a.topRows(n1_) += d3 * (c1hat_ * df2_ma);
        }
    }

    void build_probed(const VectorXd& x_s1, AffineStep& out) const {
        out.b = mean_at(x_s1, VectorXd::Zero(nh_));
        out.a.resize(n1_ + n2_ + nr_, nh_);
        for (int j = 0; j < nh_; ++j) out.a.col(j) = mean_at(x_s1, VectorXd::Unit(nh_, j)) - out.b;
    }

    const CondGaussSpec& spec_;
    const ParamVector& theta_;
    double delta_;
    int n1_ = 0, n2_ = 0, nr_ = 0, nh_ = 0;
    bool analytic_ = false, corr_ = true;
    MatrixXd c1_, c1hat_, c2_, cr_, ch_, m_a_;
    MatrixXd l_vs1_lin_, k_c2ch_, k_l2_const_lin_;
    MatrixXd top0_, mid0_, bot_;
};

MatrixXd noise_covariance(const CondGaussSpec& spec, double delta, const VectorXd& x_s1, const ParamVector& theta) {
    const Dims& dims = spec.base.dims;
    return covariance_blocks(spec.base, full_state(dims, x_s1, VectorXd::Zero(dims.n_hidden())), theta)
        .scaled(delta);
}

void probe_spec(const CondGaussSpec& spec, const AffineStepBuilder& builder, const AffineStep& step, double delta,
                const VectorXd& x_s1, const ParamVector& theta) {
    const int nh = spec.base.dims.n_hidden();
    VectorXd h_probe(nh);
    for (int j = 0; j < nh; ++j) h_probe[j] = 0.7 + 0.31 * j;
    const VectorXd direct = builder.mean_at(x_s1, h_probe);
    const VectorXd affine = step.b + step.a * h_probe;
    if ((direct - affine).norm() > 1e-10 * std::max(1.0, direct.norm()))
        throw ShapeError("linearize_step: model is not conditionally Gaussian (mean not affine in hidden block)");
    const MatrixXd sigma_probe =
        covariance_blocks(spec.base, full_state(spec.base.dims, x_s1, h_probe), theta).scaled(delta);
    if ((sigma_probe - step.sigma_w).norm() > 1e-10 * std::max(1.0, step.sigma_w.norm()))
        throw ShapeError("linearize_step: noise covariance depends on the hidden state");
}

}  // namespace

AffineStep linearize_step(const CondGaussSpec& spec, double delta, const VectorXd& x_s1, const ParamVector& theta,
                          bool probe) {
    const Dims& dims = spec.base.dims;
    if (x_s1.size() != dims.n_s1) throw ShapeError("linearize_step: x_s1 length != N_S1");
    if (delta < 0.0) throw ConfigError("linearize_step: delta must be >= 0");

    const AffineStepBuilder builder(spec, delta, theta);
    AffineStep step;
    builder.build(x_s1, step);
    step.sigma_w = delta == 0.0 ? MatrixXd::Zero(dims.n(), dims.n()) : noise_covariance(spec, delta, x_s1, theta);
    if (probe) probe_spec(spec, builder, step, delta, x_s1, theta);
    return step;
}

namespace {

struct FilterWorkspace {
    // Reused across steps to keep the recursion allocation-free.
    VectorXd mu, innovation;
    MatrixXd lambda, gain, joseph_tmp, qa_t;
    Eigen::LLT<MatrixXd> llt{1};
};

// One conditioning step given the affine map; writes the posterior into
// (m, q) and returns the log predictive density of x_s1_next.
double condition_step(const Dims& dims, const AffineStep& step, const VectorXd& x_s1_next, VectorXd& m, MatrixXd& q,
                      FilterWorkspace& ws, long step_index, PredictiveGaussian* predictive) {
    const int n1 = dims.n_s1, nh = dims.n_hidden();

    ws.mu = step.b;
    ws.mu.noalias() += step.a * m;
    ws.qa_t.noalias() = q * step.a.transpose();
    ws.lambda = step.sigma_w;
    ws.lambda.noalias() += step.a * ws.qa_t;

    const auto lam_oo = ws.lambda.topLeftCorner(n1, n1);
    const auto lam_ho = ws.lambda.bottomLeftCorner(nh, n1);
    const auto lam_hh = ws.lambda.bottomRightCorner(nh, nh);

    ws.llt.compute(lam_oo);
    if (ws.llt.info() != Eigen::Success)
        throw DefinitenessError("predictive observed-block covariance not positive definite at step " +
                                std::to_string(step_index));

    double log_det = 0.0;
    for (int i = 0; i < n1; ++i) log_det += 2.0 * std::log(ws.llt.matrixLLT()(i, i));

    ws.innovation = x_s1_next - ws.mu.head(n1);
    const double quad = ws.innovation.dot(ws.llt.solve(ws.innovation));
    const double log_pred = -0.5 * (n1 * std::log(kTwoPi) + log_det + quad);

    // gain K = Lambda_HO Lambda_OO^{-1}
    ws.gain = ws.llt.solve(lam_ho.transpose()).transpose();

    m = ws.mu.tail(nh);
    m.noalias() += ws.gain * ws.innovation;

    // Joseph form: Q = Lambda_HH - K L_OH - L_HO K^T + K L_OO K^T, then symmetrize.
    ws.joseph_tmp.noalias() = ws.gain * lam_ho.transpose();
    q = lam_hh;
    q -= ws.joseph_tmp;
    q -= ws.joseph_tmp.transpose();
    ws.joseph_tmp.noalias() = ws.gain * lam_oo * ws.gain.transpose();
    q += ws.joseph_tmp;
    q = (0.5 * (q + q.transpose())).eval();

    if (predictive) {
        predictive->mean = ws.mu.head(n1);
        predictive->cov = lam_oo;
        predictive->log_density = log_pred;
    }
    return log_pred;
}

void check_obs_is_top_block(const CondGaussSpec& spec, const ObservationSet& obs) {
    const int n1 = spec.base.dims.n_s1;
    if (static_cast<int>(obs.mask.size()) != n1)
        throw ShapeError("partial-observation series must cover exactly the top smooth block");
    for (int j = 0; j < n1; ++j)
        if (obs.mask[j] != j) throw ShapeError("observed coordinates must be the leading smooth ones");
    if (obs.values.cols() != n1) throw ShapeError("observation column count != N_S1");
}

double filter_pass(const CondGaussSpec& spec, const ObservationSet& obs, const ParamVector& theta,
                   FilterTrace* trace) {
    check_obs_is_top_block(spec, obs);
    const Dims& dims = spec.base.dims;
    const long n = obs.steps();
    if (n < 1) throw ConfigError("marginal_loglik: need at least one transition");
    const double delta = obs.delta();
    if (!(delta > 0.0)) throw ConfigError("marginal_loglik: non-positive step");

    VectorXd m = spec.m0;
    MatrixXd q = spec.q0;
    if (m.size() != dims.n_hidden() || q.rows() != dims.n_hidden() || q.cols() != dims.n_hidden())
        throw ShapeError("hidden prior has wrong dimensions");

    const AffineStepBuilder builder(spec, delta, theta);
    AffineStep step;
    VectorXd x_curr = obs.values.row(0).transpose();
    builder.build(x_curr, step);
    step.sigma_w = noise_covariance(spec, delta, x_curr, theta);
    probe_spec(spec, builder, step, delta, x_curr, theta);
    const bool const_sigma = spec.base.constant_covariance;

    FilterWorkspace ws;
    double loglik = 0.0;
    if (trace) {
        trace->states.clear();
        trace->states.reserve(n + 1);
        trace->states.push_back({m, q, 0});
    }

    for (long k = 1; k <= n; ++k) {
        if (k > 1) {
            x_curr = obs.values.row(k - 1).transpose();
            builder.build(x_curr, step);
            if (!const_sigma) step.sigma_w = noise_covariance(spec, delta, x_curr, theta);
        }
        loglik += condition_step(dims, step, obs.values.row(k).transpose(), m, q, ws, k, nullptr);
        if (trace) trace->states.push_back({m, q, k});
    }
    if (trace) trace->loglik = loglik;
    return loglik;
}

}  // namespace

std::pair<FilterState, PredictiveGaussian> kalman_step(const CondGaussSpec& spec, const FilterState& state,
                                                       const VectorXd& x_s1_next, const VectorXd& x_s1_curr,
                                                       double delta, const ParamVector& theta) {
    const Dims& dims = spec.base.dims;
    if (state.m.size() != dims.n_hidden()) throw ShapeError("kalman_step: filter mean has wrong length");
    const AffineStep step = linearize_step(spec, delta, x_s1_curr, theta, false);
    FilterWorkspace ws;
    FilterState next;
    next.m = state.m;
    next.q = state.q;
    next.k = state.k + 1;
    PredictiveGaussian pred;
    condition_step(dims, step, x_s1_next, next.m, next.q, ws, state.k, &pred);
    return {next, pred};
}

double marginal_loglik(const CondGaussSpec& spec, const ObservationSet& obs, const ParamVector& theta) {
    return filter_pass(spec, obs, theta, nullptr);
}

FilterTrace run_filter(const CondGaussSpec& spec, const ObservationSet& obs, const ParamVector& theta) {
    FilterTrace trace;
    filter_pass(spec, obs, theta, &trace);
    return trace;
}

ContrastResult estimate_partial(const CondGaussSpec& spec, const ObservationSet& obs, const ParamVector& theta0,
                                const OptimizerConfig& config) {
    auto objective = [&](const ParamVector& theta) -> double {
        try {
            return -marginal_loglik(spec, obs, theta);
        } catch (const DefinitenessError&) {
            return kInfiniteContrast;
        } catch (const NumericError&) {
            return kInfiniteContrast;
        }
    };
    return minimize(objective, theta0, config);
}

}  // namespace hyposde
