#include "hyposde/contrast.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "hyposde/errors.hpp"
#include "hyposde/parallel.hpp"

namespace hyposde {

namespace {

// Fixed chunking so the reduction order (and hence the rounding) does not
// depend on the number of workers.
constexpr long kChunks = 64;

struct ContrastTerms {
    double value = 0.0;
    bool infeasible = false;
};

ContrastTerms contrast_range(const ModelSpec& model, const ObservationSet& data, const ParamVector& theta,
                             long begin, long end, const Precision* cached) {
    ContrastTerms out;
    const Dims& dims = model.dims;
    const int n1 = dims.n_s1, n2 = dims.n_s2, nr = dims.n_r;
    const double delta = data.delta();
    const double d2 = delta * delta / 2.0, d3 = delta * delta * delta / 6.0;
    const double s1 = std::pow(delta, -2.5), s2 = std::pow(delta, -1.5), sr = std::pow(delta, -0.5);
    VectorXd x(dims.n()), m(dims.n()), lm(dims.n());
    for (long i = begin; i < end; ++i) {
        x = data.values.row(i).transpose();
        try {
            const Precision* prec = cached;
            Precision local;
            if (!cached) {
                local = precision_of(covariance_blocks(model, x, theta));
                prec = &local;
            }
            const DriftBundle b = eval_bundle(model, x, theta);
            const auto y = data.values.row(i + 1);
            m.head(n1) = (y.head(n1).transpose() - x.head(n1) - b.v_s1 * delta - b.l_v_s1 * d2 - b.l2_v_s1 * d3) * s1;
            m.segment(n1, n2) =
                (y.segment(n1, n2).transpose() - x.segment(n1, n2) - b.v_s2 * delta - b.l_v_s2 * d2) * s2;
            m.tail(nr) = (y.tail(nr).transpose() - x.tail(nr) - b.v_r * delta) * sr;
            lm.noalias() = prec->lambda * m;
            out.value += m.dot(lm) + prec->log_det;
        } catch (const DefinitenessError&) {
            out.infeasible = true;
            return out;
        } catch (const NumericError&) {
            out.infeasible = true;
            return out;
        }
    }
    return out;
}

}  // namespace

double contrast(const ModelSpec& model, const ObservationSet& data, const ParamVector& theta) {
    const Dims& dims = model.dims;
    if (!data.is_complete(dims.n())) throw ConfigError("contrast: requires complete observations");
    const long n = data.steps();
    if (n < 1) throw ConfigError("contrast: need at least one transition");
    if (!(data.delta() > 0.0)) throw ConfigError("contrast: non-positive step");

    // For state-independent diffusion the unit covariance is shared by every
    // transition; factorize once.
    Precision cached;
    const Precision* cached_ptr = nullptr;
    if (model.constant_covariance) {
        try {
            cached = precision_of(covariance_blocks(model, data.values.row(0).transpose(), theta));
            cached_ptr = &cached;
        } catch (const DefinitenessError&) {
            return kInfiniteContrast;
        }
    }

    const int workers = static_cast<int>(std::min<long>(effective_worker_count(), kChunks));
    std::vector<ContrastTerms> partial(kChunks);
    if (workers <= 1 || n < 4096) {
        const ContrastTerms t = contrast_range(model, data, theta, 0, n, cached_ptr);
        return t.infeasible ? kInfiniteContrast : t.value;
    }

    std::atomic<long> next_chunk{0};
    const long chunk_len = (n + kChunks - 1) / kChunks;
    auto work = [&]() {
        for (;;) {
            const long c = next_chunk.fetch_add(1);
            if (c >= kChunks) return;
            const long begin = c * chunk_len;
            const long end = std::min(n, begin + chunk_len);
            if (begin >= end) continue;
            partial[c] = contrast_range(model, data, theta, begin, end, cached_ptr);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    double total = 0.0;
    for (const auto& t : partial) {
        if (t.infeasible) return kInfiniteContrast;
        total += t.value;
    }
    return total;
}

ContrastResult estimate_complete(const ModelSpec& model, const ObservationSet& data, const ParamVector& theta0,
                                 const OptimizerConfig& config) {
    if (data.times.size() == 0) throw ConfigError("estimate_complete: empty data");
    auto objective = [&](const ParamVector& theta) { return contrast(model, data, theta); };
    return minimize(objective, theta0, config);
}

namespace {

// Central FD derivative of a drift block with respect to one parameter entry.
VectorXd d_drift_d_param(const std::function<VectorXd(const ParamVector&)>& drift, const ParamVector& theta,
                         int flat_index) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta[flat_index]));
    ParamVector tp = theta, tm = theta;
    tp[flat_index] += h;
    tm[flat_index] -= h;
    return (drift(tp) - drift(tm)) / (2.0 * h);
}

MatrixXd robust_inverse(const MatrixXd& m, bool& pinv_used) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
        double min_diag = llt.matrixLLT()(0, 0);
        for (int i = 0; i < m.rows(); ++i) min_diag = std::min(min_diag, llt.matrixLLT()(i, i));
        if (min_diag * min_diag > 1e-12 * std::max(m.trace(), 1e-300))
            return llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
    }
    pinv_used = true;
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    VectorXd inv_sv = VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-12 * sv[0]) inv_sv[i] = 1.0 / sv[i];
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

PrecisionMatrix asymptotic_precision(const ModelSpec& model, const ObservationSet& data,
                                     const ParamVector& theta_hat) {
    const Dims& dims = model.dims;
    if (!data.is_complete(dims.n())) throw ConfigError("asymptotic_precision: requires complete observations");
    const long n = data.steps();
    const double delta = data.delta();
    const auto& sizes = theta_hat.block_sizes();
    const int off_s1 = 0, off_s2 = sizes[0], off_r = sizes[0] + sizes[1], off_sig = sizes[0] + sizes[1] + sizes[2];

    PrecisionMatrix out;
    for (int b = 0; b < 4; ++b) out.gamma_blocks[b] = MatrixXd::Zero(sizes[b], sizes[b]);

    // Convergence rates per block: sqrt(n/delta^3), sqrt(n/delta), sqrt(n delta), sqrt(n).
    out.rate_vector.resize(theta_hat.size());
    const double nd = static_cast<double>(n);
    for (int i = 0; i < sizes[0]; ++i) out.rate_vector[off_s1 + i] = std::sqrt(nd / (delta * delta * delta));
    for (int i = 0; i < sizes[1]; ++i) out.rate_vector[off_s2 + i] = std::sqrt(nd / delta);
    for (int i = 0; i < sizes[2]; ++i) out.rate_vector[off_r + i] = std::sqrt(nd * delta);
    for (int i = 0; i < sizes[3]; ++i) out.rate_vector[off_sig + i] = std::sqrt(nd);

    const bool const_cov = model.constant_covariance;
    BlockCovariance cov0;
    MatrixXd a_s1_inv, a_s2_inv, a_r_inv, lambda0;
    std::vector<MatrixXd> dsigma0(sizes[3]);
    bool dummy = false;

    auto sigma_unit_at = [&](const VectorXd& x, const ParamVector& th) {
        return covariance_blocks(model, x, th).sigma_unit;
    };

    for (long i = 0; i < n; ++i) {
        const VectorXd x = data.values.row(i).transpose();
        const VectorXd xs = x.head(dims.n_s());

        BlockCovariance cov;
        if (!const_cov || i == 0) {
            cov = covariance_blocks(model, x, theta_hat);
            a_s1_inv = robust_inverse(cov.a_s1, dummy);
            a_s2_inv = robust_inverse(cov.a_s2, dummy);
            a_r_inv = robust_inverse(cov.a_r, dummy);
            lambda0 = robust_inverse(cov.sigma_unit, dummy);
            for (int k = 0; k < sizes[3]; ++k) {
                const int flat = off_sig + k;
                const double h = 1e-5 * std::max(1.0, std::abs(theta_hat[flat]));
                ParamVector tp = theta_hat, tm = theta_hat;
                tp[flat] += h;
                tm[flat] -= h;
                dsigma0[k] = (sigma_unit_at(x, tp) - sigma_unit_at(x, tm)) / (2.0 * h);
            }
            if (const_cov) cov0 = cov;
        }

        // beta_S1 block: 720 * dV^T a_S1^{-1} dV
        for (int a = 0; a < sizes[0]; ++a) {
            const VectorXd da = d_drift_d_param(
                [&](const ParamVector& th) { return model.drift_s1(xs, th); }, theta_hat, off_s1 + a);
            for (int b = a; b < sizes[0]; ++b) {
                const VectorXd db = d_drift_d_param(
                    [&](const ParamVector& th) { return model.drift_s1(xs, th); }, theta_hat, off_s1 + b);
                const double v = 720.0 * da.dot(a_s1_inv * db);
                out.gamma_blocks[0](a, b) += v;
                if (a != b) out.gamma_blocks[0](b, a) += v;
            }
        }
        // beta_S2 block: 12 * dV^T a_S2^{-1} dV
        for (int a = 0; a < sizes[1]; ++a) {
            const VectorXd da = d_drift_d_param(
                [&](const ParamVector& th) { return model.drift_s2(x, th); }, theta_hat, off_s2 + a);
            for (int b = a; b < sizes[1]; ++b) {
                const VectorXd db = d_drift_d_param(
                    [&](const ParamVector& th) { return model.drift_s2(x, th); }, theta_hat, off_s2 + b);
                const double v = 12.0 * da.dot(a_s2_inv * db);
                out.gamma_blocks[1](a, b) += v;
                if (a != b) out.gamma_blocks[1](b, a) += v;
            }
        }
        // beta_R block: dV^T a_R^{-1} dV
        for (int a = 0; a < sizes[2]; ++a) {
            const VectorXd da = d_drift_d_param(
                [&](const ParamVector& th) { return model.drift_r(x, th); }, theta_hat, off_r + a);
            for (int b = a; b < sizes[2]; ++b) {
                const VectorXd db = d_drift_d_param(
                    [&](const ParamVector& th) { return model.drift_r(x, th); }, theta_hat, off_r + b);
                const double v = da.dot(a_r_inv * db);
                out.gamma_blocks[2](a, b) += v;
                if (a != b) out.gamma_blocks[2](b, a) += v;
            }
        }
        // sigma block: 1/2 tr(dSigma Lambda dSigma Lambda) on the unit covariance
        for (int a = 0; a < sizes[3]; ++a) {
            const MatrixXd pa = dsigma0[a] * lambda0;
            for (int b = a; b < sizes[3]; ++b) {
                const MatrixXd pb = dsigma0[b] * lambda0;
                const double v = 0.5 * (pa * pb).trace();
                out.gamma_blocks[3](a, b) += v;
                if (a != b) out.gamma_blocks[3](b, a) += v;
            }
        }
    }
    for (int b = 0; b < 4; ++b) out.gamma_blocks[b] /= static_cast<double>(n);

    out.standard_errors.resize(theta_hat.size());
    out.pinv_used = false;
    const std::array<int, 4> offsets{off_s1, off_s2, off_r, off_sig};
    for (int b = 0; b < 4; ++b) {
        if (sizes[b] == 0) continue;
        const MatrixXd inv = robust_inverse(out.gamma_blocks[b], out.pinv_used);
        for (int k = 0; k < sizes[b]; ++k)
            out.standard_errors[offsets[b] + k] =
                std::sqrt(std::max(inv(k, k), 0.0)) / out.rate_vector[offsets[b] + k];
    }
    return out;
}

}  // namespace hyposde
