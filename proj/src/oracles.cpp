#include "hyposde/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "hyposde/errors.hpp"

namespace hyposde::oracles {

LinearToy3Step toy3_lg2_step(double delta, double beta, double sigma, bool corrected) {
    LinearToy3Step out;
    const double d = delta;
    out.transition.resize(3, 3);
    if (corrected) {
        out.transition << 1.0, d, d * d / 2.0 - beta * d * d * d / 6.0,
                          0.0, 1.0, d - beta * d * d / 2.0,
                          0.0, 0.0, 1.0 - beta * d;
    } else {
        out.transition << 1.0, d, 0.0,
                          0.0, 1.0, d,
                          0.0, 0.0, 1.0 - beta * d;
    }
    MatrixXd c(3, 3);
    c << 1.0 / 20, 1.0 / 8, 1.0 / 6,
         1.0 / 8, 1.0 / 3, 1.0 / 2,
         1.0 / 6, 1.0 / 2, 1.0;
    const double d5 = std::pow(d, 5), d4 = std::pow(d, 4), d3 = d * d * d, d2 = d * d;
    MatrixXd scale(3, 3);
    scale << d5, d4, d3,
             d4, d3, d2,
             d3, d2, d;
    out.noise_cov = sigma * sigma * c.cwiseProduct(scale);
    return out;
}

double toy3_dense_marginal_loglik(const VectorXd& q, double delta, double beta, double sigma, bool corrected,
                                  const VectorXd& m0, const MatrixXd& q0) {
    const long n = q.size() - 1;
    if (n < 1) throw ConfigError("toy3_dense_marginal_loglik: need at least two observations");
    const LinearToy3Step step = toy3_lg2_step(delta, beta, sigma, corrected);
    const MatrixXd& t = step.transition;

    // x_i as an affine map of u = (h_0, w_1, ..., w_n):
    //   x_{i+1} = T x_i + w_{i+1},  x_0 = (q_0, h_0).
    const long nu = 2 + 3 * n;
    VectorXd mean_u = VectorXd::Zero(nu);
    mean_u.head(2) = m0;
    MatrixXd cov_u = MatrixXd::Zero(nu, nu);
    cov_u.topLeftCorner(2, 2) = q0;
    for (long i = 0; i < n; ++i) cov_u.block(2 + 3 * i, 2 + 3 * i, 3, 3) = step.noise_cov;

    MatrixXd lin = MatrixXd::Zero(3 * n, nu);   // stacked (x_1..x_n) rows
    VectorXd offset = VectorXd::Zero(3 * n);
    // x_1 = T (q_0, h_0) + w_1
    offset.head(3) = t.col(0) * q[0];
    lin.block(0, 0, 3, 2) = t.rightCols(2);
    lin.block(0, 2, 3, 3) = MatrixXd::Identity(3, 3);
    for (long i = 1; i < n; ++i) {
        offset.segment(3 * i, 3) = t * offset.segment(3 * (i - 1), 3);
        lin.middleRows(3 * i, 3) = t * lin.middleRows(3 * (i - 1), 3);
        lin.block(3 * i, 2 + 3 * i, 3, 3) += MatrixXd::Identity(3, 3);
    }

    const VectorXd mean_x = offset + lin * mean_u;
    const MatrixXd cov_x = lin * cov_u * lin.transpose();

    // Select the q rows (coordinate 0 of each x_i).
    VectorXd mu_q(n);
    MatrixXd cov_q(n, n);
    for (long i = 0; i < n; ++i) {
        mu_q[i] = mean_x[3 * i];
        for (long j = 0; j < n; ++j) cov_q(i, j) = cov_x(3 * i, 3 * j);
    }

    Eigen::LLT<MatrixXd> llt(cov_q);
    if (llt.info() != Eigen::Success) throw DefinitenessError("oracle: dense q-covariance not PD");
    double log_det = 0.0;
    for (long i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
    const VectorXd resid = q.tail(n) - mu_q;
    const double quad = resid.dot(llt.solve(resid));
    return -0.5 * (n * std::log(2.0 * M_PI) + log_det + quad);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_threshold_alpha01(std::size_t n, std::size_t m) {
    const double c = 1.628;  // c(alpha) for alpha = 0.01
    return c * std::sqrt((static_cast<double>(n) + m) / (static_cast<double>(n) * m));
}

}  // namespace hyposde::oracles
