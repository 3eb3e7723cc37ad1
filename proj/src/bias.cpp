#include "hyposde/bias.hpp"

#include <cmath>

#include "hyposde/errors.hpp"

namespace hyposde {

const CaseStudyConstants& CaseStudyConstants::instance() {
    static const CaseStudyConstants c = [] {
        CaseStudyConstants out;
        out.sigma << 1.0 / 20, 1.0 / 8, 1.0 / 6, 1.0 / 8, 1.0 / 3, 1.0 / 2, 1.0 / 6, 1.0 / 2, 1.0;
        Eigen::LLT<Eigen::Matrix3d> llt(out.sigma);
        out.sigma_inv = llt.solve(Eigen::Matrix3d::Identity());
        const auto& l = out.sigma_inv;
        out.c1 = 0.5 * l(2, 1) + l(2, 2) + 0.25 * l(1, 1) + 0.5 * l(1, 2);
        out.c2 = l(2, 0) / 6.0 + l(1, 0) / 12.0;
        out.predicted_limit_factor = 1.0 + out.c2 / out.c1;
        return out;
    }();
    return c;
}

double estimator_incorrect_drift(const MatrixXd& states, double delta) {
    if (states.cols() != 3) throw ShapeError("estimator_incorrect_drift: expects (q, p, s) columns");
    const long n = states.rows() - 1;
    if (n < 1) throw ConfigError("estimator_incorrect_drift: need at least one transition");
    if (!(delta > 0.0)) throw ConfigError("estimator_incorrect_drift: delta must be > 0");

    const auto& cs = CaseStudyConstants::instance();
    const auto& l = cs.sigma_inv;
    const double s5 = std::sqrt(std::pow(delta, 5)), s3 = std::sqrt(std::pow(delta, 3)), s1 = std::sqrt(delta);

    double sum_s2 = 0.0, g_sum = 0.0;
    for (long i = 1; i <= n; ++i) {
        const double q0 = states(i - 1, 0), p0 = states(i - 1, 1), s0 = states(i - 1, 2);
        const double q1 = states(i, 0), p1 = states(i, 1), s1v = states(i, 2);
        sum_s2 += s0 * s0;
        const double a = (q1 - q0 - p0 * delta - s0 * delta * delta / 2.0) / s5;
        const double b = (p1 - p0 - s0 * delta) / s3;
        const double c = (s1v - s0) / s1;
        g_sum += s0 * (l(2, 0) * a + l(2, 1) * b + l(2, 2) * c + 0.5 * l(1, 0) * a + 0.5 * l(1, 1) * b +
                       0.5 * l(1, 2) * c);
    }
    const double f_n = cs.c1 * sum_s2 / static_cast<double>(n);
    if (std::abs(f_n) < 1e-300) throw NumericError("estimator_incorrect_drift: degenerate data (all s near zero)");
    const double g_n = -g_sum / (static_cast<double>(n) * std::sqrt(delta));
    return g_n / f_n;
}

double estimator_incorrect_drift(const PathSample& path) {
    return estimator_incorrect_drift(path.states, path.delta());
}

double estimator_finite_difference_sigma(const VectorXd& q, const VectorXd& s, double delta) {
    if (q.size() != s.size() + 1)
        throw ConfigError("estimator_finite_difference_sigma: q must be one entry longer than s");
    const long n = s.size() - 1;
    if (n < 1) throw ConfigError("estimator_finite_difference_sigma: need at least one transition");
    if (!(delta > 0.0)) throw ConfigError("estimator_finite_difference_sigma: delta must be > 0");

    // Inverse of the two-block constant covariance [[1/3,1/2],[1/2,1]].
    static const double l11 = 12.0, l12 = -6.0, l22 = 4.0;
    const double s3 = std::sqrt(std::pow(delta, 3)), s1 = std::sqrt(delta);

    double acc = 0.0;
    double p_prev = (q[1] - q[0]) / delta;
    for (long i = 1; i <= n; ++i) {
        const double p_cur = (q[i + 1] - q[i]) / delta;
        const double m1 = (p_cur - p_prev - s[i - 1] * delta + s[i - 1] * delta * delta / 2.0) / s3;
        const double m2 = (s[i] - s[i - 1] + s[i - 1] * delta) / s1;
        acc += l11 * m1 * m1 + 2.0 * l12 * m1 * m2 + l22 * m2 * m2;
        p_prev = p_cur;
    }
    return acc / (2.0 * static_cast<double>(n));
}

double estimator_finite_difference_sigma(const PathSample& path) {
    if (path.states.cols() != 3) throw ShapeError("estimator_finite_difference_sigma: expects (q, p, s) columns");
    const long rows = path.states.rows();
    if (rows < 3) throw ConfigError("estimator_finite_difference_sigma: path too short");
    return estimator_finite_difference_sigma(path.states.col(0), path.states.col(2).head(rows - 1),
                                             path.delta());
}

}  // namespace hyposde
