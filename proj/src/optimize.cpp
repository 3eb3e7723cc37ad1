#include "hyposde/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "hyposde/errors.hpp"

namespace hyposde {

OptMethod opt_method_from_string(const std::string& s) {
    if (s == "nelder_mead" || s == "nm") return OptMethod::NelderMead;
    if (s == "adam") return OptMethod::Adam;
    throw LookupError("unknown optimizer '" + s + "' (available: nelder_mead, adam)");
}

namespace {

VectorXd clamped(const ParamVector& proto, const VectorXd& v) {
    VectorXd out = v;
    for (int i = 0; i < out.size(); ++i)
        out[i] = std::min(std::max(out[i], proto.lower()[i]), proto.upper()[i]);
    return out;
}

ContrastResult nelder_mead(const Objective& f, const ParamVector& theta0, const OptimizerConfig& cfg) {
    const int n = theta0.size();
    long evals = 0;
    auto eval = [&](const VectorXd& v) {
        ++evals;
        return f(theta0.with_values(v));
    };

    // Initial simplex: theta0 plus one per-coordinate offset, flipped when the
    // offset would leave the box.
    std::vector<VectorXd> xs;
    std::vector<double> fs;
    xs.push_back(clamped(theta0, theta0.values()));
    for (int k = 0; k < n; ++k) {
        VectorXd v = xs[0];
        const double step = cfg.nm_initial_step * std::max(1.0, std::abs(v[k]));
        if (v[k] + step <= theta0.upper()[k])
            v[k] += step;
        else
            v[k] -= step;
        xs.push_back(clamped(theta0, v));
    }
    for (auto& v : xs) fs.push_back(eval(v));

    auto order = [&]() {
        std::vector<int> idx(xs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        std::vector<VectorXd> x2;
        std::vector<double> f2;
        for (int i : idx) {
            x2.push_back(xs[i]);
            f2.push_back(fs[i]);
        }
        xs = std::move(x2);
        fs = std::move(f2);
    };

    bool converged = false;
    while (evals < cfg.budget) {
        order();
        double diameter = 0.0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            diameter = std::max(diameter, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
        if (diameter < cfg.nm_simplex_tol && fs.back() - fs.front() < cfg.nm_value_tol) {
            converged = true;
            break;
        }

        VectorXd centroid = VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) centroid += xs[i];
        centroid /= static_cast<double>(n);

        const VectorXd xr = clamped(theta0, centroid + cfg.nm_reflection * (centroid - xs.back()));
        const double fr = eval(xr);
        if (fr < fs[0]) {
            const VectorXd xe = clamped(theta0, centroid + cfg.nm_expansion * (centroid - xs.back()));
            const double fe = eval(xe);
            if (fe < fr) {
                xs.back() = xe;
                fs.back() = fe;
            } else {
                xs.back() = xr;
                fs.back() = fr;
            }
        } else if (fr < fs[fs.size() - 2]) {
            xs.back() = xr;
            fs.back() = fr;
        } else {
            const bool outside = fr < fs.back();
            const VectorXd base = outside ? xr : xs.back();
            const VectorXd xc = clamped(theta0, centroid + cfg.nm_contraction * (base - centroid));
            const double fc = eval(xc);
            if (fc < std::min(fr, fs.back())) {
                xs.back() = xc;
                fs.back() = fc;
            } else {
                for (std::size_t i = 1; i < xs.size(); ++i) {
                    xs[i] = clamped(theta0, xs[0] + cfg.nm_shrink * (xs[i] - xs[0]));
                    fs[i] = eval(xs[i]);
                }
            }
        }
    }
    order();

    ContrastResult res;
    res.theta_hat = theta0.with_values(xs[0]);
    res.contrast_value = fs[0];
    res.iterations = evals;
    res.converged = converged;
    res.optimizer_tag = "nelder_mead";
    return res;
}

ContrastResult adam(const Objective& f, const ParamVector& theta0, const OptimizerConfig& cfg) {
    const int n = theta0.size();
    VectorXd x = clamped(theta0, theta0.values());
    VectorXd m = VectorXd::Zero(n), v = VectorXd::Zero(n);

    VectorXd best_x = x;
    double best_f = f(theta0.with_values(x));
    bool converged = false;
    long t = 0;
    std::deque<VectorXd> window;
    window.push_back(x);

    for (t = 1; t <= cfg.budget; ++t) {
        const VectorXd g = fd_gradient(f, theta0.with_values(x), cfg.fd_step_rel);
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
        const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
        for (int i = 0; i < n; ++i) {
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            x[i] -= cfg.adam_step * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
        x = clamped(theta0, x);

        const double fx = f(theta0.with_values(x));
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }

        window.push_back(x);
        if (static_cast<long>(window.size()) > 20) {
            window.pop_front();
            if ((window.back() - window.front()).cwiseAbs().maxCoeff() < cfg.adam_plateau_tol) {
                converged = true;
                break;
            }
        }
    }

    ContrastResult res;
    res.theta_hat = theta0.with_values(best_x);
    res.contrast_value = best_f;
    res.iterations = std::min(t, cfg.budget);
    res.converged = converged;
    res.optimizer_tag = "adam";
    return res;
}

}  // namespace

VectorXd fd_gradient(const Objective& f, const ParamVector& theta, double step_rel) {
    const int n = theta.size();
    VectorXd g(n);
    double f0 = 0.0;
    bool have_f0 = false;  // computed lazily if a one-sided difference is needed
    VectorXd v = theta.values();
    for (int i = 0; i < n; ++i) {
        const double h = step_rel * std::max(1.0, std::abs(v[i]));
        const double saved = v[i];
        v[i] = saved + h;
        const double fp = f(theta.with_values(v));
        v[i] = saved - h;
        const double fm = f(theta.with_values(v));
        v[i] = saved;
        if (fp < kInfiniteContrast && fm < kInfiniteContrast) {
            g[i] = (fp - fm) / (2.0 * h);
        } else if (fp < kInfiniteContrast || fm < kInfiniteContrast) {
            if (!have_f0) {
                f0 = f(theta);
                have_f0 = true;
            }
            g[i] = fp < kInfiniteContrast ? (fp - f0) / h : (f0 - fm) / h;
        } else {
            g[i] = 0.0;
        }
    }
    return g;
}

ContrastResult minimize(const Objective& objective, const ParamVector& theta0, const OptimizerConfig& config) {
    if (!theta0.inside_bounds()) throw ConfigError("minimize: theta0 outside bounds");
    if (theta0.size() == 0) throw ConfigError("minimize: empty parameter vector");
    return config.method == OptMethod::NelderMead ? nelder_mead(objective, theta0, config)
                                                  : adam(objective, theta0, config);
}

}  // namespace hyposde
