#include "hyposde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "hyposde/bias.hpp"
#include "hyposde/errors.hpp"
#include "hyposde/hormander.hpp"
#include "hyposde/io.hpp"
#include "hyposde/oracles.hpp"
#include "hyposde/parallel.hpp"

namespace hyposde {

long ExperimentConfig::stride() const {
    if (!(fine_delta > 0.0) || !(delta > 0.0)) throw ConfigError("config: delta and fine_delta must be > 0");
    const double ratio = delta / fine_delta;
    const long s = std::lround(ratio);
    if (s < 1 || std::abs(ratio - static_cast<double>(s)) > 1e-9 * ratio)
        throw ConfigError("config: fine_delta * stride == delta requires an integral ratio");
    return s;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open config '" + file + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("model")) c.model = j["model"].get<std::string>();
    if (j.contains("scheme")) c.scheme = j["scheme"].get<std::string>();
    if (j.contains("theta_true")) c.theta_true = j["theta_true"].get<std::vector<double>>();
    if (j.contains("theta_init")) c.theta_init = j["theta_init"].get<std::vector<double>>();
    if (j.contains("n")) c.n = j["n"].get<long>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("fine_delta")) c.fine_delta = j["fine_delta"].get<double>();
    if (j.contains("burn_in_time")) c.burn_in_time = j["burn_in_time"].get<double>();
    if (j.contains("replications")) c.replications = j["replications"].get<int>();
    if (j.contains("seed")) {
        c.seed = j["seed"].get<std::uint64_t>();
        c.has_seed = true;
    }
    if (j.contains("observed")) c.observed = j["observed"].get<std::vector<std::string>>();
    if (j.contains("optimizer")) c.optimizer = j["optimizer"].get<std::string>();
    if (j.contains("optimizer_budget")) c.optimizer_budget = j["optimizer_budget"].get<long>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    return c;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["scheme"] = scheme;
    j["theta_true"] = theta_true;
    j["theta_init"] = theta_init;
    j["n"] = n;
    j["delta"] = delta;
    j["fine_delta"] = fine_delta;
    j["burn_in_time"] = burn_in_time;
    j["replications"] = replications;
    j["seed"] = seed;
    j["observed"] = observed;
    j["optimizer"] = optimizer;
    j["optimizer_budget"] = optimizer_budget;
    j["out"] = out;
    return j.dump(2) + "\n";
}

OptimizerConfig make_optimizer_config(const std::string& method, long budget) {
    OptimizerConfig cfg;
    cfg.method = opt_method_from_string(method);
    if (budget > 0)
        cfg.budget = budget;
    else
        cfg.budget = cfg.method == OptMethod::NelderMead ? 10000 : 400;
    return cfg;
}

namespace {

ParamVector preset_with(const BuiltinModel& model, const std::vector<double>& values, const char* what) {
    if (values.empty()) return model.theta_true;
    if (static_cast<int>(values.size()) != model.theta_true.size())
        throw ConfigError(std::string(what) + ": expected " + std::to_string(model.theta_true.size()) +
                          " parameter values");
    VectorXd v(model.theta_true.size());
    for (int i = 0; i < v.size(); ++i) v[i] = values[static_cast<std::size_t>(i)];
    return model.theta_true.with_values(v);
}

}  // namespace

PathSample generate_data(const BuiltinModel& model, const ExperimentConfig& config, std::uint64_t replicate_index) {
    if (!config.has_seed) throw ConfigError("generate_data: seed is mandatory");
    if (config.replications < 1) throw ConfigError("generate_data: replications must be >= 1");
    const ParamVector theta = preset_with(model, config.theta_true, "theta_true");
    const long stride = config.stride();
    const long burn_steps = std::lround(config.burn_in_time / config.fine_delta);
    SimulateOptions opts;
    opts.rng_stream = replicate_index;
    return simulate_subsampled(model.spec, theta, model.x0, config.fine_delta, config.n, stride, burn_steps,
                               scheme_from_string(config.scheme), config.seed, opts);
}

std::vector<int> mask_from_names(const BuiltinModel& model, const std::vector<std::string>& observed) {
    std::vector<int> mask;
    for (const auto& name : observed) {
        bool found = false;
        for (std::size_t i = 0; i < model.coord_names.size(); ++i) {
            if (model.coord_names[i] == name || "x" + std::to_string(i + 1) == name) {
                mask.push_back(static_cast<int>(i));
                found = true;
                break;
            }
        }
        if (!found) throw LookupError("unknown coordinate '" + name + "' for model " + model.spec.name);
    }
    std::sort(mask.begin(), mask.end());
    mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
    return mask;
}

FitOutput run_fit(const BuiltinModel& model, const ExperimentConfig& config, const PathSample& data) {
    FitOutput out;
    const ParamVector theta0 = preset_with(model, config.theta_init.empty() ? config.theta_true : config.theta_init,
                                           "theta_init");
    const OptimizerConfig opt = make_optimizer_config(config.optimizer, config.optimizer_budget);

    std::vector<int> mask = config.observed.empty()
                                ? std::vector<int>{}
                                : mask_from_names(model, config.observed);
    const int n_coords = model.spec.dims.n();
    const bool complete = mask.empty() || static_cast<int>(mask.size()) == n_coords;

    if (complete) {
        std::vector<int> all(n_coords);
        for (int i = 0; i < n_coords; ++i) all[i] = i;
        const ObservationSet obs = project_observed(data, all);
        out.result = estimate_complete(model.spec, obs, theta0, opt);
        out.standard_errors = asymptotic_precision(model.spec, obs, out.result.theta_hat).standard_errors;
        out.regime = "complete";
        return out;
    }

    // Partial observations: only the top smooth block is supported.
    std::vector<int> top(model.spec.dims.n_s1);
    for (int i = 0; i < model.spec.dims.n_s1; ++i) top[i] = i;
    if (mask != top)
        throw ConfigError("partial fits support only the top smooth block (e.g. --observed q)");
    const ObservationSet obs = project_observed(data, mask);
    const CondGaussSpec spec = make_cond_gauss_spec(model, scheme_variant_from_string(
                                                               config.scheme == "lg2_nocorr" ? "lg2_nocorr" : "lg2"));
    out.result = estimate_partial(spec, obs, theta0, opt);
    out.regime = "partial";
    return out;
}

namespace {

struct TableSpec {
    std::string model;
    long n = 0;
    double delta = 0.0;
    double burn_in_time = 0.0;
    std::vector<double> theta_init;
    std::string optimizer = "nelder_mead";
    long budget = 0;
    bool complete_and_partial = false;  // table2 runs both regimes
};

TableSpec table_spec(const std::string& table) {
    TableSpec t;
    if (table == "table1_set1") {
        t = {"toy3", 500000, 1e-3, 0.0, {}, "nelder_mead", 0, false};
    } else if (table == "table1_set2") {
        t = {"toy3", 2000000, 5e-4, 0.0, {}, "nelder_mead", 0, false};
    } else if (table == "table1_set3") {
        t = {"toy3", 10000000, 1e-3, 0.0, {}, "nelder_mead", 0, false};
    } else if (table == "table2_ho") {
        t = {"qgle_ho", 200000, 1e-3, 0.0, {2.0, 2.0, 2.0, 2.0}, "adam", 0, true};
    } else if (table == "table2_dw") {
        t = {"qgle_dw", 200000, 1e-3, 0.0, {3.0, 3.0, 3.0, 3.0}, "adam", 0, true};
    } else if (table == "prony") {
        t = {"qgle_prony", 200000, 1e-3, 50.0, {0.1, 0.01, 1.0, 10.0}, "nelder_mead", 0, false};
    } else {
        throw LookupError("unknown table '" + table +
                          "' (available: table1_set1, table1_set2, table1_set3, table2_ho, table2_dw, prony)");
    }
    return t;
}

void summarize(ReplicateOutcome& outcome) {
    std::vector<std::string> variants;
    for (const auto& r : outcome.records)
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) variants.push_back(r.variant);
    for (const auto& v : variants) {
        const VectorXd mean = variant_mean(outcome, v);
        const VectorXd sd = variant_sd(outcome, v);
        int reps = 0;
        for (const auto& r : outcome.records)
            if (r.variant == v) ++reps;
        for (std::size_t p = 0; p < outcome.param_names.size(); ++p) {
            SummaryRow row;
            row.param = outcome.param_names[p];
            row.true_value = outcome.theta_true[static_cast<int>(p)];
            row.mean = mean[static_cast<int>(p)];
            row.se = sd[static_cast<int>(p)];
            row.reps = reps;
            row.variant = v;
            outcome.summary.push_back(row);
        }
    }
}

}  // namespace

ReplicateOutcome run_replicate(const std::string& table, int replications, std::uint64_t seed,
                               const std::optional<OptimizerConfig>& optimizer_override) {
    if (replications < 1) throw ConfigError("replicate: replications must be >= 1");
    const TableSpec spec = table_spec(table);
    const BuiltinModel model = builtin_model(spec.model);

    ExperimentConfig config;
    config.model = spec.model;
    config.n = spec.n;
    config.delta = spec.delta;
    config.fine_delta = 1e-4;
    config.burn_in_time = spec.burn_in_time;
    config.seed = seed;
    config.has_seed = true;
    config.replications = replications;

    OptimizerConfig opt = make_optimizer_config(spec.optimizer, spec.budget);
    if (optimizer_override) opt = *optimizer_override;
    const ParamVector theta0 = preset_with(model, spec.theta_init, "theta_init");

    ReplicateOutcome outcome;
    outcome.table = table;
    outcome.param_names = model.theta_true.names();
    outcome.theta_true = model.theta_true.values();

    std::mutex mu;
    const bool is_table1 = table.rfind("table1", 0) == 0;
    const bool is_prony = table == "prony";

    parallel_for(replications, [&](long rep) {
        const PathSample data = generate_data(model, config, static_cast<std::uint64_t>(rep));
        std::vector<RepRecord> local;

        if (is_table1 || is_prony) {
            const ObservationSet obs = project_observed(data, {0});
            const std::vector<SchemeVariant> variants =
                is_prony ? std::vector<SchemeVariant>{SchemeVariant::LG2}
                         : std::vector<SchemeVariant>{SchemeVariant::LG2, SchemeVariant::LG2_nocorr};
            for (SchemeVariant v : variants) {
                const CondGaussSpec cg = make_cond_gauss_spec(model, v);
                const ContrastResult fit = estimate_partial(cg, obs, theta0, opt);
                local.push_back({static_cast<int>(rep), to_string(v), fit.theta_hat.values(), fit.converged});
            }
        } else {
            std::vector<int> all(model.spec.dims.n());
            for (int i = 0; i < model.spec.dims.n(); ++i) all[i] = i;
            const ObservationSet full = project_observed(data, all);
            const ContrastResult complete = estimate_complete(model.spec, full, theta0, opt);
            local.push_back({static_cast<int>(rep), "lg2_complete", complete.theta_hat.values(),
                             complete.converged});

            const ObservationSet obs = project_observed(data, {0});
            const CondGaussSpec cg = make_cond_gauss_spec(model, SchemeVariant::LG2);
            const ContrastResult partial = estimate_partial(cg, obs, theta0, opt);
            local.push_back({static_cast<int>(rep), "lg2_partial", partial.theta_hat.values(), partial.converged});
        }

        std::lock_guard<std::mutex> lock(mu);
        for (auto& r : local) outcome.records.push_back(std::move(r));
    });

    std::sort(outcome.records.begin(), outcome.records.end(), [](const RepRecord& a, const RepRecord& b) {
        return a.rep != b.rep ? a.rep < b.rep : a.variant < b.variant;
    });
    summarize(outcome);
    return outcome;
}

VectorXd variant_mean(const ReplicateOutcome& outcome, const std::string& variant) {
    VectorXd acc = VectorXd::Zero(outcome.theta_true.size());
    int count = 0;
    for (const auto& r : outcome.records)
        if (r.variant == variant) {
            acc += r.estimate;
            ++count;
        }
    if (count == 0) throw LookupError("no records for variant '" + variant + "'");
    return acc / static_cast<double>(count);
}

VectorXd variant_sd(const ReplicateOutcome& outcome, const std::string& variant) {
    const VectorXd mean = variant_mean(outcome, variant);
    VectorXd acc = VectorXd::Zero(mean.size());
    int count = 0;
    for (const auto& r : outcome.records)
        if (r.variant == variant) {
            acc += (r.estimate - mean).cwiseAbs2();
            ++count;
        }
    if (count < 2) return VectorXd::Zero(mean.size());
    return (acc / static_cast<double>(count - 1)).cwiseSqrt();
}

std::string summary_csv(const ReplicateOutcome& outcome) {
    std::ostringstream os;
    os << "parameter,true_value,mean_estimate,se,replications,variant\n";
    for (const auto& row : outcome.summary)
        os << row.param << "," << format_double(row.true_value) << "," << format_double(row.mean) << ","
           << format_double(row.se) << "," << row.reps << "," << row.variant << "\n";
    return os.str();
}

std::string records_csv(const ReplicateOutcome& outcome) {
    std::ostringstream os;
    os << "rep,variant,converged";
    for (const auto& p : outcome.param_names) os << "," << p;
    os << "\n";
    for (const auto& r : outcome.records) {
        os << r.rep << "," << r.variant << "," << (r.converged ? 1 : 0);
        for (int i = 0; i < r.estimate.size(); ++i) os << "," << format_double(r.estimate[i]);
        os << "\n";
    }
    return os.str();
}

double prony_kernel_rel_error(const VectorXd& beta_hat, const VectorXd& beta_true, double t_lo, double t_hi,
                              int grid) {
    if (beta_hat.size() != 4 || beta_true.size() != 4)
        throw ShapeError("prony_kernel_rel_error: expects (c1, tau1, c2, tau2)");
    VectorXd c_hat(2), tau_hat(2), c_true(2), tau_true(2);
    c_hat << beta_hat[0], beta_hat[2];
    tau_hat << beta_hat[1], beta_hat[3];
    c_true << beta_true[0], beta_true[2];
    tau_true << beta_true[1], beta_true[3];
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double u = static_cast<double>(i) / (grid - 1);
        const double t = t_lo * std::pow(t_hi / t_lo, u);
        const double k_true = memory_kernel_prony(t, c_true, tau_true);
        const double k_hat = memory_kernel_prony(t, c_hat, tau_hat);
        worst = std::max(worst, std::abs(k_hat - k_true) / std::abs(k_true));
    }
    return worst;
}

// --- verify ---------------------------------------------------------------

namespace {

ParamVector jitter_theta(const BuiltinModel& model, const CounterRng& rng, std::uint64_t step) {
    VectorXd v = model.theta_true.values();
    for (int i = 0; i < v.size(); ++i)
        v[i] *= std::exp(0.5 * (rng.uniform(step, static_cast<std::uint32_t>(100 + i)) - 0.5));
    ParamVector theta = model.theta_true.with_values(v);
    theta.clamp();
    return theta;
}

VectorXd random_state(int n, const CounterRng& rng, std::uint64_t step) {
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = 2.0 * rng.normal(step, static_cast<std::uint32_t>(i));
    return x;
}

VerifyCheck check_increment_moments() {
    // Sample covariance of (db, i10, i110) for 1e6 draws at delta = 0.01 vs
    // the closed-form matrix, scaled by Monte-Carlo standard errors.
    const double delta = 0.01;
    const long n = 1000000;
    const CounterRng rng(20240901);
    double s[3][3] = {};
    for (long i = 0; i < n; ++i) {
        const IteratedIncrement inc = sample_increment(delta, 1, rng, static_cast<std::uint64_t>(i));
        const double v[3] = {inc.db[0], inc.i10[0], inc.i110[0]};
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) s[a][b] += v[a] * v[b];
    }
    const double d = delta;
    const double target[3][3] = {{d, d * d / 2, d * d * d / 6},
                                 {0, d * d * d / 3, d * d * d * d / 8},
                                 {0, 0, d * d * d * d * d / 20}};
    // var(XY) = E[X^2 Y^2] - E[XY]^2; for jointly Gaussian pairs
    // E[X^2Y^2] = v_x v_y + 2 c^2.
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            const double mean = s[a][b] / static_cast<double>(n);
            const double va = target[a][a], vb = target[b][b], c = target[a][b];
            const double se = std::sqrt((va * vb + c * c) / static_cast<double>(n));
            worst = std::max(worst, std::abs(mean - c) / (4.0 * se));
        }
    }
    return {"increment moments (|dev| / 4 MC-SE over six entries)", worst, 1.0, worst <= 1.0};
}

VerifyCheck check_determinant() {
    double worst = 0.0;
    const CounterRng rng(77001);
    for (const std::string name : {"toy3", "qgle_ho"}) {
        const BuiltinModel model = builtin_model(name);
        for (int k = 0; k < 100; ++k) {
            const ParamVector theta = jitter_theta(model, rng, 1000 + k);
            const VectorXd x = random_state(model.spec.dims.n(), rng, 2000 + k);
            const double delta = 0.02 + 0.98 * rng.uniform(3000 + k, 7);
            const BlockCovariance cov = covariance_blocks(model.spec, x, theta);
            const double got = determinant_sigma(cov, delta);
            const double want = std::pow(delta, 9) / 8640.0 * cov.a_r.determinant() * cov.a_s1.determinant() *
                                cov.a_s2.determinant();
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
        }
    }
    return {"determinant identity (rel err, toy3 & qgle scalar)", worst, 1e-10, worst <= 1e-10};
}

double lambda_identity_residual(const BlockCovariance& cov) {
    const Precision p = precision_of(cov);
    const int n1 = cov.dims.n_s1, n2 = cov.dims.n_s2;
    const MatrixXd lam_s1s1 = p.lambda.topLeftCorner(n1, n1);
    const MatrixXd lam_s1s2 = p.lambda.block(0, n1, n1, n2);
    const MatrixXd lam_s2s1 = p.lambda.block(n1, 0, n2, n1);
    const MatrixXd lam_s2s2 = p.lambda.block(n1, n1, n2, n2);
    auto rel = [](const MatrixXd& got, const MatrixXd& want) {
        return (got - want).norm() / std::max(want.norm(), 1e-300);
    };
    double r = rel(lam_s1s1, 720.0 * cov.a_s1.inverse());
    r = std::max(r, rel(lam_s1s2, (-0.5 * lam_s1s1 * cov.d1).eval()));
    r = std::max(r, rel(lam_s2s2, (12.0 * cov.a_s2.inverse() - 0.5 * lam_s2s1 * cov.d1).eval()));
    const MatrixXd phi = lam_s1s1 * cov.d1 + 2.0 * lam_s1s2;
    r = std::max(r, phi.norm() / std::max(1.0, (lam_s1s1 * cov.d1).norm()));
    return r;
}

VerifyCheck check_lambda_identities() {
    double worst = 0.0;
    const CounterRng rng(77002);
    for (const auto& name : builtin_model_names()) {
        const BuiltinModel model = builtin_model(name);
        for (int k = 0; k < 100; ++k) {
            const ParamVector theta = jitter_theta(model, rng, 4000 + k);
            const VectorXd x = random_state(model.spec.dims.n(), rng, 5000 + k);
            worst = std::max(worst, lambda_identity_residual(covariance_blocks(model.spec, x, theta)));
        }
    }
    return {"precision closed forms (720 / -1/2 link / 12 / Phi=0)", worst, 1e-10, worst <= 1e-10};
}

VerifyCheck check_kalman_oracle() {
    const BuiltinModel model = builtin_model("toy3");
    const CondGaussSpec spec = make_cond_gauss_spec(model, SchemeVariant::LG2);
    const double delta = 0.1;
    double worst = 0.0;
    for (long n = 1; n <= 10; ++n) {
        const PathSample path =
            simulate(model.spec, model.theta_true, model.x0, delta, n, Scheme::LG2, 900 + n);
        const ObservationSet obs = project_observed(path, {0});
        const double got = marginal_loglik(spec, obs, model.theta_true);
        const double want = oracles::toy3_dense_marginal_loglik(path.states.col(0), delta, 2.0, 4.0, true,
                                                                model.kalman_m0, model.kalman_q0);
        worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
    return {"Kalman marginal vs dense joint-Gaussian oracle (toy3, n=1..10)", worst, 1e-8, worst <= 1e-8};
}

VerifyCheck check_condition_a2_builtins() {
    int deficit = 0;
    const CounterRng rng(77003);
    for (const auto& name : builtin_model_names()) {
        const BuiltinModel model = builtin_model(name);
        for (int k = 0; k < 20; ++k) {
            const VectorXd x = random_state(model.spec.dims.n(), rng, 6000 + k);
            const ConditionA2Report rep = check_condition_a2(model.spec, x, model.theta_true);
            if (!rep.pass) ++deficit;
        }
    }
    return {"span condition holds on built-ins (failing states)", static_cast<double>(deficit), 0.0, deficit == 0};
}

VerifyCheck check_case_study_constants() {
    const auto& cs = CaseStudyConstants::instance();
    double worst = std::abs(cs.c1 - 21.0);
    worst = std::max(worst, std::abs(cs.c2 + 20.0));
    worst = std::max(worst, std::abs(cs.predicted_limit_factor - 1.0 / 21.0));
    worst = std::max(worst, (cs.sigma * cs.sigma_inv - Eigen::Matrix3d::Identity()).norm());
    return {"case-study constants (c1=21, c2=-20, limit 1/21, inverse identity)", worst, 1e-12, worst <= 1e-12};
}

}  // namespace

std::vector<VerifyCheck> run_verify() {
    std::vector<VerifyCheck> checks;
    checks.push_back(check_increment_moments());
    checks.push_back(check_determinant());
    checks.push_back(check_lambda_identities());
    checks.push_back(check_kalman_oracle());
    checks.push_back(check_condition_a2_builtins());
    checks.push_back(check_case_study_constants());
    return checks;
}

}  // namespace hyposde
