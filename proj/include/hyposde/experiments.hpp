#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyposde/builtin_models.hpp"
#include "hyposde/contrast.hpp"
#include "hyposde/kalman.hpp"
#include "hyposde/optimize.hpp"
#include "hyposde/simulate.hpp"

namespace hyposde {

// One experiment run: model/scheme, data-generation grid (fine step +
// subsampling stride), optimizer settings and the observation mask.
struct ExperimentConfig {
    std::string model = "toy3";
    std::string scheme = "lg2";
    std::vector<double> theta_true;  // empty: registry preset
    std::vector<double> theta_init;  // empty: theta_true
    long n = 1000;
    double delta = 1e-3;
    double fine_delta = 1e-4;
    double burn_in_time = 0.0;
    int replications = 1;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::vector<std::string> observed;  // coordinate names; empty = complete observations
    std::string optimizer = "nelder_mead";
    long optimizer_budget = 0;  // 0 = method default
    std::string out;

    long stride() const;  // delta / fine_delta, validated integral
    static ExperimentConfig from_json_file(const std::string& file);
    std::string to_json() const;
};

OptimizerConfig make_optimizer_config(const std::string& method, long budget);

// Data generation per the experiments' protocol: fine locally Gaussian path,
// burn-in discarded, subsampled to the observation grid.
PathSample generate_data(const BuiltinModel& model, const ExperimentConfig& config, std::uint64_t replicate_index);

std::vector<int> mask_from_names(const BuiltinModel& model, const std::vector<std::string>& observed);

// Fit dispatch: complete mask -> contrast estimator, top-block mask -> Kalman
// marginal likelihood.
struct FitOutput {
    ContrastResult result;
    VectorXd standard_errors;  // empty when not applicable (partial fits)
    std::string regime;        // "complete" | "partial"
};
FitOutput run_fit(const BuiltinModel& model, const ExperimentConfig& config, const PathSample& data);

// --- Table replication drivers -------------------------------------------

struct RepRecord {
    int rep = 0;
    std::string variant;  // e.g. "lg2", "lg2_nocorr", "lg2_complete", "lg2_partial"
    VectorXd estimate;
    bool converged = false;
};

struct SummaryRow {
    std::string param;
    double true_value = 0.0;
    double mean = 0.0;
    double se = 0.0;  // sample standard deviation of the estimates
    int reps = 0;
    std::string variant;
};

struct ReplicateOutcome {
    std::string table;
    std::vector<std::string> param_names;
    VectorXd theta_true;
    std::vector<RepRecord> records;
    std::vector<SummaryRow> summary;
};

// table: table1_set1 | table1_set2 | table1_set3 | table2_ho | table2_dw | prony
ReplicateOutcome run_replicate(const std::string& table, int replications, std::uint64_t seed,
                               const std::optional<OptimizerConfig>& optimizer_override = std::nullopt);

std::string summary_csv(const ReplicateOutcome& outcome);
std::string records_csv(const ReplicateOutcome& outcome);

// Mean estimate per parameter for one variant.
VectorXd variant_mean(const ReplicateOutcome& outcome, const std::string& variant);
VectorXd variant_sd(const ReplicateOutcome& outcome, const std::string& variant);

// Max relative absolute error between the Prony kernels at beta_hat and
// beta_true over a log grid on [t_lo, t_hi].
double prony_kernel_rel_error(const VectorXd& beta_hat, const VectorXd& beta_true, double t_lo, double t_hi,
                              int grid = 200);

// --- Identity verification suite ------------------------------------------

struct VerifyCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

std::vector<VerifyCheck> run_verify();

}  // namespace hyposde
