#pragma once

#include "hyposde/model.hpp"
#include "hyposde/path.hpp"
#include "hyposde/rng.hpp"

namespace hyposde {

enum class Scheme { EM, LG1, LG2, LG2_nocorr };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

// Joint draw of the Brownian increment and its first and second
// time-integrals over one step, per Brownian coordinate.
struct IteratedIncrement {
    VectorXd db;    // B_{t+delta} - B_t
    VectorXd i10;   // int int dB dv
    VectorXd i110;  // int int int dB dv du
    double delta = 0.0;
};

// Exact joint sampling via the linear map of three i.i.d. standard normals:
//   db   = sqrt(d)   * z1
//   i10  = sqrt(d^3) * (z1/2 + z2/(2 sqrt 3))
//   i110 = sqrt(d^5) * (z1/6 + z2/(4 sqrt 3) + z3/(12 sqrt 5))
IteratedIncrement sample_increment(double delta, int d, const CounterRng& rng, std::uint64_t step);

struct SimulateOptions {
    double divergence_guard = 1e12;
    std::uint64_t rng_stream = 0;
    std::uint64_t step_offset = 0;  // counter offset, for continuing a path
};

PathSample simulate(const ModelSpec& model, const ParamVector& theta, const VectorXd& x0, double delta, long n,
                    Scheme scheme, std::uint64_t seed, const SimulateOptions& opts = {});

// Fine-step simulation that keeps only every stride-th state after discarding
// burn_in_steps; realizes the generate-fine-then-subsample data protocol
// without materializing the fine path.
PathSample simulate_subsampled(const ModelSpec& model, const ParamVector& theta, const VectorXd& x0,
                               double fine_delta, long n_coarse, long stride, long burn_in_steps, Scheme scheme,
                               std::uint64_t seed, const SimulateOptions& opts = {});

}  // namespace hyposde
