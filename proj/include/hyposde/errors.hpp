#pragma once

#include <stdexcept>
#include <string>

namespace hyposde {

// Shape/dimension mismatch between inputs and a model's declared Dims.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values produced by an evaluator or a numerical routine.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Covariance not positive definite where positive definiteness is required.
struct DefinitenessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A simulated state left the sanity box (|entry| > divergence_guard).
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step) : std::runtime_error(what), step_index(step) {}
    long step_index;
};

// Closed-form identity violated beyond tolerance; signals a construction bug.
struct InternalConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LookupError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// CSV/JSON input violated the expected schema.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long row = -1) : std::runtime_error(what), row_index(row) {}
    long row_index;
};

}  // namespace hyposde
