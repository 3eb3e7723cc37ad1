#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hyposde/params.hpp"

namespace hyposde {

// Equi-spaced states on a time grid. Row i of `states` is the state at
// times[i]; the grid step is constant to relative 1e-12.
struct PathSample {
    VectorXd times;
    MatrixXd states;  // (n+1) x N
    std::uint64_t seed = 0;
    std::string scheme_tag;

    long steps() const { return times.size() - 1; }
    double delta() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    void validate_grid() const;
};

// Masked view of a path: the retained coordinates plus the mask metadata.
struct ObservationSet {
    VectorXd times;
    MatrixXd values;        // (n+1) x |mask|
    std::vector<int> mask;  // retained coordinate indices, ascending
    std::uint64_t seed = 0;

    long steps() const { return times.size() - 1; }
    double delta() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    bool is_complete(int n_coords) const { return static_cast<int>(mask.size()) == n_coords; }
};

PathSample subsample(const PathSample& path, long stride);

ObservationSet project_observed(const PathSample& path, const std::vector<int>& mask);

}  // namespace hyposde
