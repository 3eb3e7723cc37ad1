#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "hyposde/errors.hpp"

namespace hyposde {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Coordinate partition of a degenerate SDE state. n_s1 == 0 encodes the
// single-smooth-layer class; every model in this library with n_s1 >= 1 is
// treated as the highly degenerate (two smooth layers) class.
struct Dims {
    int n_s1 = 0;  // smoothest coordinates
    int n_s2 = 0;  // second smooth layer
    int n_r = 0;   // rough (noise-driven) coordinates
    int d = 0;     // Brownian dimension

    int n() const { return n_s1 + n_s2 + n_r; }
    int n_s() const { return n_s1 + n_s2; }
    int n_hidden() const { return n_s2 + n_r; }

    void validate() const {
        if (n_s1 < 0 || n_s2 < 1 || n_r < 1 || d < 1)
            throw ShapeError("Dims: require n_s1 >= 0, n_s2 >= 1, n_r >= 1, d >= 1");
    }
};

// Parameter blocks, concatenated in the fixed order (beta_s1, beta_s2, beta_r,
// sigma). The compact parameter set is represented by per-entry closed
// intervals; optimizers clamp iterates to these boxes.
class ParamVector {
  public:
    ParamVector() = default;
    ParamVector(std::array<int, 4> block_sizes, VectorXd values, VectorXd lower, VectorXd upper,
                std::vector<std::string> names = {})
        : sizes_(block_sizes),
          values_(std::move(values)),
          lower_(std::move(lower)),
          upper_(std::move(upper)),
          names_(std::move(names)) {
        const int total = sizes_[0] + sizes_[1] + sizes_[2] + sizes_[3];
        if (values_.size() != total || lower_.size() != total || upper_.size() != total)
            throw ShapeError("ParamVector: block sizes do not match value/bound lengths");
        if (names_.empty()) {
            names_.resize(total);
            for (int i = 0; i < total; ++i) names_[i] = "theta" + std::to_string(i);
        }
        if (static_cast<int>(names_.size()) != total)
            throw ShapeError("ParamVector: name list length mismatch");
        for (int i = 0; i < total; ++i)
            if (!(lower_[i] <= upper_[i])) throw ConfigError("ParamVector: empty bound interval");
    }

    int size() const { return static_cast<int>(values_.size()); }
    const std::array<int, 4>& block_sizes() const { return sizes_; }
    const std::vector<std::string>& names() const { return names_; }

    const VectorXd& values() const { return values_; }
    VectorXd& values() { return values_; }
    const VectorXd& lower() const { return lower_; }
    const VectorXd& upper() const { return upper_; }

    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }

    // Block views, in concatenation order.
    auto beta_s1() const { return values_.segment(0, sizes_[0]); }
    auto beta_s2() const { return values_.segment(sizes_[0], sizes_[1]); }
    auto beta_r() const { return values_.segment(sizes_[0] + sizes_[1], sizes_[2]); }
    auto sigma() const { return values_.segment(sizes_[0] + sizes_[1] + sizes_[2], sizes_[3]); }

    int block_of(int flat_index) const {
        int acc = 0;
        for (int b = 0; b < 4; ++b) {
            acc += sizes_[b];
            if (flat_index < acc) return b;
        }
        throw ShapeError("ParamVector: flat index out of range");
    }

    bool inside_bounds() const {
        for (int i = 0; i < size(); ++i)
            if (values_[i] < lower_[i] || values_[i] > upper_[i]) return false;
        return true;
    }

    void clamp() {
        for (int i = 0; i < size(); ++i) values_[i] = std::min(std::max(values_[i], lower_[i]), upper_[i]);
    }

    ParamVector with_values(const VectorXd& v) const {
        ParamVector out = *this;
        if (v.size() != values_.size()) throw ShapeError("ParamVector::with_values: length mismatch");
        out.values_ = v;
        return out;
    }

  private:
    std::array<int, 4> sizes_{0, 0, 0, 0};
    VectorXd values_, lower_, upper_;
    std::vector<std::string> names_;
};

}  // namespace hyposde
