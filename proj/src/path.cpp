#include "hyposde/path.hpp"

#include <algorithm>
#include <cmath>

#include "hyposde/errors.hpp"

namespace hyposde {

void PathSample::validate_grid() const {
    if (times.size() < 2) return;
    const double step = times[1] - times[0];
    if (!(step > 0.0)) throw ConfigError("PathSample: grid not strictly increasing");
    for (long i = 1; i < times.size(); ++i) {
        const double s = times[i] - times[i - 1];
        if (std::abs(s - step) > 1e-12 * std::max(1.0, std::abs(step)))
            throw ConfigError("PathSample: grid step not constant");
    }
}

PathSample subsample(const PathSample& path, long stride) {
    if (stride < 1) throw ConfigError("subsample: stride must be >= 1");
    const long n = path.steps();
    if (n % stride != 0) throw ConfigError("subsample: stride does not divide the step count");
    const long m = n / stride;
    PathSample out;
    out.seed = path.seed;
    out.scheme_tag = path.scheme_tag;
    out.times.resize(m + 1);
    out.states.resize(m + 1, path.states.cols());
    for (long i = 0; i <= m; ++i) {
        out.times[i] = path.times[i * stride];
        out.states.row(i) = path.states.row(i * stride);
    }
    return out;
}

ObservationSet project_observed(const PathSample& path, const std::vector<int>& mask) {
    if (mask.empty()) throw ConfigError("project_observed: empty coordinate mask");
    std::vector<int> sorted = mask;
    std::sort(sorted.begin(), sorted.end());
    for (int c : sorted)
        if (c < 0 || c >= path.states.cols()) throw ShapeError("project_observed: mask index out of range");
    ObservationSet out;
    out.times = path.times;
    out.seed = path.seed;
    out.mask = sorted;
    out.values.resize(path.states.rows(), static_cast<long>(sorted.size()));
    for (std::size_t j = 0; j < sorted.size(); ++j) out.values.col(j) = path.states.col(sorted[j]);
    return out;
}

}  // namespace hyposde
