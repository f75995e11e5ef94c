#ifndef IGK_KMEANS_HPP
#define IGK_KMEANS_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"
#include "metric.hpp"

/**
 * @file kmeans.hpp
 * @brief Lloyd's k-means with random-point initialization.
 */

namespace igk {

struct KmeansParams {
    /// Convergence threshold on the change of squared Jc between iterations.
    double epsilon = 1e-6;
    /// When true the threshold is `epsilon` times the squared Jc of the initial assignment.
    bool relative_epsilon = true;
    std::size_t max_iterations = 100;
    /// Mode of the reported Jc. Convergence is always judged on squared Jc.
    MetricMode mode = MetricMode::unsquared;

    void validate() const {
        if (!(epsilon >= 0.0)) {
            throw InvalidArgument("k-means epsilon must be non-negative");
        }
        if (max_iterations < 1) {
            throw InvalidArgument("k-means needs max_iterations >= 1");
        }
    }
};

/// Per-iteration record of a run; `squared_jc[0]` is the value for the initial centers.
struct KmeansTrace {
    std::vector<double> squared_jc;
    std::size_t iterations = 0;
    bool converged = false;
};

/// k distinct data points chosen uniformly at random.
inline Matrix init_random(const Matrix& points, std::size_t k, Rng& rng) {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    if (k > points.rows()) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(points.rows()) + ")");
    }
    const auto picks = sample_without_replacement(points.rows(), k, rng);
    return points.select_rows(picks);
}

/**
 * Alternate center recomputation and reassignment from `init_centers` until the squared
 * Jc changes by less than the threshold, the assignment stops changing, or the
 * iteration cap is reached.
 */
inline ClusterModel kmeans_run(const Matrix& points, const Matrix& init_centers, const KmeansParams& params,
                               KmeansTrace* trace = nullptr) {
    params.validate();
    if (init_centers.rows() == 0 || init_centers.rows() > points.rows()) {
        throw InvalidArgument("k-means needs 1 <= k <= n initial centers");
    }
    if (init_centers.cols() != points.cols()) {
        throw DimensionError("initial centers have the wrong dimension");
    }

    Matrix centers = init_centers;
    Assignment assignment = assign(points, centers);
    double previous = compute_jc(points, centers, assignment, MetricMode::squared);
    const double threshold = params.relative_epsilon ? params.epsilon * previous : params.epsilon;
    if (trace) {
        *trace = {};
        trace->squared_jc.push_back(previous);
    }

    std::size_t iteration = 0;
    bool converged = false;
    while (iteration < params.max_iterations) {
        ++iteration;
        centers = recompute_centers(points, assignment, centers);
        auto next = assign(points, centers);
        const double current = compute_jc(points, centers, next, MetricMode::squared);
        const bool stable = next == assignment;
        assignment = std::move(next);
        if (trace) {
            trace->squared_jc.push_back(current);
        }
        const double change = std::abs(previous - current);
        previous = current;
        if (stable || change < threshold) {
            converged = true;
            break;
        }
    }
    if (trace) {
        trace->iterations = iteration;
        trace->converged = converged;
    }

    ClusterModel model;
    model.jc = compute_jc(points, centers, assignment, params.mode);
    model.assignment = std::move(assignment);
    model.centers = std::move(centers);
    model.mode = params.mode;
    return model;
}

/// Random initialization followed by `kmeans_run`.
inline ClusterModel kmeans(const Matrix& points, std::size_t k, const KmeansParams& params, Rng& rng) {
    return kmeans_run(points, init_random(points, k, rng), params);
}

} // namespace igk

#endif
