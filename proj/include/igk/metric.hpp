#ifndef IGK_METRIC_HPP
#define IGK_METRIC_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"

/**
 * @file metric.hpp
 * @brief Euclidean distance, nearest-center assignment, center updates and the Jc criterion.
 */

namespace igk {

/**
 * How per-point distances are accumulated into Jc.
 * `unsquared` sums plain Euclidean distances; `squared` sums squared distances
 * (the usual within-cluster sum of squares).
 */
enum class MetricMode { unsquared, squared };

inline const char* to_string(MetricMode mode) {
    return mode == MetricMode::squared ? "squared" : "unsquared";
}

struct Assignment {
    std::vector<std::size_t> cluster_of;
    std::vector<std::size_t> counts;

    std::size_t num_clusters() const { return counts.size(); }

    std::size_t num_nonempty() const {
        std::size_t out = 0;
        for (auto c : counts) {
            out += c > 0 ? 1 : 0;
        }
        return out;
    }

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct ClusterModel {
    Matrix centers;
    Assignment assignment;
    double jc = 0.0;
    MetricMode mode = MetricMode::unsquared;

    std::size_t k() const { return centers.rows(); }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("distance between vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

/// Nearest center for every point; ties go to the lowest center index.
inline Assignment assign(const Matrix& points, const Matrix& centers) {
    if (centers.rows() == 0) {
        throw InvalidArgument("assignment needs at least one center");
    }
    if (points.cols() != centers.cols()) {
        throw DimensionError("points have " + std::to_string(points.cols()) + " features, centers have " + std::to_string(centers.cols()));
    }
    const auto n = points.rows();
    const auto k = centers.rows();
    Assignment out{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(k, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = points.row(i);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double dist = squared_distance(x, centers.row(j));
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        out.cluster_of[i] = best;
        ++out.counts[best];
    }
    return out;
}

inline double compute_jc(const Matrix& points, const Matrix& centers, const Assignment& assignment, MetricMode mode) {
    if (assignment.cluster_of.size() != points.rows()) {
        throw DimensionError("assignment covers " + std::to_string(assignment.cluster_of.size()) + " points, data has " +
                             std::to_string(points.rows()));
    }
    if (points.cols() != centers.cols()) {
        throw DimensionError("points and centers disagree on dimension");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto j = assignment.cluster_of[i];
        if (j >= centers.rows()) {
            throw InvalidArgument("point " + std::to_string(i) + " assigned to cluster " + std::to_string(j) + " but only " +
                                  std::to_string(centers.rows()) + " centers exist");
        }
        const double sq = squared_distance(points.row(i), centers.row(j));
        total += mode == MetricMode::squared ? sq : std::sqrt(sq);
    }
    return total;
}

/**
 * Means of the assigned points. A cluster that received no points is re-seeded to the
 * point lying farthest from its own current center (points already used to re-seed
 * another cluster are skipped; ties go to the lowest index).
 */
inline Matrix recompute_centers(const Matrix& points, const Assignment& assignment, const Matrix& current_centers) {
    const auto n = points.rows();
    const auto d = points.cols();
    const auto k = current_centers.rows();
    if (n == 0) {
        throw InvalidArgument("cannot recompute centers of an empty dataset");
    }
    if (k == 0) {
        throw InvalidArgument("at least one center is required");
    }
    if (current_centers.cols() != d || assignment.cluster_of.size() != n) {
        throw DimensionError("centers, points and assignment disagree in shape");
    }

    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = assignment.cluster_of[i];
        if (j >= k) {
            throw InvalidArgument("assignment references cluster " + std::to_string(j) + " of " + std::to_string(k));
        }
        ++counts[j];
        const auto x = points.row(i);
        auto s = sums.row(j);
        for (std::size_t c = 0; c < d; ++c) {
            s[c] += x[c];
        }
    }

    Matrix out(k, d);
    bool any_empty = false;
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) {
            any_empty = true;
            continue;
        }
        const double inv = 1.0 / static_cast<double>(counts[j]);
        for (std::size_t c = 0; c < d; ++c) {
            out(j, c) = sums(j, c) * inv;
        }
    }
    if (!any_empty) {
        return out;
    }

    std::vector<double> spread(n);
    for (std::size_t i = 0; i < n; ++i) {
        spread[i] = squared_distance(points.row(i), current_centers.row(assignment.cluster_of[i]));
    }
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] != 0) {
            continue;
        }
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!used[i] && (pick == n || spread[i] > spread[pick])) {
                pick = i;
            }
        }
        if (pick == n) {
            // More empty clusters than points: keep the stale center.
            const auto src = current_centers.row(j);
            std::copy(src.begin(), src.end(), out.row(j).begin());
            continue;
        }
        used[pick] = true;
        const auto src = points.row(pick);
        std::copy(src.begin(), src.end(), out.row(j).begin());
    }
    return out;
}

/// Assign against `centers` and score in `mode`.
inline ClusterModel evaluate_centers(const Matrix& points, Matrix centers, MetricMode mode) {
    ClusterModel model;
    model.assignment = assign(points, centers);
    model.jc = compute_jc(points, centers, model.assignment, mode);
    model.centers = std::move(centers);
    model.mode = mode;
    return model;
}

} // namespace igk

#endif
