#ifndef IGK_REFINE_HPP
#define IGK_REFINE_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "dataset.hpp"
#include "gaclust.hpp"
#include "kmeans.hpp"
#include "metric.hpp"

/**
 * @file refine.hpp
 * @brief Multi-sample initial-center refinement, K'-clustering and nearest-center merging.
 *
 * Both pipelines draw J disjoint subsamples, cluster each into K' > k groups, keep the
 * candidate center set with the lowest squared Jc over the full data, re-cluster the full
 * data at K' from that start, and then merge the two closest centers until k remain.
 */

namespace igk {

enum class InnerAlgorithm { kmeans, genetic };

struct RefineParams {
    std::size_t k = 2;
    std::size_t k_prime = 4;
    std::size_t j_subsamples = 4;
    InnerAlgorithm inner = InnerAlgorithm::kmeans;
    KmeansParams inner_kmeans;
    GaParams inner_ga;
    /// Mode of the reported Jc.
    MetricMode mode = MetricMode::unsquared;
    /// Snap each final center to the closest member point.
    bool medoid_centers = false;
    /// Reassign/recompute passes after merging down to k; stops early at a fixed point.
    std::size_t final_passes = 100;

    void validate() const {
        if (k < 1) {
            throw InvalidArgument("k must be at least 1");
        }
        if (k_prime < k) {
            throw InvalidArgument("K' (" + std::to_string(k_prime) + ") must not be smaller than k (" + std::to_string(k) + ")");
        }
        if (j_subsamples < 1) {
            throw InvalidArgument("at least one subsample is required");
        }
        if (final_passes < 1) {
            throw InvalidArgument("at least one final pass is required");
        }
        inner_kmeans.validate();
        if (inner == InnerAlgorithm::genetic) {
            inner_ga.validate();
        }
    }
};

struct RefineResult {
    /// The chosen K' x d center set.
    Matrix centers;
    std::size_t chosen = 0;
    std::vector<Matrix> candidates;
    /// Squared Jc of each candidate over the full data.
    std::vector<double> candidate_jc;
};

/// Index of the smallest score; the first one wins ties.
inline std::size_t choose_candidate(std::span<const double> scores) {
    if (scores.empty()) {
        throw InvalidArgument("no candidates to choose from");
    }
    return static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
}

/**
 * Cluster each of J subsamples into K' groups with the inner algorithm and return the
 * candidate whose squared Jc over the full data is smallest (first one on ties).
 * Subsample m runs on its own stream so the result does not depend on evaluation order.
 */
inline RefineResult refine_initial_centers(const Matrix& points, const RefineParams& params, Rng& rng) {
    params.validate();
    const auto blocks = partition_indices(points.rows(), params.j_subsamples, rng);
    for (const auto& block : blocks) {
        if (params.k_prime > block.size()) {
            throw InvalidArgument("K' = " + std::to_string(params.k_prime) + " exceeds subsample size " + std::to_string(block.size()));
        }
    }
    const auto stream_seed = rng();

    RefineResult out;
    out.candidate_jc.reserve(blocks.size());
    for (std::size_t m = 0; m < blocks.size(); ++m) {
        auto stream = make_rng(stream_seed, m);
        const Matrix sample = points.select_rows(blocks[m]);
        ClusterModel local;
        if (params.inner == InnerAlgorithm::kmeans) {
            local = kmeans(sample, params.k_prime, params.inner_kmeans, stream);
        } else {
            local = ga_cluster(sample, params.k_prime, params.inner_ga, stream);
        }
        const auto full = assign(points, local.centers);
        out.candidate_jc.push_back(compute_jc(points, local.centers, full, MetricMode::squared));
        out.candidates.push_back(std::move(local.centers));
    }

    out.chosen = choose_candidate(out.candidate_jc);
    out.centers = out.candidates[out.chosen];
    return out;
}

struct MergeStep {
    std::size_t kept = 0;
    std::size_t removed = 0;
    std::size_t kept_count = 0;
    std::size_t removed_count = 0;
    std::vector<double> kept_center;
    std::vector<double> removed_center;
    std::vector<double> merged_center;
    /// Total membership over all clusters after this merge.
    std::size_t total_members = 0;
};

struct MergeTrace {
    std::vector<MergeStep> steps;
    /// Squared Jc of the merged centers over the merged memberships, before the final pass.
    double post_merge_squared_jc = 0.0;
};

/**
 * Repeatedly fuse the two closest centers into their size-weighted mean until k remain,
 * then apply up to `final_passes` reassign/recompute passes (stopping early once the
 * assignment is stable). One pass means reassign, recompute the means, reassign.
 */
inline ClusterModel merge_to_k(const ClusterModel& model, const Matrix& points, std::size_t k, MergeTrace* trace = nullptr,
                               std::size_t final_passes = 1) {
    const auto d = points.cols();
    if (final_passes < 1) {
        throw InvalidArgument("merge needs at least one final pass");
    }
    if (k < 1) {
        throw InvalidArgument("k must be at least 1");
    }
    if (k > model.centers.rows()) {
        throw InvalidArgument("cannot merge " + std::to_string(model.centers.rows()) + " clusters up to " + std::to_string(k));
    }
    if (model.centers.cols() != d || model.assignment.cluster_of.size() != points.rows()) {
        throw DimensionError("model does not match the data");
    }

    std::vector<std::vector<double>> centers;
    for (std::size_t j = 0; j < model.centers.rows(); ++j) {
        const auto r = model.centers.row(j);
        centers.emplace_back(r.begin(), r.end());
    }
    std::vector<std::size_t> counts = model.assignment.counts;
    std::vector<std::size_t> cluster_of = model.assignment.cluster_of;
    if (trace) {
        *trace = {};
    }

    while (centers.size() > k) {
        std::size_t a = 0;
        std::size_t b = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i) {
            for (std::size_t j = i + 1; j < centers.size(); ++j) {
                const double dist = squared_distance(centers[i], centers[j]);
                if (dist < best) {
                    best = dist;
                    a = i;
                    b = j;
                }
            }
        }

        const auto na = counts[a];
        const auto nb = counts[b];
        std::vector<double> merged(d);
        for (std::size_t f = 0; f < d; ++f) {
            merged[f] = na + nb == 0 ? 0.5 * (centers[a][f] + centers[b][f])
                                     : (static_cast<double>(na) * centers[a][f] + static_cast<double>(nb) * centers[b][f]) /
                                           static_cast<double>(na + nb);
        }
        MergeStep step;
        if (trace) {
            step = {a, b, na, nb, centers[a], centers[b], merged, 0};
        }

        centers[a] = std::move(merged);
        counts[a] += nb;
        centers.erase(centers.begin() + static_cast<std::ptrdiff_t>(b));
        counts.erase(counts.begin() + static_cast<std::ptrdiff_t>(b));
        for (auto& c : cluster_of) {
            if (c == b) {
                c = a;
            } else if (c > b) {
                --c;
            }
        }
        if (trace) {
            std::size_t total = 0;
            for (auto c : counts) {
                total += c;
            }
            step.total_members = total;
            trace->steps.push_back(std::move(step));
        }
    }

    Matrix merged_centers(centers.size(), d);
    for (std::size_t j = 0; j < centers.size(); ++j) {
        std::copy(centers[j].begin(), centers[j].end(), merged_centers.row(j).begin());
    }
    if (trace) {
        const Assignment merged_assignment{cluster_of, counts};
        trace->post_merge_squared_jc = compute_jc(points, merged_centers, merged_assignment, MetricMode::squared);
    }

    KmeansParams polish;
    polish.epsilon = 0.0;
    polish.max_iterations = final_passes;
    polish.mode = model.mode;
    return kmeans_run(points, merged_centers, polish);
}

/// Replace each center by the member point closest to it, then reassign and rescore.
inline ClusterModel snap_to_medoids(const ClusterModel& model, const Matrix& points) {
    Matrix centers = model.centers;
    for (std::size_t j = 0; j < centers.rows(); ++j) {
        std::size_t pick = points.rows();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (model.assignment.cluster_of[i] != j) {
                continue;
            }
            const double dist = squared_distance(points.row(i), model.centers.row(j));
            if (dist < best) {
                best = dist;
                pick = i;
            }
        }
        if (pick < points.rows()) {
            const auto src = points.row(pick);
            std::copy(src.begin(), src.end(), centers.row(j).begin());
        }
    }
    return evaluate_centers(points, std::move(centers), model.mode);
}

/**
 * Shrink J and K' so that every subsample can hold K' points: J is lowered until a
 * subsample holds at least k points, then K' is capped at the smallest subsample size.
 */
inline RefineParams fit_to_data(RefineParams params, std::size_t n) {
    if (params.k > n) {
        throw InvalidArgument("k = " + std::to_string(params.k) + " exceeds the number of points (" + std::to_string(n) + ")");
    }
    while (params.j_subsamples > 1 && n / params.j_subsamples < params.k) {
        --params.j_subsamples;
    }
    params.k_prime = std::min(params.k_prime, n / params.j_subsamples);
    return params;
}

namespace detail {

inline ClusterModel finish(const ClusterModel& wide, const Matrix& points, const RefineParams& params, MergeTrace* trace) {
    auto model = merge_to_k(wide, points, params.k, trace, params.final_passes);
    model.mode = params.mode;
    model.jc = compute_jc(points, model.centers, model.assignment, params.mode);
    if (params.medoid_centers) {
        model = snap_to_medoids(model, points);
    }
    return model;
}

} // namespace detail

/// Refine with k-means on the subsamples, run k-means on all data at K', merge down to k.
inline ClusterModel improved_kmeans(const Matrix& points, RefineParams params, Rng& rng, MergeTrace* trace = nullptr) {
    params.inner = InnerAlgorithm::kmeans;
    params.validate();
    params = fit_to_data(params, points.rows());
    const auto refined = refine_initial_centers(points, params, rng);
    const auto wide = kmeans_run(points, refined.centers, params.inner_kmeans);
    return detail::finish(wide, points, params, trace);
}

/// Refine with genetic clustering on the subsamples, run it again on all data at K' with the
/// refined centers injected into the initial population, merge down to k.
inline ClusterModel improved_genetic_kmeans(const Matrix& points, RefineParams params, Rng& rng, MergeTrace* trace = nullptr) {
    params.inner = InnerAlgorithm::genetic;
    params.validate();
    params = fit_to_data(params, points.rows());
    const auto refined = refine_initial_centers(points, params, rng);
    const Chromosome seed = encode(refined.centers);
    const auto wide = ga_cluster(points, params.k_prime, params.inner_ga, rng, std::span<const Chromosome>(&seed, 1));
    return detail::finish(wide, points, params, trace);
}

} // namespace igk

#endif
