#ifndef IGK_GACLUST_HPP
#define IGK_GACLUST_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "core.hpp"
#include "metric.hpp"

/**
 * @file gaclust.hpp
 * @brief Genetic clustering over real-valued chromosomes that concatenate k centers.
 *
 * Each evaluation assigns points to the decoded centers, moves every non-empty center to
 * the mean of its points (written back into the genes), and scores 1 / (1 + Jc).
 * Generations apply roulette selection, single-point crossover and multiplicative
 * mutation, with optional elitism.
 */

namespace igk {

struct Chromosome {
    std::vector<double> genes;
    double fitness = 0.0;
    double jc = std::numeric_limits<double>::infinity();
    bool evaluated = false;
};

struct GaParams {
    std::size_t population_size = 15;
    double crossover_prob = 0.8;
    double mutation_prob = 0.001;
    std::size_t generations = 100;
    std::size_t elitism = 1;
    MetricMode mode = MetricMode::unsquared;

    void validate() const {
        if (population_size < 2) {
            throw InvalidArgument("GA population size must be at least 2");
        }
        if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0) || !(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
            throw InvalidArgument("GA probabilities must lie in [0, 1]");
        }
        if (elitism > population_size) {
            throw InvalidArgument("elitism cannot exceed the population size");
        }
    }
};

inline Chromosome encode(const Matrix& centers) {
    Chromosome c;
    c.genes.assign(centers.values().begin(), centers.values().end());
    return c;
}

inline Matrix decode(const Chromosome& c, std::size_t dims) {
    if (dims == 0 || c.genes.size() % dims != 0) {
        throw DimensionError("chromosome of length " + std::to_string(c.genes.size()) + " does not encode " + std::to_string(dims) +
                             "-dimensional centers");
    }
    return Matrix(c.genes.size() / dims, dims, c.genes);
}

/// Each chromosome holds k distinct data points, drawn independently per chromosome.
inline std::vector<Chromosome> init_population(const Matrix& points, std::size_t k, std::size_t population_size, Rng& rng) {
    if (k == 0 || k > points.rows()) {
        throw InvalidArgument("GA needs 1 <= k <= n (k = " + std::to_string(k) + ", n = " + std::to_string(points.rows()) + ")");
    }
    std::vector<Chromosome> pop;
    pop.reserve(population_size);
    for (std::size_t p = 0; p < population_size; ++p) {
        const auto picks = sample_without_replacement(points.rows(), k, rng);
        pop.push_back(encode(points.select_rows(picks)));
    }
    return pop;
}

/**
 * Score `c` in place: assign, move non-empty centers to their cluster means (written
 * back into the genes), then cache Jc against the moved centers and fitness 1 / (1 + Jc).
 */
inline double evaluate_fitness(Chromosome& c, const Matrix& points, MetricMode mode) {
    Matrix centers = decode(c, points.cols());
    const auto assignment = assign(points, centers);
    const auto d = points.cols();
    Matrix sums(centers.rows(), d);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto s = sums.row(assignment.cluster_of[i]);
        const auto x = points.row(i);
        for (std::size_t f = 0; f < d; ++f) {
            s[f] += x[f];
        }
    }
    for (std::size_t j = 0; j < centers.rows(); ++j) {
        if (assignment.counts[j] == 0) {
            continue;
        }
        const double inv = 1.0 / static_cast<double>(assignment.counts[j]);
        for (std::size_t f = 0; f < d; ++f) {
            centers(j, f) = sums(j, f) * inv;
        }
    }
    c.genes.assign(centers.values().begin(), centers.values().end());
    c.jc = compute_jc(points, centers, assignment, mode);
    c.fitness = 1.0 / (1.0 + c.jc);
    c.evaluated = true;
    return c.fitness;
}

/// `pop.size()` draws with replacement, each proportional to fitness.
inline std::vector<Chromosome> roulette_select(std::span<const Chromosome> pop, Rng& rng) {
    std::vector<double> cumulative(pop.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].evaluated || !(pop[i].fitness >= 0.0)) {
            throw InvalidArgument("roulette selection needs evaluated, non-negative fitness values");
        }
        total += pop[i].fitness;
        cumulative[i] = total;
    }
    if (!(total > 0.0)) {
        throw InvalidArgument("roulette wheel has zero total fitness");
    }
    std::vector<Chromosome> out;
    out.reserve(pop.size());
    for (std::size_t s = 0; s < pop.size(); ++s) {
        const double spin = uniform01(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), spin);
        auto idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx == pop.size()) {
            // spin rounded onto the upper edge: take the last slot of non-zero width
            idx = pop.size() - 1;
            while (pop[idx].fitness == 0.0) {
                --idx;
            }
        }
        out.push_back(pop[idx]);
    }
    return out;
}

/// Exchange the gene suffixes starting at `cut` (1 <= cut < length).
inline std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a, const Chromosome& b, std::size_t cut) {
    if (a.genes.size() != b.genes.size()) {
        throw DimensionError("crossover between chromosomes of different length");
    }
    if (cut < 1 || cut >= a.genes.size()) {
        throw InvalidArgument("crossover cut " + std::to_string(cut) + " outside [1, " + std::to_string(a.genes.size() - 1) + "]");
    }
    Chromosome x;
    Chromosome y;
    x.genes.reserve(a.genes.size());
    y.genes.reserve(a.genes.size());
    x.genes.insert(x.genes.end(), a.genes.begin(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    x.genes.insert(x.genes.end(), b.genes.begin() + static_cast<std::ptrdiff_t>(cut), b.genes.end());
    y.genes.insert(y.genes.end(), b.genes.begin(), b.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    y.genes.insert(y.genes.end(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut), a.genes.end());
    return {std::move(x), std::move(y)};
}

/// With probability `pc` cross at a uniform cut in [1, L-1]; otherwise return copies of the parents.
inline std::pair<Chromosome, Chromosome> crossover_single_point(const Chromosome& a, const Chromosome& b, double pc, Rng& rng) {
    if (a.genes.size() != b.genes.size()) {
        throw DimensionError("crossover between chromosomes of different length");
    }
    if (a.genes.size() < 2) {
        throw InvalidArgument("single-point crossover needs at least two genes");
    }
    if (uniform01(rng) < pc) {
        const auto cut = 1 + uniform_index(rng, a.genes.size() - 1);
        return crossover_at(a, b, cut);
    }
    return {a, b};
}

/**
 * Each gene mutates with probability `pm` to v +/- 2*delta*v (delta uniform in [0, 1],
 * sign equiprobable); a zero gene becomes +/- 2*delta. Returns the number of genes touched.
 */
inline std::size_t mutate(Chromosome& c, double pm, Rng& rng) {
    std::size_t touched = 0;
    for (auto& g : c.genes) {
        if (!(uniform01(rng) < pm)) {
            continue;
        }
        const double delta = uniform01(rng);
        const double sign = (rng() >> 63) != 0 ? 1.0 : -1.0;
        g = g != 0.0 ? g + sign * 2.0 * delta * g : sign * 2.0 * delta;
        ++touched;
    }
    if (touched > 0) {
        c.evaluated = false;
    }
    return touched;
}

struct GaTrace {
    /// Best-ever fitness after each generation; entry 0 is the initial population.
    std::vector<double> best_fitness;
    std::vector<std::size_t> population_sizes;
};

/**
 * Evolve a population for `params.generations` generations and return the best chromosome
 * ever seen, decoded, freshly assigned and scored in `params.mode`. Chromosomes in `seeded`
 * replace the first members of the initial population.
 */
inline ClusterModel ga_cluster(const Matrix& points, std::size_t k, const GaParams& params, Rng& rng,
                               std::span<const Chromosome> seeded = {}, GaTrace* trace = nullptr) {
    params.validate();
    const auto d = points.cols();
    auto pop = init_population(points, k, params.population_size, rng);
    for (std::size_t s = 0; s < seeded.size() && s < pop.size(); ++s) {
        if (seeded[s].genes.size() != k * d) {
            throw DimensionError("seeded chromosome does not encode " + std::to_string(k) + " centers");
        }
        pop[s] = seeded[s];
        pop[s].evaluated = false;
    }
    for (auto& c : pop) {
        evaluate_fitness(c, points, params.mode);
    }

    auto by_fitness = [](const Chromosome& a, const Chromosome& b) { return a.fitness > b.fitness; };
    Chromosome best = *std::min_element(pop.begin(), pop.end(), by_fitness);
    if (trace) {
        *trace = {};
        trace->best_fitness.push_back(best.fitness);
        trace->population_sizes.push_back(pop.size());
    }

    for (std::size_t gen = 0; gen < params.generations; ++gen) {
        std::vector<Chromosome> elites(pop.begin(), pop.end());
        std::partial_sort(elites.begin(), elites.begin() + static_cast<std::ptrdiff_t>(params.elitism), elites.end(), by_fitness);
        elites.resize(params.elitism);

        auto next = roulette_select(pop, rng);
        for (std::size_t i = 0; i + 1 < next.size(); i += 2) {
            auto [x, y] = crossover_single_point(next[i], next[i + 1], params.crossover_prob, rng);
            next[i] = std::move(x);
            next[i + 1] = std::move(y);
        }
        for (auto& c : next) {
            mutate(c, params.mutation_prob, rng);
            evaluate_fitness(c, points, params.mode);
        }

        if (!elites.empty()) {
            std::vector<std::size_t> order(next.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return next[a].fitness < next[b].fitness; });
            for (std::size_t e = 0; e < elites.size(); ++e) {
                next[order[e]] = elites[e];
            }
        }
        pop = std::move(next);

        const auto& gen_best = *std::min_element(pop.begin(), pop.end(), by_fitness);
        if (gen_best.fitness > best.fitness) {
            best = gen_best;
        }
        if (trace) {
            trace->best_fitness.push_back(best.fitness);
            trace->population_sizes.push_back(pop.size());
        }
    }

    return evaluate_centers(points, decode(best, d), params.mode);
}

} // namespace igk

#endif
