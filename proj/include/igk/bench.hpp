#ifndef IGK_BENCH_HPP
#define IGK_BENCH_HPP

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "dataset.hpp"
#include "gaclust.hpp"
#include "kmeans.hpp"
#include "metric.hpp"
#include "pca.hpp"
#include "refine.hpp"

/**
 * @file bench.hpp
 * @brief Seeded experiment harness: every algorithm on every trial seed, Jc table out.
 */

namespace igk {

enum class Algorithm { kmeans, ga, improved_kmeans, igk };

inline const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::kmeans:
        return "kmeans";
    case Algorithm::ga:
        return "ga";
    case Algorithm::improved_kmeans:
        return "improved_kmeans";
    case Algorithm::igk:
        return "igk";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& name) {
    if (name == "kmeans") {
        return Algorithm::kmeans;
    }
    if (name == "ga") {
        return Algorithm::ga;
    }
    if (name == "improved_kmeans" || name == "improved-kmeans") {
        return Algorithm::improved_kmeans;
    }
    if (name == "igk") {
        return Algorithm::igk;
    }
    throw InvalidArgument("unknown algorithm '" + name + "' (expected kmeans, ga, improved_kmeans or igk)");
}

inline MetricMode parse_metric(const std::string& name) {
    if (name == "unsquared") {
        return MetricMode::unsquared;
    }
    if (name == "squared") {
        return MetricMode::squared;
    }
    throw InvalidArgument("unknown metric '" + name + "' (expected unsquared or squared)");
}

struct DatasetSpec {
    std::string path;
    CsvOptions csv;
    bool impute = false;
    /// Feature columns to keep, by header name or zero-based index among the features.
    std::vector<std::string> columns;
    std::optional<double> pca_threshold;
    bool standardize = false;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    std::size_t k = 2;
    std::vector<Algorithm> algorithms;
    std::size_t trials = 5;
    std::uint64_t base_seed = 1;
    KmeansParams kmeans;
    GaParams ga;
    /// 0 selects 2k.
    std::size_t k_prime = 0;
    std::size_t j_subsamples = 4;
    std::size_t final_passes = 100;
    bool medoids = false;
    MetricMode mode = MetricMode::unsquared;

    std::size_t effective_k_prime() const { return k_prime == 0 ? 2 * k : k_prime; }

    void validate() const {
        if (algorithms.empty()) {
            throw InvalidArgument("no algorithms requested");
        }
        if (trials < 1) {
            throw InvalidArgument("trials must be at least 1");
        }
        if (k < 1) {
            throw InvalidArgument("k must be at least 1");
        }
        if (effective_k_prime() <= k) {
            throw InvalidArgument("K' (" + std::to_string(effective_k_prime()) + ") must be greater than k (" + std::to_string(k) + ")");
        }
        if (j_subsamples < 1) {
            throw InvalidArgument("subsamples must be at least 1");
        }
        kmeans.validate();
        ga.validate();
    }

    RefineParams refine_params() const {
        RefineParams p;
        p.k = k;
        p.k_prime = effective_k_prime();
        p.j_subsamples = j_subsamples;
        p.inner_kmeans = kmeans;
        p.inner_kmeans.mode = mode;
        p.inner_ga = ga;
        p.inner_ga.mode = mode;
        p.mode = mode;
        p.medoid_centers = medoids;
        p.final_passes = final_passes;
        return p;
    }
};

struct TrialTable {
    std::vector<std::string> columns;
    std::vector<std::uint64_t> seeds;
    /// rows[t][a]: final Jc of algorithm a on trial t.
    std::vector<std::vector<double>> rows;
    std::vector<double> average;
    /// Wall-clock seconds per cell, same shape as `rows`. Not part of the CSV.
    std::vector<std::vector<double>> seconds;
    /// Ordered key/value pairs written as comment lines.
    std::vector<std::pair<std::string, std::string>> metadata;

    void compute_average() {
        average.assign(columns.size(), 0.0);
        if (rows.empty()) {
            return;
        }
        for (const auto& row : rows) {
            for (std::size_t a = 0; a < row.size(); ++a) {
                average[a] += row[a];
            }
        }
        for (auto& v : average) {
            v /= static_cast<double>(rows.size());
        }
    }

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t a = 0; a < columns.size(); ++a) {
            if (columns[a] == name) {
                return a;
            }
        }
        return std::nullopt;
    }
};

/// Resolve a column selector (header name or numeric index) against the feature names.
inline std::size_t resolve_column(const Dataset& data, const std::string& selector) {
    for (std::size_t c = 0; c < data.feature_names.size(); ++c) {
        if (data.feature_names[c] == selector) {
            return c;
        }
    }
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec != std::errc() || ptr != selector.data() + selector.size() || idx >= data.dims()) {
        throw InvalidArgument("unknown column '" + selector + "'");
    }
    return idx;
}

/// Column selection, then imputation, then PCA, in that order.
inline Dataset preprocess(Dataset data, const DatasetSpec& spec) {
    if (!spec.columns.empty()) {
        std::vector<std::size_t> cols;
        for (const auto& s : spec.columns) {
            cols.push_back(resolve_column(data, s));
        }
        data = select_columns(data, cols);
    }
    if (spec.impute) {
        data = impute_local_mean(data);
    } else if (data.has_missing()) {
        throw InvalidArgument("dataset '" + data.name + "' has missing values; enable imputation");
    }
    if (spec.pca_threshold) {
        const auto model = pca_fit(data, *spec.pca_threshold, spec.standardize);
        data = pca_transform(model, data);
    }
    return data;
}

inline Dataset load_dataset(const DatasetSpec& spec) {
    try {
        return preprocess(load_csv(spec.path, spec.csv), spec);
    } catch (const Error& e) {
        throw Error("dataset '" + spec.path + "': " + e.what());
    }
}

/// One algorithm on one seed.
inline ClusterModel run_cell(const Matrix& points, Algorithm algorithm, const ExperimentConfig& config, std::uint64_t seed) {
    auto rng = make_rng(seed);
    switch (algorithm) {
    case Algorithm::kmeans: {
        auto params = config.kmeans;
        params.mode = config.mode;
        return kmeans(points, config.k, params, rng);
    }
    case Algorithm::ga: {
        auto params = config.ga;
        params.mode = config.mode;
        return ga_cluster(points, config.k, params, rng);
    }
    case Algorithm::improved_kmeans:
        return improved_kmeans(points, config.refine_params(), rng);
    case Algorithm::igk:
        return improved_genetic_kmeans(points, config.refine_params(), rng);
    }
    throw InvalidArgument("unhandled algorithm");
}

namespace detail {

inline std::string format_g6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace detail

/**
 * Trial t uses seed base_seed + t for every algorithm, so each row is a paired comparison.
 * Any failing cell aborts the whole run.
 */
inline TrialTable run_experiment(const ExperimentConfig& config, const Dataset& data) {
    config.validate();
    data.validate();
    if (data.has_missing()) {
        throw InvalidArgument("dataset '" + data.name + "' has missing values");
    }

    TrialTable table;
    for (auto a : config.algorithms) {
        table.columns.emplace_back(to_string(a));
    }
    for (std::size_t t = 0; t < config.trials; ++t) {
        const auto seed = config.base_seed + t;
        table.seeds.push_back(seed);
        std::vector<double> row;
        std::vector<double> secs;
        for (auto a : config.algorithms) {
            const auto start = std::chrono::steady_clock::now();
            ClusterModel model;
            try {
                model = run_cell(data.points, a, config, seed);
            } catch (const Error& e) {
                throw Error(std::string("trial ") + std::to_string(t + 1) + ", " + to_string(a) + ": " + e.what());
            }
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            row.push_back(model.jc);
            secs.push_back(elapsed.count());
        }
        table.rows.push_back(std::move(row));
        table.seconds.push_back(std::move(secs));
    }
    table.compute_average();

    std::string seeds;
    for (std::size_t t = 0; t < table.seeds.size(); ++t) {
        seeds += (t ? ";" : "") + std::to_string(table.seeds[t]);
    }
    const auto rp = config.refine_params();
    table.metadata = {
        {"dataset", data.name},
        {"n", std::to_string(data.size())},
        {"d", std::to_string(data.dims())},
        {"k", std::to_string(config.k)},
        {"kprime", std::to_string(rp.k_prime)},
        {"subsamples", std::to_string(rp.j_subsamples)},
        {"metric", to_string(config.mode)},
        {"generations", std::to_string(config.ga.generations)},
        {"population", std::to_string(config.ga.population_size)},
        {"pc", detail::format_g6(config.ga.crossover_prob)},
        {"pm", detail::format_g6(config.ga.mutation_prob)},
        {"elitism", std::to_string(config.ga.elitism)},
        {"max_iters", std::to_string(config.kmeans.max_iterations)},
        {"epsilon", detail::format_g6(config.kmeans.epsilon)},
        {"seeds", seeds},
    };
    return table;
}

inline TrialTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    return run_experiment(config, load_dataset(config.dataset));
}

/**
 * Metadata as "# key=value" lines, then "trial,<algorithms...>", one row per trial and a
 * final "average" row. Values use 6 significant digits.
 */
inline void emit_csv(const TrialTable& table, std::ostream& out) {
    for (const auto& [key, value] : table.metadata) {
        out << "# " << key << '=' << value << '\n';
    }
    out << "trial";
    for (const auto& c : table.columns) {
        out << ',' << c;
    }
    out << '\n';
    for (std::size_t t = 0; t < table.rows.size(); ++t) {
        out << (t + 1);
        for (double v : table.rows[t]) {
            out << ',' << detail::format_g6(v);
        }
        out << '\n';
    }
    out << "average";
    for (double v : table.average) {
        out << ',' << detail::format_g6(v);
    }
    out << '\n';
}

inline void emit_csv(const TrialTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    emit_csv(table, out);
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

/// Per-cell wall-clock seconds, same layout as the Jc table (no metadata, no average).
inline void emit_timing_csv(const TrialTable& table, std::ostream& out) {
    out << "trial";
    for (const auto& c : table.columns) {
        out << ',' << c;
    }
    out << '\n';
    for (std::size_t t = 0; t < table.seconds.size(); ++t) {
        out << (t + 1);
        for (double v : table.seconds[t]) {
            out << ',' << detail::format_g6(v);
        }
        out << '\n';
    }
}

/// Read back a table written by `emit_csv`.
inline TrialTable parse_table_csv(std::istream& in) {
    TrialTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                table.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            }
            continue;
        }
        const auto cells = detail::split(line, ',');
        if (!have_header) {
            if (cells.empty() || cells.front() != "trial") {
                throw ParseError("table header must start with 'trial'");
            }
            for (std::size_t i = 1; i < cells.size(); ++i) {
                table.columns.emplace_back(cells[i]);
            }
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size() + 1) {
            throw ParseError("table row has " + std::to_string(cells.size()) + " cells");
        }
        std::vector<double> values;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            const auto v = detail::parse_double(cells[i]);
            if (!v) {
                throw ParseError("bad table value '" + std::string(cells[i]) + "'");
            }
            values.push_back(*v);
        }
        if (cells.front() == "average") {
            table.average = std::move(values);
        } else {
            table.rows.push_back(std::move(values));
        }
    }
    if (!have_header) {
        throw ParseError("no table header found");
    }
    return table;
}

} // namespace igk

#endif
