#ifndef IGK_CLI_HPP
#define IGK_CLI_HPP

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bench.hpp"
#include "dataset.hpp"
#include "metric.hpp"
#include "pca.hpp"

/**
 * @file cli.hpp
 * @brief The `igk` command line: run, jc, pca and impute subcommands.
 *
 * Exit codes: 0 on success, 2 for usage errors (bad flags, invalid parameter
 * combinations), 1 for any other failure.
 */

namespace igk {

namespace detail {

struct DataFlags {
    std::string path;
    std::optional<std::size_t> label_col;
    bool header = false;
    std::string missing = "?";
    bool impute = false;
    std::vector<std::string> columns;
};

inline void add_data_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--data", f.path, "Input CSV file")->required();
    cmd->add_option("--label-col", f.label_col, "Zero-based index of the class label column");
    cmd->add_flag("--header", f.header, "First row holds column names");
    cmd->add_option("--missing", f.missing, "Token marking a missing value")->capture_default_str();
    cmd->add_flag("--impute", f.impute, "Fill missing values with the same-class feature mean");
    cmd->add_option("--columns", f.columns, "Keep only these feature columns (names or indices)")->delimiter(',');
}

inline DatasetSpec to_spec(const DataFlags& f) {
    DatasetSpec spec;
    spec.path = f.path;
    spec.csv.label_column = f.label_col;
    spec.csv.has_header = f.header;
    spec.csv.missing_token = f.missing;
    spec.impute = f.impute;
    spec.columns = f.columns;
    return spec;
}

/// Lines of "key=value" (blank lines and '#' comments ignored) become "--key=value" tokens.
inline std::vector<std::string> read_config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw CLI::FileError::Missing(path);
    }
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#' || body.front() == '[') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw CLI::ConversionError("config line '" + std::string(body) + "' is not key=value");
        }
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        if (key == "config") {
            continue;
        }
        tokens.push_back("--" + std::string(key) + "=" + std::string(value));
    }
    return tokens;
}

/// Splice the contents of `run --config FILE` in front of the explicit flags so that flags win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    if (args.size() < 2 || args[1] != "run") {
        return args;
    }
    for (std::size_t i = 2; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            continue;
        }
        auto tokens = read_config_tokens(path);
        args.insert(args.begin() + 2, tokens.begin(), tokens.end());
        break;
    }
    return args;
}

inline Matrix load_centers(const std::string& path, bool header) {
    CsvOptions opts;
    opts.has_header = header;
    auto centers = load_csv(path, opts);
    if (centers.has_missing()) {
        throw InvalidArgument("centers file contains missing values");
    }
    return centers.points;
}

} // namespace detail

inline int cli_main(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Clustering with k-means, GA-clustering, improved k-means and improved genetic k-means (IGK)", "igk"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // run
    auto* run = app.add_subcommand("run", "Run an experiment and write the Jc table as CSV");
    detail::DataFlags run_data;
    detail::add_data_flags(run, run_data);
    std::string config_path;
    std::string algos = "kmeans,ga,improved_kmeans,igk";
    std::string metric = "unsquared";
    std::string out_path;
    std::string timing_path;
    std::optional<double> run_pca;
    bool run_standardize = false;
    ExperimentConfig cfg;
    run->add_option("--config", config_path, "key=value file mirroring these flags; explicit flags take precedence");
    run->add_option("--algo", algos, "Comma-separated subset of kmeans,ga,improved_kmeans,igk")->capture_default_str();
    run->add_option("--k", cfg.k, "Number of clusters")->required();
    run->add_option("--kprime", cfg.k_prime, "Working cluster count K' (> k); 0 means 2k")->capture_default_str();
    run->add_option("--subsamples", cfg.j_subsamples, "Number of subsamples J")->capture_default_str();
    run->add_option("--trials", cfg.trials, "Number of paired trials")->capture_default_str();
    run->add_option("--seed", cfg.base_seed, "Base seed; trial t uses seed + t")->capture_default_str();
    run->add_option("--metric", metric, "Jc accumulation: unsquared or squared")->capture_default_str();
    run->add_option("--generations", cfg.ga.generations, "GA generations")->capture_default_str();
    run->add_option("--pop", cfg.ga.population_size, "GA population size")->capture_default_str();
    run->add_option("--pc", cfg.ga.crossover_prob, "Crossover probability")->capture_default_str();
    run->add_option("--pm", cfg.ga.mutation_prob, "Per-gene mutation probability")->capture_default_str();
    run->add_option("--elitism", cfg.ga.elitism, "Individuals carried over unchanged each generation")->capture_default_str();
    run->add_option("--epsilon", cfg.kmeans.epsilon, "k-means convergence threshold (relative to the initial squared Jc)")
        ->capture_default_str();
    run->add_option("--max-iters", cfg.kmeans.max_iterations, "k-means iteration cap")->capture_default_str();
    run->add_option("--final-passes", cfg.final_passes, "Reassign/recompute passes after merging to k")->capture_default_str();
    run->add_flag("--medoids", cfg.medoids, "Snap final centers of the refined algorithms to member points");
    run->add_option("--pca", run_pca, "Reduce with PCA keeping this fraction of variance");
    run->add_flag("--standardize", run_standardize, "Scale features to unit variance before PCA");
    run->add_option("--out", out_path, "Output CSV (stdout when omitted)");
    run->add_option("--timing-out", timing_path, "Optional CSV of per-cell wall-clock seconds");

    // jc
    auto* jc = app.add_subcommand("jc", "Score a centers file against a dataset");
    detail::DataFlags jc_data;
    detail::add_data_flags(jc, jc_data);
    std::string centers_path;
    bool centers_header = false;
    std::string jc_metric = "unsquared";
    jc->add_option("--centers", centers_path, "CSV with one center per row")->required();
    jc->add_flag("--centers-header", centers_header, "Centers file has a header row");
    jc->add_option("--metric", jc_metric, "unsquared or squared")->capture_default_str();

    // pca
    auto* pca = app.add_subcommand("pca", "Fit PCA and report explained variance");
    detail::DataFlags pca_data;
    detail::add_data_flags(pca, pca_data);
    double threshold = 0.98;
    bool pca_standardize = false;
    std::string pca_out;
    pca->add_option("--threshold", threshold, "Cumulative explained variance to retain")->capture_default_str();
    pca->add_flag("--standardize", pca_standardize, "Scale features to unit variance first");
    pca->add_option("--out", pca_out, "Write the projected data here");

    // impute
    auto* imp = app.add_subcommand("impute", "Fill missing values with local (same-class) means");
    detail::DataFlags imp_data;
    detail::add_data_flags(imp, imp_data);
    std::string imp_out;
    imp->add_option("--out", imp_out, "Output CSV (stdout when omitted)");

    std::vector<std::string> args;
    try {
        args = detail::expand_config(argv_in);
    } catch (const CLI::Error& e) {
        err << "igk: " << e.what() << '\n';
        return 2;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();
    }

    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (run->parsed()) {
            try {
                cfg.algorithms.clear();
                for (auto name : detail::split(algos, ',')) {
                    if (!name.empty()) {
                        cfg.algorithms.push_back(parse_algorithm(std::string(name)));
                    }
                }
                cfg.mode = parse_metric(metric);
                cfg.dataset = detail::to_spec(run_data);
                cfg.dataset.pca_threshold = run_pca;
                cfg.dataset.standardize = run_standardize;
                cfg.validate();
            } catch (const InvalidArgument& e) {
                err << "igk run: " << e.what() << '\n';
                return 2;
            }
            const auto table = run_experiment(cfg);
            if (out_path.empty()) {
                emit_csv(table, out);
            } else {
                emit_csv(table, out_path);
            }
            if (!timing_path.empty()) {
                std::ofstream t(timing_path);
                if (!t) {
                    throw Error("cannot open '" + timing_path + "' for writing");
                }
                emit_timing_csv(table, t);
            }
            return 0;
        }

        if (jc->parsed()) {
            MetricMode mode;
            try {
                mode = parse_metric(jc_metric);
            } catch (const InvalidArgument& e) {
                err << "igk jc: " << e.what() << '\n';
                return 2;
            }
            const auto data = load_dataset(detail::to_spec(jc_data));
            const auto centers = detail::load_centers(centers_path, centers_header);
            if (centers.cols() != data.dims()) {
                throw DimensionError("centers have " + std::to_string(centers.cols()) + " columns, data has " +
                                     std::to_string(data.dims()) + " features");
            }
            const auto model = evaluate_centers(data.points, centers, mode);
            out << detail::format_double(model.jc) << '\n';
            return 0;
        }

        if (pca->parsed()) {
            auto spec = detail::to_spec(pca_data);
            const auto data = load_dataset(spec);
            const auto model = pca_fit(data, threshold, pca_standardize);
            out << "components=" << model.output_dims() << '\n';
            double cumulative = 0.0;
            for (std::size_t j = 0; j < model.output_dims(); ++j) {
                cumulative += model.explained_variance_ratio[j];
                out << "pc" << (j + 1) << ',' << detail::format_g6(model.explained_variance_ratio[j]) << ','
                    << detail::format_g6(cumulative) << '\n';
            }
            if (!pca_out.empty()) {
                std::ofstream f(pca_out);
                if (!f) {
                    throw Error("cannot open '" + pca_out + "' for writing");
                }
                write_csv(pca_transform(model, data), f, pca_data.header);
            }
            return 0;
        }

        if (imp->parsed()) {
            auto spec = detail::to_spec(imp_data);
            spec.impute = true;
            const auto data = load_dataset(spec);
            if (imp_out.empty()) {
                write_csv(data, out, imp_data.header);
            } else {
                std::ofstream f(imp_out);
                if (!f) {
                    throw Error("cannot open '" + imp_out + "' for writing");
                }
                write_csv(data, f, imp_data.header);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "igk: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return cli_main(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace igk

#endif
