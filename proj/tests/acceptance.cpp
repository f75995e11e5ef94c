// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
// A criterion whose input data is not available prints UNVERIFIED and does not count as a pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "igk/cli.hpp"
#include "igk/igk.hpp"
#include "support/oracles.hpp"

using namespace igk;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("criterion %2d %-28s %s  %s\n", id, title, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

void report_unverified(int id, const char* title, const std::string& detail) {
    std::printf("criterion %2d %-28s UNVERIFIED  %s\n", id, title, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* pattern, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, a);
    return buf;
}

Dataset load_iris() {
    CsvOptions opts;
    opts.has_header = true;
    opts.label_column = 4;
    return load_csv(IGK_TEST_DATA_DIR "/iris.csv", opts);
}

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / "igk_acceptance";
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig base_config(std::size_t k, std::vector<Algorithm> algos, std::size_t trials) {
    ExperimentConfig c;
    c.k = k;
    c.algorithms = std::move(algos);
    c.trials = trials;
    c.base_seed = 1;
    return c;
}

const std::vector<Algorithm> kAll{Algorithm::kmeans, Algorithm::ga, Algorithm::improved_kmeans, Algorithm::igk};

double column_average(const TrialTable& t, const char* name) { return t.average[*t.column(name)]; }

std::vector<double> column_values(const TrialTable& t, const char* name) {
    std::vector<double> out;
    for (const auto& row : t.rows) {
        out.push_back(row[*t.column(name)]);
    }
    return out;
}

Dataset gaussian_mixture(std::size_t k, std::size_t n, double extent, double sd, std::uint64_t seed) {
    auto rng = make_rng(seed);
    const auto centers = testing::grid_centers(k, extent, rng);
    Dataset d;
    d.name = "gmm_k" + std::to_string(k);
    d.points = testing::make_blobs(centers, n / k, sd, rng).points;
    return d;
}

// ---------------------------------------------------------------------------

void criterion_1(const Dataset& iris) {
    // Oracle: plain Lloyd from many random starts, scored from scratch in both modes.
    auto rng = make_rng(2024);
    double best_sq = std::numeric_limits<double>::infinity();
    double best_un = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 300; ++r) {
        const auto start = iris.points.select_rows(sample_without_replacement(iris.size(), 3, rng));
        const auto centers = testing::reference_lloyd(iris.points, start);
        best_sq = std::min(best_sq, testing::nearest_center_cost(iris.points, centers, true));
        best_un = std::min(best_un, testing::nearest_center_cost(iris.points, centers, false));
    }
    const bool oracle_ok = best_sq >= 78.8 && best_sq <= 79.0 && best_un >= 96.9 && best_un <= 97.3;

    auto config = base_config(3, {Algorithm::ga, Algorithm::igk}, 5);
    const auto start = std::chrono::steady_clock::now();
    const auto table = run_experiment(config, iris);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    const double ga = column_average(table, "ga");
    const double igk = column_average(table, "igk");
    const bool in_band = ga >= 96.9 && ga <= 97.6 && igk >= 96.9 && igk <= 97.6;

    report(1, "iris reproduction", oracle_ok && in_band && took.count() < 60.0,
           "oracle best squared=" + fmt("%.4f", best_sq) + " unsquared=" + fmt("%.4f", best_un) +
               "; avg ga=" + fmt("%.4f", ga) + " igk=" + fmt("%.4f", igk) + " (band [96.9, 97.6]); " +
               fmt("%.1f", took.count()) + " s");
}

void criterion_2(const Dataset& iris) {
    std::vector<std::pair<std::string, Dataset>> sets{
        {"iris", iris},
        {"gmm_k5", gaussian_mixture(5, 1000, 100.0, 5.0, 501)},
        {"gmm_k10", gaussian_mixture(10, 1000, 100.0, 5.0, 1001)},
    };
    const std::vector<std::size_t> ks{3, 5, 10};
    bool pass = true;
    std::string detail;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto table = run_experiment(base_config(ks[s], kAll, 5), sets[s].second);
        const double km = column_average(table, "kmeans");
        const double ga = column_average(table, "ga");
        const double ikm = column_average(table, "improved_kmeans");
        const double igk = column_average(table, "igk");
        const bool ok = igk <= 1.02 * ga && igk <= 1.02 * ikm && ikm <= 1.02 * km;
        pass = pass && ok;
        detail += sets[s].first + "[km=" + fmt("%.6g", km) + " ga=" + fmt("%.6g", ga) + " ikm=" + fmt("%.6g", ikm) +
                  " igk=" + fmt("%.6g", igk) + (ok ? "] " : " VIOLATED] ");
    }
    report(2, "ordering (slack 1.02)", pass, detail);
}

void criterion_3(const Dataset& iris) {
    const auto table = run_experiment(base_config(3, {Algorithm::kmeans, Algorithm::igk}, 10), iris);
    const double sd_km = testing::sample_sd(column_values(table, "kmeans"));
    const double sd_igk = testing::sample_sd(column_values(table, "igk"));
    report(3, "stability", sd_igk <= sd_km, "sd igk=" + fmt("%.6g", sd_igk) + " sd kmeans=" + fmt("%.6g", sd_km) + " over 10 seeds");
}

void criterion_4() {
    Dataset data;
    std::string source;
    const std::string a1_path = IGK_A1_CSV;
    if (!a1_path.empty() && fs::exists(a1_path)) {
        // the published file is whitespace separated; normalise to commas
        std::ifstream in(a1_path);
        std::stringstream normalised;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string cell;
            bool first = true;
            while (ls >> cell) {
                normalised << (first ? "" : ",") << cell;
                first = false;
            }
            if (!first) {
                normalised << '\n';
            }
        }
        data = parse_csv(normalised, {}, "a1");
        source = "A1 file";
    } else {
        data = gaussian_mixture(20, 3000, 60000.0, 1800.0, 2020);
        source = "20-blob synthetic substitute (A1 not provided)";
    }
    auto config = base_config(20, {Algorithm::kmeans, Algorithm::igk}, 5);
    config.k_prime = 40;
    config.ga.generations = 10;
    const auto table = run_experiment(config, data);
    const double km = column_average(table, "kmeans");
    const double igk = column_average(table, "igk");
    report(4, "A1-scale ordering", igk < km,
           source + ", n=" + std::to_string(data.size()) + ": avg igk=" + fmt("%.6g", igk) + " kmeans=" + fmt("%.6g", km));
}

void criterion_5() {
    auto rng = make_rng(5005);
    std::size_t violations = 0;
    std::size_t steps = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const auto k = 1 + uniform_index(rng, 5);
        const auto n = k + uniform_index(rng, 51 - k);
        const auto d = 1 + uniform_index(rng, 4);
        const auto pts = testing::random_matrix(n, d, -10, 10, rng);
        KmeansParams params;
        params.epsilon = 0.0;
        params.mode = MetricMode::squared;
        KmeansTrace trace;
        const auto model = kmeans_run(pts, init_random(pts, k, rng), params, &trace);
        for (std::size_t t = 1; t < trace.squared_jc.size(); ++t) {
            ++steps;
            if (trace.squared_jc[t] > trace.squared_jc[t - 1] * (1 + 1e-12)) {
                ++violations;
            }
        }
        // the reported objective must agree with a from-scratch evaluation of the final centers
        if (std::abs(model.jc - testing::nearest_center_cost(pts, model.centers, true)) > 1e-9 * (1 + model.jc)) {
            ++violations;
        }
    }
    report(5, "Lloyd monotonicity", violations == 0,
           std::to_string(violations) + " violations over 100 instances, " + std::to_string(steps) + " iterations");
}

void criterion_6() {
    auto rng = make_rng(6006);
    std::size_t violations = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const auto j = 1 + uniform_index(rng, 4);
        const auto n = 30 + uniform_index(rng, 70);
        const auto d = 1 + uniform_index(rng, 3);
        const auto pts = testing::random_matrix(n, d, 0, 10, rng);
        RefineParams params;
        params.k = 2;
        params.k_prime = 3 + uniform_index(rng, 3);
        params.j_subsamples = j;
        params.inner = inst % 2 == 0 ? InnerAlgorithm::kmeans : InnerAlgorithm::genetic;
        params.inner_ga.generations = 10;
        const auto result = refine_initial_centers(pts, params, rng);
        if (result.candidates.size() != j) {
            ++violations;
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : result.candidates) {
            best = std::min(best, testing::nearest_center_cost(pts, c, true));
        }
        const double got = testing::nearest_center_cost(pts, result.centers, true);
        if (std::abs(got - best) > 1e-12 * best) {
            ++violations;
        }
    }
    report(6, "refinement argmin", violations == 0, std::to_string(violations) + " violations over 50 instances (J <= 4)");
}

void criterion_7() {
    auto rng = make_rng(7007);
    std::size_t violations = 0;
    double worst_rel = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const auto n = 12 + uniform_index(rng, 60);
        const auto d = 1 + uniform_index(rng, 3);
        const auto kp = 2 + uniform_index(rng, 9);
        const auto k = 1 + uniform_index(rng, kp);
        const auto pts = testing::random_matrix(n, d, -5, 5, rng);
        const auto seeds = pts.select_rows(sample_without_replacement(n, kp, rng));
        ClusterModel model;
        model.assignment = assign(pts, seeds);
        model.centers = recompute_centers(pts, model.assignment, seeds);
        model.mode = MetricMode::squared;

        MergeTrace trace;
        const auto out = merge_to_k(model, pts, k, &trace, 1);

        // replay the merges on explicit member lists; every merged center must be the mean of its members
        std::vector<std::vector<std::size_t>> members(kp);
        for (std::size_t i = 0; i < n; ++i) {
            members[model.assignment.cluster_of[i]].push_back(i);
        }
        for (const auto& step : trace.steps) {
            if (step.kept_count != members[step.kept].size() || step.removed_count != members[step.removed].size()) {
                ++violations;
            }
            auto& kept = members[step.kept];
            kept.insert(kept.end(), members[step.removed].begin(), members[step.removed].end());
            members.erase(members.begin() + static_cast<std::ptrdiff_t>(step.removed));
            for (std::size_t f = 0; f < d; ++f) {
                double mean = 0.0;
                for (auto i : kept) {
                    mean += pts(i, f);
                }
                mean /= static_cast<double>(kept.size());
                const double rel = std::abs(step.merged_center[f] - mean) / std::max(1.0, std::abs(mean));
                worst_rel = std::max(worst_rel, rel);
                if (rel > 1e-9) {
                    ++violations;
                }
            }
            std::size_t total = 0;
            for (const auto& m : members) {
                total += m.size();
            }
            if (total != n || step.total_members != n) {
                ++violations;
            }
        }
        if (members.size() != k || trace.steps.size() != kp - k || out.centers.rows() != k ||
            out.assignment.cluster_of.size() != n) {
            ++violations;
        }
    }
    report(7, "merge conservation", violations == 0,
           std::to_string(violations) + " violations over 100 sequences, worst relative center error " + fmt("%.2e", worst_rel));
}

Chromosome with_fitness(double id, double fitness) {
    Chromosome c;
    c.genes = {id};
    c.fitness = fitness;
    c.evaluated = true;
    return c;
}

void criterion_8() {
    auto rng = make_rng(8008);
    bool pass = true;
    std::string detail;

    // roulette: each slot's count within 3 sigma of its binomial expectation over 1e5 draws
    const std::vector<std::vector<double>> wheels{{3, 1}, {1, 1, 1, 1, 1}, {1, 2, 3, 4}};
    for (const auto& weights : wheels) {
        std::vector<Chromosome> pop;
        double total = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            pop.push_back(with_fitness(static_cast<double>(i), weights[i]));
            total += weights[i];
        }
        std::vector<double> counts(weights.size(), 0.0);
        double draws = 0.0;
        while (draws < 1e5) {
            for (const auto& c : roulette_select(pop, rng)) {
                counts[static_cast<std::size_t>(c.genes[0])] += 1.0;
                draws += 1.0;
            }
        }
        double worst_z = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double p = weights[i] / total;
            worst_z = std::max(worst_z, std::abs(counts[i] - draws * p) / std::sqrt(draws * p * (1 - p)));
        }
        pass = pass && worst_z <= 3.0;
        detail += "roulette " + std::to_string(weights.size()) + "-slot max|z|=" + fmt("%.2f", worst_z) + "; ";
    }

    // mutation: touched-gene count over 1e5 chromosomes of 12 genes at pm = 0.001
    const double pm = 0.001;
    const double genes = 1e5 * 12;
    double touched = 0.0;
    double increased = 0.0;
    for (int rep = 0; rep < 100000; ++rep) {
        Chromosome c;
        c.genes.assign(12, 1.0);
        touched += static_cast<double>(mutate(c, pm, rng));
        for (double g : c.genes) {
            increased += g > 1.0 ? 1.0 : 0.0;
        }
    }
    const double z_rate = std::abs(touched - genes * pm) / std::sqrt(genes * pm * (1 - pm));
    const double z_sign = touched > 0 ? std::abs(increased - 0.5 * touched) / std::sqrt(touched * 0.25) : 99.0;
    pass = pass && z_rate <= 3.0 && z_sign <= 3.0;
    detail += "mutation count=" + fmt("%.0f", touched) + " (expected 1200) |z|=" + fmt("%.2f", z_rate) +
              ", sign balance |z|=" + fmt("%.2f", z_sign);
    report(8, "GA operator statistics", pass, detail);
}

// Same shape as the UCI file: class in column 0, 13 binary and 6 numeric attributes, "?" for missing.
void write_hepatitis_standin(const fs::path& path) {
    auto rng = make_rng(155);
    std::ofstream out(path);
    const std::vector<std::size_t> binary_cols{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 19};
    for (int row = 0; row < 155; ++row) {
        const bool dies = row < 32;
        std::vector<std::string> cells(20);
        cells[0] = dies ? "1" : "2";
        auto num = [&](double mu_live, double mu_die, double sd, double lo, double hi, int digits) {
            const double v = std::clamp((dies ? mu_die : mu_live) + sd * testing::normal(rng), lo, hi);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
            return std::string(buf);
        };
        cells[1] = num(40, 48, 12, 7, 78, 0);
        for (auto c : binary_cols) {
            const double p_two = dies ? 0.4 : 0.7;
            cells[c] = uniform01(rng) < p_two ? "2" : "1";
        }
        cells[14] = num(1.0, 2.2, 0.9, 0.3, 8.0, 2);
        cells[15] = num(95, 125, 45, 26, 295, 0);
        cells[16] = num(75, 110, 80, 14, 648, 0);
        cells[17] = num(4.0, 3.3, 0.55, 2.1, 6.4, 1);
        cells[18] = num(65, 45, 20, 0, 100, 0);
        // missing values concentrated where the original file has them
        const std::vector<std::pair<std::size_t, double>> holes{{15, 0.19}, {18, 0.43}, {16, 0.03}, {17, 0.10},
                                                                {14, 0.04}, {7, 0.06},  {8, 0.07}, {4, 0.01}};
        for (const auto& [c, p] : holes) {
            if (uniform01(rng) < p) {
                cells[c] = "?";
            }
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            out << (c ? "," : "") << cells[c];
        }
        out << '\n';
    }
}

void criterion_9() {
    const std::string real_path = IGK_HEPATITIS_CSV;
    const bool have_real = !real_path.empty() && fs::exists(real_path);
    std::string path = real_path;
    if (!have_real) {
        path = (scratch_dir() / "hepatitis_standin.csv").string();
        write_hepatitis_standin(path);
    }

    DatasetSpec spec;
    spec.path = path;
    spec.csv.label_column = 0;
    spec.impute = true;
    const auto raw = load_csv(path, spec.csv);
    const auto imputed = impute_local_mean(raw);
    const auto pca = pca_fit(imputed, 0.98);
    const std::size_t r = pca.output_dims();
    const double captured = pca.captured_variance_ratio();

    spec.pca_threshold = 0.98;
    auto config = base_config(2, {Algorithm::kmeans, Algorithm::igk}, 5);
    config.dataset = spec;
    config.ga.generations = 10;
    std::ostringstream first;
    std::ostringstream second;
    const auto table = run_experiment(config);
    emit_csv(table, first);
    emit_csv(run_experiment(config), second);
    const double km = column_average(table, "kmeans");
    const double igk = column_average(table, "igk");

    const bool shape_ok = raw.size() == 155 && raw.dims() == 19 && raw.has_missing() && !imputed.has_missing();
    const bool pipeline_ok = shape_ok && captured >= 0.98 && first.str() == second.str() && igk <= 1.02 * km;
    const std::string detail = "rows=" + std::to_string(raw.size()) + " attrs=" + std::to_string(raw.dims()) +
                               " pca r=" + std::to_string(r) + " captured=" + fmt("%.4f", captured) + " avg igk=" +
                               fmt("%.6g", igk) + " kmeans=" + fmt("%.6g", km) +
                               (first.str() == second.str() ? " deterministic" : " NOT deterministic");
    if (have_real) {
        report(9, "hepatitis pipeline", pipeline_ok, detail + (r == 6 ? " (r matches 6)" : " (measured r differs from 6)"));
    } else if (!pipeline_ok) {
        report(9, "hepatitis pipeline", false, "stand-in data: " + detail);
    } else {
        report_unverified(9, "hepatitis pipeline",
                          "UCI file not provided (set IGK_HEPATITIS_CSV); pipeline checks hold on a synthetic stand-in: " + detail);
    }
}

void criterion_10() {
    const auto dir = scratch_dir();
    const auto config = dir / "determinism.cfg";
    {
        std::ofstream f(config);
        f << "data=" << IGK_TEST_DATA_DIR << "/iris.csv\nlabel-col=4\nheader=true\nk=3\ntrials=3\ngenerations=20\n";
    }
    auto run = [&](const fs::path& out) {
        const std::vector<std::string> args{"igk", "run", "--config", config.string(), "--out", out.string()};
        std::ostringstream sink;
        return cli_main(args, sink, sink);
    };
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    const int rc_a = run(a);
    const int rc_b = run(b);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto bytes_a = slurp(a);
    const bool same = rc_a == 0 && rc_b == 0 && !bytes_a.empty() && bytes_a == slurp(b);
    report(10, "CSV determinism", same, std::to_string(bytes_a.size()) + " bytes, " + (same ? "identical" : "differ"));
}

} // namespace

int main() {
    try {
        const auto iris = load_iris();
        criterion_1(iris);
        criterion_2(iris);
        criterion_3(iris);
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
        criterion_10();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%d criterion failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
