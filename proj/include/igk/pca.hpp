#ifndef IGK_PCA_HPP
#define IGK_PCA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "dataset.hpp"

/**
 * @file pca.hpp
 * @brief Principal component reduction on the covariance of centered data.
 */

namespace igk {

struct PcaModel {
    /// d x r, one orthonormal component per column, ordered by decreasing variance.
    Matrix components;
    /// Fraction of total variance captured by each retained component.
    std::vector<double> explained_variance_ratio;
    /// All d eigenvalues of the covariance, descending.
    std::vector<double> eigenvalues;
    std::vector<double> mean;
    /// Per-feature divisor applied after centering (all ones unless standardized).
    std::vector<double> scale;
    double total_variance = 0.0;

    std::size_t input_dims() const { return mean.size(); }
    std::size_t output_dims() const { return components.cols(); }

    double captured_variance_ratio() const {
        return std::accumulate(explained_variance_ratio.begin(), explained_variance_ratio.end(), 0.0);
    }
};

/**
 * Fit on complete data and keep the fewest components whose cumulative explained
 * variance reaches `variance_threshold`. With `standardize`, features are scaled to
 * unit variance first (correlation PCA).
 */
inline PcaModel pca_fit(const Dataset& data, double variance_threshold, bool standardize = false) {
    data.validate();
    if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
        throw InvalidArgument("variance threshold must lie in (0, 1]");
    }
    if (data.has_missing()) {
        throw InvalidArgument("PCA requires imputed data");
    }
    const auto n = data.size();
    const auto d = data.dims();
    if (n < 2) {
        throw InvalidArgument("PCA needs at least two observations");
    }

    PcaModel model;
    model.mean.assign(d, 0.0);
    model.scale.assign(d, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            model.mean[c] += data.points(r, c);
        }
    }
    for (auto& m : model.mean) {
        m /= static_cast<double>(n);
    }

    Eigen::MatrixXd centered(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            centered(r, c) = data.points(r, c) - model.mean[c];
        }
    }
    if (standardize) {
        for (std::size_t c = 0; c < d; ++c) {
            const double sd = std::sqrt(centered.col(c).squaredNorm() / static_cast<double>(n - 1));
            if (sd > 0.0) {
                model.scale[c] = sd;
                centered.col(c) /= sd;
            }
        }
    }

    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error("covariance eigendecomposition failed");
    }

    // Eigen returns ascending eigenvalues.
    model.eigenvalues.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        model.eigenvalues[i] = std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(d - 1 - i)));
    }
    model.total_variance = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
    if (!(model.total_variance > 0.0)) {
        throw InvalidArgument("dataset has zero variance");
    }

    std::size_t keep = d;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        cumulative += model.eigenvalues[i] / model.total_variance;
        if (cumulative >= variance_threshold - 1e-12) {
            keep = i + 1;
            break;
        }
    }

    model.components = Matrix(d, keep);
    for (std::size_t j = 0; j < keep; ++j) {
        const auto col = static_cast<Eigen::Index>(d - 1 - j);
        // Sign convention: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        solver.eigenvectors().col(col).cwiseAbs().maxCoeff(&arg);
        const double sign = solver.eigenvectors()(arg, col) < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < d; ++c) {
            model.components(c, j) = sign * solver.eigenvectors()(static_cast<Eigen::Index>(c), col);
        }
        model.explained_variance_ratio.push_back(model.eigenvalues[j] / model.total_variance);
    }
    return model;
}

/// Center (and scale), then project onto the retained components. Labels carry over.
inline Dataset pca_transform(const PcaModel& model, const Dataset& data) {
    if (data.dims() != model.input_dims()) {
        throw DimensionError("PCA model expects " + std::to_string(model.input_dims()) + " features, data has " +
                             std::to_string(data.dims()));
    }
    const auto r = model.output_dims();
    Dataset out;
    out.name = data.name;
    out.labels = data.labels;
    out.points = Matrix(data.size(), r);
    out.missing.assign(data.size() * r, false);
    for (std::size_t j = 0; j < r; ++j) {
        out.feature_names.push_back("pc" + std::to_string(j + 1));
    }
    std::vector<double> centered(data.dims());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t c = 0; c < data.dims(); ++c) {
            centered[c] = (data.points(i, c) - model.mean[c]) / model.scale[c];
        }
        for (std::size_t j = 0; j < r; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < data.dims(); ++c) {
                acc += centered[c] * model.components(c, j);
            }
            out.points(i, j) = acc;
        }
    }
    return out;
}

/// Map projected coordinates back into the original feature space.
inline Matrix pca_reconstruct(const PcaModel& model, const Matrix& projected) {
    if (projected.cols() != model.output_dims()) {
        throw DimensionError("projected data has the wrong number of components");
    }
    const auto d = model.input_dims();
    Matrix out(projected.rows(), d);
    for (std::size_t i = 0; i < projected.rows(); ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < model.output_dims(); ++j) {
                acc += projected(i, j) * model.components(c, j);
            }
            out(i, c) = acc * model.scale[c] + model.mean[c];
        }
    }
    return out;
}

} // namespace igk

#endif
