#ifndef IGK_DATASET_HPP
#define IGK_DATASET_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "core.hpp"

/**
 * @file dataset.hpp
 * @brief Dataset model, CSV ingestion, local-mean imputation and balanced subsampling.
 */

namespace igk {

/**
 * n observations by d features, with optional class labels and a missing-value mask.
 * `missing` is row-major with the same shape as `points`; a true entry means the
 * corresponding value in `points` is a placeholder (0) and must not be used.
 */
struct Dataset {
    std::string name;
    Matrix points;
    std::optional<std::vector<std::string>> labels;
    std::vector<bool> missing;
    std::vector<std::string> feature_names;

    std::size_t size() const { return points.rows(); }
    std::size_t dims() const { return points.cols(); }

    bool is_missing(std::size_t r, std::size_t c) const { return !missing.empty() && missing[r * points.cols() + c]; }

    bool has_missing() const {
        for (bool m : missing) {
            if (m) {
                return true;
            }
        }
        return false;
    }

    /// Throws `DimensionError` when any structural invariant is broken.
    void validate() const {
        if (points.rows() == 0 || points.cols() == 0) {
            throw DimensionError("dataset '" + name + "' is empty");
        }
        if (!missing.empty() && missing.size() != points.rows() * points.cols()) {
            throw DimensionError("missing-value mask does not match the point matrix");
        }
        if (labels && labels->size() != points.rows()) {
            throw DimensionError("dataset has " + std::to_string(points.rows()) + " rows but " + std::to_string(labels->size()) + " labels");
        }
        if (!feature_names.empty() && feature_names.size() != points.cols()) {
            throw DimensionError("feature name count does not match column count");
        }
    }

    /// Number of distinct label values (0 when unlabelled).
    std::size_t num_classes() const {
        if (!labels) {
            return 0;
        }
        std::map<std::string, int> seen;
        for (const auto& l : *labels) {
            seen[l] = 0;
        }
        return seen.size();
    }
};

struct CsvOptions {
    std::optional<std::size_t> label_column;
    std::string missing_token = "?";
    bool has_header = false;
    char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc() || ptr != end || cell.empty() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

/// Shortest representation that reads back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

} // namespace detail

/**
 * Parse delimited text into a dataset.
 * Cells equal to `options.missing_token` are recorded in the mask and stored as 0.
 * The label column, if any, is kept verbatim as strings and excluded from the points.
 * Blank lines are skipped.
 */
inline Dataset parse_csv(std::istream& in, const CsvOptions& options = {}, std::string name = "data") {
    Dataset out;
    out.name = std::move(name);
    std::vector<double> values;
    std::vector<std::string> labels;
    std::optional<std::size_t> width;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split(line, options.delimiter);
        if (!width) {
            width = cells.size();
            if (options.label_column && *options.label_column >= *width) {
                throw ParseError("label column " + std::to_string(*options.label_column) + " is out of range for " +
                                 std::to_string(*width) + " columns");
            }
        } else if (cells.size() != *width) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(*width) + " columns, found " +
                             std::to_string(cells.size()));
        }

        if (header_pending) {
            header_pending = false;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (!options.label_column || c != *options.label_column) {
                    out.feature_names.emplace_back(cells[c]);
                }
            }
            continue;
        }

        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (options.label_column && c == *options.label_column) {
                labels.emplace_back(cells[c]);
                continue;
            }
            if (cells[c] == options.missing_token) {
                values.push_back(0.0);
                out.missing.push_back(true);
                continue;
            }
            const auto parsed = detail::parse_double(cells[c]);
            if (!parsed) {
                throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(c) + ": cannot parse '" +
                                 std::string(cells[c]) + "' as a number");
            }
            values.push_back(*parsed);
            out.missing.push_back(false);
        }
    }

    if (!width || values.empty()) {
        throw ParseError("no data rows in '" + out.name + "'");
    }
    const std::size_t cols = *width - (options.label_column ? 1 : 0);
    if (cols == 0) {
        throw ParseError("no feature columns in '" + out.name + "'");
    }
    const std::size_t rows = values.size() / cols;
    out.points = Matrix(rows, cols, std::move(values));
    if (options.label_column) {
        out.labels = std::move(labels);
    }
    out.validate();
    return out;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "' for reading");
    }
    auto name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
        name = name.substr(slash + 1);
    }
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) {
        name = name.substr(0, dot);
    }
    return parse_csv(in, options, name);
}

/// Writes features (then the label, as the last column, when present). Missing cells use `missing_token`.
inline void write_csv(const Dataset& data, std::ostream& out, bool header = false, const std::string& missing_token = "?") {
    if (header) {
        for (std::size_t c = 0; c < data.dims(); ++c) {
            out << (c ? "," : "") << (data.feature_names.empty() ? "x" + std::to_string(c) : data.feature_names[c]);
        }
        if (data.labels) {
            out << ",label";
        }
        out << '\n';
    }
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t c = 0; c < data.dims(); ++c) {
            out << (c ? "," : "") << (data.is_missing(r, c) ? missing_token : detail::format_double(data.points(r, c)));
        }
        if (data.labels) {
            out << ',' << (*data.labels)[r];
        }
        out << '\n';
    }
}

/**
 * Replace each missing value with the mean of its feature over rows of the same class.
 * Falls back to the global feature mean when the row is unlabelled or no other
 * same-class row has that feature. Throws when a feature has no observed value at all.
 */
inline Dataset impute_local_mean(const Dataset& data) {
    data.validate();
    Dataset out = data;
    if (!data.has_missing()) {
        out.missing.assign(data.size() * data.dims(), false);
        return out;
    }

    const auto n = data.size();
    const auto d = data.dims();
    for (std::size_t c = 0; c < d; ++c) {
        double global_sum = 0.0;
        std::size_t global_count = 0;
        std::map<std::string, std::pair<double, std::size_t>> by_class;
        for (std::size_t r = 0; r < n; ++r) {
            if (data.is_missing(r, c)) {
                continue;
            }
            global_sum += data.points(r, c);
            ++global_count;
            if (data.labels) {
                auto& acc = by_class[(*data.labels)[r]];
                acc.first += data.points(r, c);
                ++acc.second;
            }
        }
        if (global_count == 0) {
            throw InvalidArgument("feature " + std::to_string(c) + " has no observed values; no mean exists");
        }
        const double global_mean = global_sum / static_cast<double>(global_count);

        for (std::size_t r = 0; r < n; ++r) {
            if (!data.is_missing(r, c)) {
                continue;
            }
            double fill = global_mean;
            if (data.labels) {
                const auto it = by_class.find((*data.labels)[r]);
                if (it != by_class.end() && it->second.second > 0) {
                    fill = it->second.first / static_cast<double>(it->second.second);
                }
            }
            out.points(r, c) = fill;
        }
    }
    out.missing.assign(n * d, false);
    return out;
}

/// Rows at `indices`, in that order, with labels and mask carried along.
inline Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
    Dataset out;
    out.name = data.name;
    out.feature_names = data.feature_names;
    out.points = data.points.select_rows(indices);
    if (data.labels) {
        std::vector<std::string> labels;
        labels.reserve(indices.size());
        for (auto i : indices) {
            labels.push_back((*data.labels)[i]);
        }
        out.labels = std::move(labels);
    }
    if (!data.missing.empty()) {
        out.missing.reserve(indices.size() * data.dims());
        for (auto i : indices) {
            for (std::size_t c = 0; c < data.dims(); ++c) {
                out.missing.push_back(data.is_missing(i, c));
            }
        }
    }
    return out;
}

/// Keep only the listed feature columns, in the listed order.
inline Dataset select_columns(const Dataset& data, std::span<const std::size_t> columns) {
    if (columns.empty()) {
        throw InvalidArgument("column selection is empty");
    }
    Dataset out;
    out.name = data.name;
    out.labels = data.labels;
    out.points = Matrix(data.size(), columns.size());
    if (!data.missing.empty()) {
        out.missing.resize(data.size() * columns.size());
    }
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] >= data.dims()) {
            throw DimensionError("column " + std::to_string(columns[j]) + " out of range for " + std::to_string(data.dims()) + " features");
        }
        if (!data.feature_names.empty()) {
            out.feature_names.push_back(data.feature_names[columns[j]]);
        }
        for (std::size_t r = 0; r < data.size(); ++r) {
            out.points(r, j) = data.points(r, columns[j]);
            if (!data.missing.empty()) {
                out.missing[r * columns.size() + j] = data.is_missing(r, columns[j]);
            }
        }
    }
    return out;
}

/**
 * Shuffle [0, n) and cut it into `parts` contiguous blocks. The first n mod parts blocks
 * hold ceil(n / parts) indices, the rest floor(n / parts); the blocks partition [0, n).
 */
inline std::vector<std::vector<std::size_t>> partition_indices(std::size_t n, std::size_t parts, Rng& rng) {
    if (parts == 0) {
        throw InvalidArgument("number of subsamples must be at least 1");
    }
    if (parts > n) {
        throw InvalidArgument("cannot draw " + std::to_string(parts) + " non-empty subsamples from " + std::to_string(n) + " rows");
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    shuffle(order, rng);

    std::vector<std::vector<std::size_t>> blocks(parts);
    const auto base = n / parts;
    const auto extra = n % parts;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < parts; ++b) {
        const auto len = base + (b < extra ? 1 : 0);
        blocks[b].assign(order.begin() + static_cast<std::ptrdiff_t>(pos), order.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return blocks;
}

struct Subsample {
    std::vector<std::size_t> indices;
    Dataset data;
};

/// J disjoint, balanced subsamples whose union is the whole dataset.
inline std::vector<Subsample> draw_subsamples(const Dataset& data, std::size_t j, Rng& rng) {
    auto blocks = partition_indices(data.size(), j, rng);
    std::vector<Subsample> out;
    out.reserve(blocks.size());
    for (auto& block : blocks) {
        auto sub = subset(data, block);
        out.push_back({std::move(block), std::move(sub)});
    }
    return out;
}

} // namespace igk

#endif
