#ifndef IGK_CORE_HPP
#define IGK_CORE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

/**
 * @file core.hpp
 * @brief Error types, the dense row-major matrix and the seeded random helpers shared by every module.
 */

namespace igk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file content (carries row/column context in the message).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Operands whose shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A precondition on an argument value was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/**
 * Dense row-major matrix of doubles. Rows are observations (or centers), columns are features.
 */
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values) : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            throw DimensionError("matrix storage holds " + std::to_string(values_.size()) + " values, expected " +
                                 std::to_string(rows_ * cols_));
        }
    }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) {
            return {};
        }
        const auto cols = rows.front().size();
        Matrix out(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) {
                throw DimensionError("ragged row " + std::to_string(i) + " in matrix literal");
            }
            std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
        }
        return out;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// Copy of the selected rows, in the given order.
    Matrix select_rows(std::span<const std::size_t> indices) const {
        Matrix out(indices.size(), cols_);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] >= rows_) {
                throw DimensionError("row index " + std::to_string(indices[i]) + " out of range");
            }
            const auto src = row(indices[i]);
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Every stochastic routine draws from this engine; nothing reads ambient entropy.
using Rng = std::mt19937_64;

/**
 * Engine for an independent stream derived from a base seed.
 * The same (seed, stream) pair yields the same sequence on every platform since
 * both `std::seed_seq` and `std::mt19937_64` are fully specified by the standard.
 */
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

// The standard distributions are implementation-defined, so uniform draws are
// derived from raw engine output to keep seeded runs identical across toolchains.

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound).
inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
    if (bound == 0) {
        throw InvalidArgument("uniform_index requires a positive bound");
    }
    const std::uint64_t b = bound;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % b;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return static_cast<std::size_t>(draw % b);
}

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::swap(values[i - 1], values[uniform_index(rng, i)]);
    }
}

/// `count` distinct indices from [0, population), uniformly without replacement, in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count, Rng& rng) {
    if (count > population) {
        throw InvalidArgument("cannot sample " + std::to_string(count) + " distinct indices from " + std::to_string(population));
    }
    std::vector<std::size_t> pool(population);
    for (std::size_t i = 0; i < population; ++i) {
        pool[i] = i;
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(pool[i], pool[i + uniform_index(rng, population - i)]);
    }
    pool.resize(count);
    return pool;
}

} // namespace igk

#endif
