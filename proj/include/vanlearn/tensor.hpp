#pragma once

// Dense 1D / 2D numeric containers for the learning algorithms.
//
// Both types are immutable values once built: constructors reject NaN/Inf so
// nothing downstream has to re-check finiteness. Storage is row-major and all
// reductions accumulate left to right, so results are bit-reproducible.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vanlearn/error.hpp"

namespace vanlearn {

namespace detail {
inline void require_finite(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw Error(errc::non_finite, "non-finite value at flat index " + std::to_string(i));
    }
}
}  // namespace detail

class Vector {
public:
    Vector() = default;

    explicit Vector(std::vector<double> values) : values_(std::move(values)) {
        detail::require_finite(values_);
    }

    Vector(std::initializer_list<double> values) : Vector(std::vector<double>(values)) {}

    static Vector zeros(std::size_t len) { return Vector(std::vector<double>(len, 0.0)); }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& to_std() const noexcept { return values_; }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> values_;
};

class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_)
            throw Error(errc::shape, "matrix storage does not match " + std::to_string(rows_) + "x" +
                                         std::to_string(cols_));
        detail::require_finite(values_);
    }

    static Matrix zeros(std::size_t rows, std::size_t cols) {
        return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
    }

    static Matrix identity(std::size_t n) {
        std::vector<double> v(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
        return Matrix(n, n, std::move(v));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * cols_, cols_);
    }

    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

inline Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix{};
    const std::size_t width = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * width);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width)
            throw Error(errc::ragged, "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                          " values, expected " + std::to_string(width));
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return Matrix(rows.size(), width, std::move(flat));
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw Error(errc::shape, "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                     " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    std::vector<double> out(a.rows() * b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out[i * b.cols() + j] = acc;
        }
    }
    return Matrix(a.rows(), b.cols(), std::move(out));
}

inline Matrix transpose(const Matrix& a) {
    std::vector<double> out(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[j * a.rows() + i] = a(i, j);
    return Matrix(a.cols(), a.rows(), std::move(out));
}

inline Vector column_means(const Matrix& a) {
    if (a.rows() == 0) throw Error(errc::empty, "column_means of a matrix with no rows");
    std::vector<double> sums(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) sums[j] += a(i, j);
    for (double& s : sums) s /= static_cast<double>(a.rows());
    return Vector(std::move(sums));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace vanlearn
