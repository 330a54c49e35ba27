#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace anonet {

/// Dense row-major matrix of 64-bit reals. The sole numeric container for
/// parameters, activations and gradients.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    Matrix(const Matrix&) = default;
    Matrix& operator=(const Matrix&) = default;
    // Moved-from matrices become empty so data.size() == rows * cols always.
    Matrix(Matrix&& other) noexcept
        : rows(other.rows), cols(other.cols), data(std::move(other.data)) {
        other.rows = other.cols = 0;
        other.data.clear();
    }
    Matrix& operator=(Matrix&& other) noexcept {
        if (this != &other) {
            rows = other.rows;
            cols = other.cols;
            data = std::move(other.data);
            other.rows = other.cols = 0;
            other.data.clear();
        }
        return *this;
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
    bool all_finite() const;

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool operator==(const Matrix& other) const {
        return rows == other.rows && cols == other.cols && data == other.data;
    }
};

Matrix transpose(const Matrix& a);

}  // namespace anonet
