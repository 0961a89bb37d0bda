#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mivspool {

// Dense row-major matrix of 64-bit floats. Used for vertex features.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

inline Matrix constant_features(std::size_t n, double value = 1.0) { return Matrix(n, 1, value); }

}  // namespace mivspool
