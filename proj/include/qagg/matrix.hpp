#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qagg {

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<double> row(std::size_t i) { return {&data[i * cols], cols}; }
    std::span<const double> row(std::size_t i) const { return {&data[i * cols], cols}; }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (idx[r] >= rows) throw std::out_of_range("Matrix::select_rows");
            for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = at(idx[r], c);
        }
        return out;
    }
};

} // namespace qagg
