#pragma once

#include <cstddef>
#include <vector>

#include "loophole/rational.hpp"

namespace loophole {

/// Dense rational matrix, row-major.
class RatMatrix {
public:
    RatMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

/// Rank over the rationals by Gaussian elimination (exact, destructive copy).
std::size_t rank(RatMatrix m);

}  // namespace loophole
