#include "loophole/linalg.hpp"

namespace loophole {

std::size_t rank(RatMatrix m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && m.at(pivot, c).is_zero()) ++pivot;
        if (pivot == rows) continue;
        if (pivot != r)
            for (std::size_t j = c; j < cols; ++j) std::swap(m.at(r, j), m.at(pivot, j));
        const Rational inv = Rational(1) / m.at(r, c);
        for (std::size_t j = c; j < cols; ++j) m.at(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m.at(i, c).is_zero()) continue;
            const Rational f = m.at(i, c);
            for (std::size_t j = c; j < cols; ++j) m.at(i, j).submul(f, m.at(r, j));
        }
        ++r;
    }
    return r;
}

}  // namespace loophole
