#include "loophole/vertices.hpp"

#include <bit>
#include <exception>
#include <sstream>
#include <stdexcept>

#include "loophole/linalg.hpp"
#include "loophole/lp.hpp"

namespace loophole {

GFunction::GFunction(int rows, int cols)
    : rows_(rows), cols_(cols), bits_(static_cast<std::size_t>(rows) * cols, 0) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("GFunction: needs at least 2x2");
}

GFunction::GFunction(int rows, int cols, std::vector<std::uint8_t> bits)
    : GFunction(rows, cols) {
    if (bits.size() != bits_.size()) throw std::invalid_argument("GFunction: dimension mismatch");
    for (std::size_t i = 0; i < bits.size(); ++i) bits_[i] = bits[i] ? 1 : 0;
}

std::uint64_t GFunction::mask() const {
    if (bits_.size() > 64) throw std::invalid_argument("GFunction: too large for mask");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) m |= std::uint64_t(1) << i;
    return m;
}

GFunction GFunction::from_mask(int rows, int cols, std::uint64_t mask) {
    GFunction g(rows, cols);
    for (std::size_t i = 0; i < g.bits_.size(); ++i) g.bits_[i] = (mask >> i) & 1;
    return g;
}

bool GFunction::columns_equal(int y1, int y2) const {
    for (int x = 0; x < rows_; ++x)
        if (at(x, y1) != at(x, y2)) return false;
    return true;
}

bool GFunction::has_duplicate_columns() const {
    for (int y1 = 0; y1 < cols_; ++y1)
        for (int y2 = y1 + 1; y2 < cols_; ++y2)
            if (columns_equal(y1, y2)) return true;
    return false;
}

bool GFunction::columns_equal_or_complementary(int y1, int y2) const {
    const std::uint8_t d = at(0, y1) ^ at(0, y2);
    for (int x = 1; x < rows_; ++x)
        if ((at(x, y1) ^ at(x, y2)) != d) return false;
    return true;
}

bool GFunction::has_aliased_column_pair() const {
    for (int y1 = 0; y1 < cols_; ++y1)
        for (int y2 = y1 + 1; y2 < cols_; ++y2)
            if (columns_equal_or_complementary(y1, y2)) return true;
    return false;
}

GFunction GFunction::parse(const std::string& text) {
    std::vector<std::vector<std::uint8_t>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<std::uint8_t> row;
        int v;
        while (ls >> v) {
            if (v != 0 && v != 1) throw std::invalid_argument("GFunction: entries must be 0 or 1");
            row.push_back(static_cast<std::uint8_t>(v));
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("GFunction: empty matrix");
    const std::size_t cols = rows.front().size();
    std::vector<std::uint8_t> bits;
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("GFunction: ragged rows");
        bits.insert(bits.end(), r.begin(), r.end());
    }
    return GFunction(static_cast<int>(rows.size()), static_cast<int>(cols), std::move(bits));
}

std::string GFunction::format() const {
    std::ostringstream os;
    for (int x = 0; x < rows_; ++x) {
        for (int y = 0; y < cols_; ++y) os << (y ? " " : "") << int(at(x, y));
        os << "\n";
    }
    return os.str();
}

DeterministicVertices::DeterministicVertices(Scenario scenario) : scenario_(scenario), size_(1) {
    for (int x = 0; x < scenario_.mA; ++x) {
        if (size_ > UINT64_MAX / static_cast<std::uint64_t>(scenario_.nA))
            throw std::overflow_error("DeterministicVertices: count overflow");
        size_ *= scenario_.nA;
    }
    for (int y = 0; y < scenario_.mB; ++y) {
        if (size_ > UINT64_MAX / static_cast<std::uint64_t>(scenario_.nB))
            throw std::overflow_error("DeterministicVertices: count overflow");
        size_ *= scenario_.nB;
    }
}

void DeterministicVertices::assignment(std::uint64_t idx, std::vector<int>& a_of_x,
                                       std::vector<int>& b_of_y) const {
    a_of_x.resize(scenario_.mA);
    b_of_y.resize(scenario_.mB);
    for (int y = scenario_.mB - 1; y >= 0; --y) {
        b_of_y[y] = static_cast<int>(idx % scenario_.nB);
        idx /= scenario_.nB;
    }
    for (int x = scenario_.mA - 1; x >= 0; --x) {
        a_of_x[x] = static_cast<int>(idx % scenario_.nA);
        idx /= scenario_.nA;
    }
}

std::uint64_t DeterministicVertices::index_of(const std::vector<int>& a_of_x,
                                              const std::vector<int>& b_of_y) const {
    std::uint64_t idx = 0;
    for (int x = 0; x < scenario_.mA; ++x) idx = idx * scenario_.nA + a_of_x[x];
    for (int y = 0; y < scenario_.mB; ++y) idx = idx * scenario_.nB + b_of_y[y];
    return idx;
}

Distribution DeterministicVertices::at(std::uint64_t idx) const {
    std::vector<int> a_of_x, b_of_y;
    assignment(idx, a_of_x, b_of_y);
    std::vector<Rational> t(scenario_.table_size());
    for (int x = 0; x < scenario_.mA; ++x)
        for (int y = 0; y < scenario_.mB; ++y)
            t[scenario_.index(x, y, a_of_x[x], b_of_y[y])] = Rational(1);
    return Distribution(scenario_, std::move(t));
}

Distribution from_g_function(const GFunction& g) {
    const Scenario sc(g.rows(), g.cols(), 2, 2);
    const Rational half(1, 2);
    std::vector<Rational> t(sc.table_size());
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y)
            for (int a = 0; a < 2; ++a) {
                const int b = a ^ g.at(x, y);
                t[sc.index(x, y, a, b)] = half;
            }
    return Distribution(sc, std::move(t));
}

std::optional<GFunction> g_function_of(const Distribution& p) {
    const Scenario& sc = p.scenario();
    if (sc.nA != 2 || sc.nB != 2) return std::nullopt;
    const Rational half(1, 2);
    GFunction g(sc.mA, sc.mB);
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            const bool correlated = p(x, y, 0, 0) == half && p(x, y, 1, 1) == half &&
                                    p(x, y, 0, 1).is_zero() && p(x, y, 1, 0).is_zero();
            const bool anti = p(x, y, 0, 1) == half && p(x, y, 1, 0) == half &&
                              p(x, y, 0, 0).is_zero() && p(x, y, 1, 1).is_zero();
            if (!correlated && !anti) return std::nullopt;
            g.set(x, y, anti ? 1 : 0);
        }
    return g;
}

GFunction generalized_pr_g(int mA, int mB) {
    GFunction g(mA, mB);
    for (int x = 0; x < mA; ++x)
        for (int y = 0; y < mB; ++y)
            g.set(x, y, std::popcount(static_cast<unsigned>(x) & static_cast<unsigned>(y)) & 1);
    return g;
}

Distribution generalized_pr_box(int mA, int mB) {
    return from_g_function(generalized_pr_g(mA, mB));
}

Distribution block_extremal(const Scenario& sc, const BlockSpec& spec) {
    if (sc.nA != 2 || sc.nB != 2)
        throw std::invalid_argument("block_extremal: scenario must have binary outcomes");
    if (spec.g < 0 || spec.g > sc.mB - 2 || spec.h < 0 || spec.h > sc.mA - 2)
        throw std::invalid_argument("block_extremal: g/h out of range");
    const int core_rows = sc.mA - 1 - spec.h, core_cols = sc.mB - 1 - spec.g;
    if (static_cast<int>(spec.core.size()) != core_rows)
        throw std::invalid_argument("block_extremal: core row count mismatch");
    for (const auto& row : spec.core)
        if (static_cast<int>(row.size()) != core_cols)
            throw std::invalid_argument("block_extremal: core column count mismatch");

    const Rational half(1, 2), one(1);
    std::vector<Rational> t(sc.table_size());
    auto put = [&](int x, int y, int a, int b, const Rational& v) { t[sc.index(x, y, a, b)] = v; };
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            const bool x_appended = x >= sc.mA - spec.h;
            const bool y_appended = y >= sc.mB - spec.g;
            if (x_appended && y_appended) {         // M: both deterministic 0
                put(x, y, 0, 0, one);
            } else if (x_appended) {                // K: Alice deterministic, Bob uniform
                put(x, y, 0, 0, half);
                put(x, y, 0, 1, half);
            } else if (y_appended) {                // L: Bob deterministic, Alice uniform
                put(x, y, 0, 0, half);
                put(x, y, 1, 0, half);
            } else {
                const bool anti = x > 0 && y > 0 && spec.core[x - 1][y - 1];
                put(x, y, 0, anti ? 1 : 0, half);
                put(x, y, 1, anti ? 0 : 1, half);
            }
        }
    return Distribution(sc, std::move(t));
}

bool is_vertex(const Distribution& p) {
    require_valid(p, "is_vertex");
    const Scenario& sc = p.scenario();
    const std::size_t n = sc.table_size();

    // Variables pinned by an active positivity constraint drop out; the point
    // is extremal iff the equality system restricted to the remaining
    // coordinates has full column rank.
    std::vector<std::size_t> col_of(n, SIZE_MAX);
    std::size_t free_cols = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!p.table()[i].is_zero()) col_of[i] = free_cols++;
    if (free_cols == 0) return false;

    const std::size_t norm_rows = static_cast<std::size_t>(sc.mA) * sc.mB;
    const std::size_t ns_rows_a = static_cast<std::size_t>(sc.mA) * sc.nA * (sc.mB - 1);
    const std::size_t ns_rows_b = static_cast<std::size_t>(sc.mB) * sc.nB * (sc.mA - 1);
    RatMatrix m(norm_rows + ns_rows_a + ns_rows_b, free_cols);
    std::size_t r = 0;
    auto add = [&](std::size_t flat, int v) {
        if (col_of[flat] != SIZE_MAX) m.at(r, col_of[flat]) += Rational(v);
    };
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            for (int a = 0; a < sc.nA; ++a)
                for (int b = 0; b < sc.nB; ++b) add(sc.index(x, y, a, b), 1);
            ++r;
        }
    for (int x = 0; x < sc.mA; ++x)
        for (int a = 0; a < sc.nA; ++a)
            for (int y = 1; y < sc.mB; ++y) {
                for (int b = 0; b < sc.nB; ++b) {
                    add(sc.index(x, y, a, b), 1);
                    add(sc.index(x, 0, a, b), -1);
                }
                ++r;
            }
    for (int y = 0; y < sc.mB; ++y)
        for (int b = 0; b < sc.nB; ++b)
            for (int x = 1; x < sc.mA; ++x) {
                for (int a = 0; a < sc.nA; ++a) {
                    add(sc.index(x, y, a, b), 1);
                    add(sc.index(0, y, a, b), -1);
                }
                ++r;
            }
    return rank(std::move(m)) == free_cols;
}

std::vector<Distribution> enumerate_binary_extremals(int mA, int mB, std::uint64_t cap,
                                                     Exec exec) {
    if (mA < 2 || mB < 2) throw std::invalid_argument("enumerate_binary_extremals: mA, mB >= 2");
    const int cells = mA * mB;
    if (cells >= 63 || (std::uint64_t(1) << cells) > cap)
        throw std::invalid_argument("enumerate_binary_extremals: candidate count exceeds cap");
    const std::uint64_t total = std::uint64_t(1) << cells;

    std::vector<std::uint8_t> keep(total, 0);
    auto check = [&](std::uint64_t mask) {
        const Distribution box = from_g_function(GFunction::from_mask(mA, mB, mask));
        if (!is_vertex(box)) return false;
        return lp::local_weight(box).w < Rational(1);
    };
    if (exec == Exec::Serial) {
        for (std::uint64_t mask = 0; mask < total; ++mask) keep[mask] = check(mask);
    } else {
        std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(total); ++mask) {
            try {
                keep[mask] = check(static_cast<std::uint64_t>(mask));
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }

    // Deterministic merge in mask order; masks are already pairwise-distinct
    // tables, so equality dedup is a no-op kept for the contract.
    std::vector<Distribution> out;
    for (std::uint64_t mask = 0; mask < total; ++mask)
        if (keep[mask]) out.push_back(from_g_function(GFunction::from_mask(mA, mB, mask)));
    return out;
}

}  // namespace loophole
