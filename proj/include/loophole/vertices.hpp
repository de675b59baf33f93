#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loophole/core.hpp"
#include "loophole/exec.hpp"

namespace loophole {

/// Binary correlation-target matrix: a box with p(ab|xy) = 1/2 exactly when
/// a xor b = G(x,y).
class GFunction {
public:
    GFunction(int rows, int cols);
    GFunction(int rows, int cols, std::vector<std::uint8_t> bits);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::uint8_t at(int x, int y) const { return bits_[static_cast<std::size_t>(x) * cols_ + y]; }
    void set(int x, int y, std::uint8_t v) { bits_[static_cast<std::size_t>(x) * cols_ + y] = v ? 1 : 0; }

    /// Bit mask with bit (x*cols + y) = G(x,y); the enumeration order key.
    std::uint64_t mask() const;
    static GFunction from_mask(int rows, int cols, std::uint64_t mask);

    bool has_duplicate_columns() const;
    bool columns_equal(int y1, int y2) const;

    /// Two inputs whose correlation targets agree for every x, or disagree
    /// for every x; the box blocks then match or anti-match, which is column
    /// equality up to relabeling Bob's outputs on one input.
    bool columns_equal_or_complementary(int y1, int y2) const;
    bool has_aliased_column_pair() const;

    /// Whitespace-separated 0/1 matrix, one row per line.
    static GFunction parse(const std::string& text);
    std::string format() const;

    friend bool operator==(const GFunction&, const GFunction&) = default;

private:
    int rows_, cols_;
    std::vector<std::uint8_t> bits_;
};

/// Indexable family of all deterministic local points of a scenario, ordered
/// lexicographically by the assignment (a_0..a_{mA-1}, b_0..b_{mB-1}).
class DeterministicVertices {
public:
    explicit DeterministicVertices(Scenario scenario);

    std::uint64_t size() const { return size_; }
    const Scenario& scenario() const { return scenario_; }

    /// Decodes index into per-input outputs for both parties.
    void assignment(std::uint64_t idx, std::vector<int>& a_of_x, std::vector<int>& b_of_y) const;
    std::uint64_t index_of(const std::vector<int>& a_of_x, const std::vector<int>& b_of_y) const;

    Distribution at(std::uint64_t idx) const;

    class iterator {
    public:
        iterator(const DeterministicVertices* owner, std::uint64_t idx) : owner_(owner), idx_(idx) {}
        Distribution operator*() const { return owner_->at(idx_); }
        iterator& operator++() { ++idx_; return *this; }
        friend bool operator==(const iterator&, const iterator&) = default;

    private:
        const DeterministicVertices* owner_;
        std::uint64_t idx_;
    };
    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, size_}; }

private:
    Scenario scenario_;
    std::uint64_t size_;
};

inline DeterministicVertices local_deterministic_vertices(const Scenario& sc) {
    return DeterministicVertices(sc);
}

Distribution from_g_function(const GFunction& g);

/// Recovers the G matrix of a box of the above form, or nullopt when the
/// table is not of that form.
std::optional<GFunction> g_function_of(const Distribution& p);

/// The box with G(x,y) = dot product of the binary digits of x and y mod 2.
Distribution generalized_pr_box(int mA, int mB);
GFunction generalized_pr_g(int mA, int mB);

/// Block form of a binary-outcome extremal candidate: a grid of 2x2 blocks
/// where the leading (mA-h)x(mB-g) region holds correlated (S) or
/// anti-correlated (A) blocks with the first row and column forced to S, the
/// last g columns hold deterministic-Bob blocks (L), the last h rows hold
/// deterministic-Alice blocks (K), and the corner holds fully deterministic
/// blocks (M).
struct BlockSpec {
    int g = 0;  // appended deterministic Bob inputs, 0 <= g <= mB-2
    int h = 0;  // appended deterministic Alice inputs, 0 <= h <= mA-2
    // Inner selector, (mA-1-h) x (mB-1-g): 0 picks S, 1 picks A.
    std::vector<std::vector<std::uint8_t>> core;
};

Distribution block_extremal(const Scenario& sc, const BlockSpec& spec);

/// Exact extremality test for the no-signalling polytope: the constraints
/// active at p (zero entries plus all normalization and no-signalling
/// equalities) must pin down p uniquely, i.e. have full column rank.
bool is_vertex(const Distribution& p);

/// All nonlocal extremal points among the 2^(mA*mB) binary-correlation boxes
/// of the (mA, mB, 2, 2)-scenario, in increasing mask order. Throws when the
/// candidate count exceeds cap.
std::vector<Distribution> enumerate_binary_extremals(int mA, int mB,
                                                     std::uint64_t cap = 1u << 20,
                                                     Exec exec = Exec::Parallel);

}  // namespace loophole
