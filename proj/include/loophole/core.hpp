#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "loophole/rational.hpp"

namespace loophole {

/// A bipartite measurement scenario: mA/mB input choices and nA/nB outcomes
/// per party. All four counts are at least 2.
struct Scenario {
    int mA, mB, nA, nB;

    Scenario(int m_a, int m_b, int n_a, int n_b);

    std::size_t table_size() const {
        return static_cast<std::size_t>(mA) * mB * nA * nB;
    }

    /// Flat index in canonical order: x outermost, then y, then a, then b
    /// (b fastest).
    std::size_t index(int x, int y, int a, int b) const {
        return ((static_cast<std::size_t>(x) * mB + y) * nA + a) * nB + b;
    }

    /// The scenario produced by adjoining a failure outcome to each party.
    Scenario with_failure_outcome() const { return Scenario(mA, mB, nA + 1, nB + 1); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Index of the failure outcome in a table whose outcome count was extended
/// by one: always the last outcome.
inline int failure_outcome(int outcome_count) { return outcome_count - 1; }

/// A conditional probability table p(ab|xy) with exact rational entries.
///
/// The table is immutable after construction and stored in canonical flat
/// order, so it is safe to share read-only across concurrent workers.
/// Construction checks only the shape; use validate_normalization /
/// validate_no_signalling to check the probabilistic structure.
class Distribution {
public:
    Distribution(Scenario scenario, std::vector<Rational> table);

    const Scenario& scenario() const { return scenario_; }
    std::span<const Rational> table() const { return table_; }

    const Rational& at(int x, int y, int a, int b) const;
    const Rational& operator()(int x, int y, int a, int b) const { return at(x, y, a, b); }

    friend bool operator==(const Distribution& l, const Distribution& r) {
        return l.scenario_ == r.scenario_ && l.table_ == r.table_;
    }

private:
    Scenario scenario_;
    std::vector<Rational> table_;
};

struct NormalizationViolation {
    int x, y;
    Rational sum;  // deficit is 1 - sum
};

struct NormalizationReport {
    std::vector<NormalizationViolation> violations;
    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

/// First violated no-signalling marginal, if any. party 'A' means Alice's
/// marginal p(a|x) differs between Bob inputs y1 and y2; party 'B' means
/// Bob's marginal p(b|y) differs between Alice inputs x1 and x2.
struct NoSignallingReport {
    bool ok = true;
    char party = 0;
    int output = 0, input = 0, other_input_1 = 0, other_input_2 = 0;
    Rational value_1, value_2;
    std::string describe() const;
};

NormalizationReport validate_normalization(const Distribution& p);
NoSignallingReport validate_no_signalling(const Distribution& p);

/// Throws std::invalid_argument when either validator reports a violation.
void require_valid(const Distribution& p, const char* where);

/// One-party marginals of a no-signalling distribution, computed at the
/// counterpart's input 0 (any fixed input gives the same value).
Rational marginal_a(const Distribution& p, int a, int x);
Rational marginal_b(const Distribution& p, int b, int y);

std::vector<Rational> to_vector(const Distribution& p);
Distribution from_vector(const Scenario& scenario, std::vector<Rational> table);

/// Entrywise weighted sum. Weights must be nonnegative and sum to one, and
/// all terms must share one scenario.
Distribution convex_combine(const std::vector<std::pair<Rational, Distribution>>& terms);

}  // namespace loophole
