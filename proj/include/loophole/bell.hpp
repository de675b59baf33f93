#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "loophole/core.hpp"
#include "loophole/exec.hpp"

namespace loophole::bell {

enum class Direction {
    GEQ,  // local points satisfy value >= bound; violation is value < bound
    LEQ,  // local points satisfy value <= bound; violation is value > bound
};

/// A linear functional on conditional tables together with a local bound.
/// For the bundled threshold witnesses the scenario includes the failure
/// outcome (three outcomes per party) and the convention is GEQ with bound 1,
/// matching the dual form of the local-weight program.
struct BellInequality {
    Scenario scenario;
    std::vector<Rational> coeffs;  // canonical flat order, like Distribution
    Rational bound;
    Direction direction = Direction::GEQ;

    const Rational& at(int x, int y, int a, int b) const {
        return coeffs[scenario.index(x, y, a, b)];
    }
};

/// Treats a nonlocality dual certificate as a GEQ inequality with bound 1.
BellInequality from_dual(const Scenario& scenario, std::vector<Rational> dual);

Rational evaluate(const BellInequality& s, const Distribution& p);

/// Local bound by enumerating every deterministic point of the inequality's
/// scenario: the minimum for GEQ, the maximum for LEQ.
Rational local_bound(const BellInequality& s, std::uint64_t cap = std::uint64_t(1) << 24,
                     Exec exec = Exec::Parallel);

/// Lifts a two-outcome inequality to the failure-extended scenario by
/// treating failure like outcome a_x on Alice's side and b_y on Bob's.
BellInequality lift_two_outcome(const BellInequality& s2, const std::vector<int>& a_x,
                                const std::vector<int>& b_y);

/// Matrix file format: `# scenario mA mB nA nB`, `# bound q`, `# direction
/// GEQ|LEQ` headers followed by mA*nA rows of mB*nB entries; rows cycle the
/// Alice outcome within each Alice-input block (failure last), columns
/// likewise for Bob. Entries are rationals, integers, or decimals.
BellInequality load_matrix(std::istream& in);
BellInequality load_matrix_file(const std::string& path);
void save_matrix(const BellInequality& s, std::ostream& out);
void save_matrix_file(const BellInequality& s, const std::string& path);

/// exact quadratic c0 + c1 t + c2 t^2
struct QuadraticPoly {
    Rational c0, c1, c2;
    Rational eval(const Rational& t) const { return c0 + c1 * t + c2 * t * t; }
};

struct VerifyReport {
    Rational enumerated_bound;  // from deterministic-point enumeration
    Rational stated_bound;      // carried by the inequality
    QuadraticPoly value_poly;   // inequality value on the mapped point, in eta
    Rational value_at_eta_star;
    bool bound_attained = false;   // value(eta*) equals the enumerated bound
    bool violates_above = false;   // strict violation on (eta*, 1], decided exactly
    bool pass = false;

    std::string describe() const;
};

/// Proves (or refutes) that eta* is the detection threshold witnessed by s on
/// the pre-map point p: the inequality value of the mapped point is an exact
/// quadratic in the efficiency; it must hit the local bound at eta* and
/// violate it on all of (eta*, 1].
VerifyReport verify_threshold(const BellInequality& s, const Distribution& p,
                              const Rational& eta_star);

/// Directory holding the bundled witness inequalities: the LOOPHOLE_DATA_DIR
/// environment variable when set, else the build-time default.
std::string default_data_dir();

}  // namespace loophole::bell
