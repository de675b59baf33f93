#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "loophole/core.hpp"
#include "loophole/linalg.hpp"

namespace loophole::lp {

enum class Sense { LE, GE, EQ };
enum class Status { Optimal, Infeasible, Unbounded };

/// Result of a general exact simplex solve (maximization, x >= 0).
struct Solution {
    Status status = Status::Infeasible;
    Rational objective;
    std::vector<Rational> primal;  // one per structural variable
    std::vector<Rational> dual;    // one per constraint row
};

/// Maximizes objective . x subject to constraints (one row per sense/rhs
/// entry) and x >= 0. Exact rational simplex with Bland's smallest-index
/// anti-cycling rule; identical input yields identical output.
Solution solve_lp(const std::vector<Rational>& objective, const RatMatrix& constraints,
                  const std::vector<Sense>& senses, const std::vector<Rational>& rhs);

/// Outcome of the local-weight program for a distribution q: the maximal
/// total weight w of deterministic local points fitting under q, the
/// achieving decomposition, the dual certificate b (b.q = w, b.d >= 1 for
/// every deterministic point d), and the leftover q - sum(alpha_i d_i).
struct LocalWeightResult {
    Rational w;
    std::vector<std::pair<std::uint64_t, Rational>> decomposition;  // vertex index -> weight
    std::vector<Rational> dual;
    std::vector<Rational> residual;

    bool is_local() const { return w == Rational(1); }
    /// True when the dual certifies nonlocality (only meaningful for w < 1,
    /// where the solver runs pricing to completion).
    bool has_certificate() const { return !dual.empty(); }
};

/// Local weight with every deterministic point of q's scenario loaded as a
/// column. Exact; intended for small scenarios.
LocalWeightResult local_weight(const Distribution& q);

/// Same optimum computed by column generation: a restricted master grows by
/// pricing deterministic points against the master dual (a point whose dual
/// value falls below 1 violates dual feasibility and enters). Stops early
/// once the master weight reaches 1, since the optimum never exceeds 1.
LocalWeightResult local_weight_cg(const Distribution& q);

/// Pricing step used by column generation, exposed for testing: the
/// deterministic point of `scenario` minimizing dual . d, found by
/// enumerating the smaller party's assignments and optimizing the other
/// party per input. Returns (minimum value, vertex index).
std::pair<Rational, std::uint64_t> price_vertices(const Scenario& scenario,
                                                  const std::vector<Rational>& dual);

}  // namespace loophole::lp
