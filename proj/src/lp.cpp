#include "loophole/lp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "loophole/vertices.hpp"

namespace loophole::lp {

namespace {

/// Dense simplex tableau for maximization over nonnegative variables with
/// all-LE rows and nonnegative rhs, so the slack basis is always feasible.
/// Columns 0..m-1 are the slacks; structural columns are appended after and
/// may be added between optimize() calls (the slack block then holds the
/// basis inverse, which maps raw columns into current coordinates).
class MasterTableau {
public:
    explicit MasterTableau(std::vector<Rational> rhs)
        : m_(rhs.size()), rows_(m_), rhs_(std::move(rhs)), rc_(m_), basis_(m_) {
        for (std::size_t i = 0; i < m_; ++i) {
            if (rhs_[i].sign() < 0) throw std::invalid_argument("MasterTableau: negative rhs");
            rows_[i].assign(m_, Rational(0));
            rows_[i][i] = Rational(1);
            basis_[i] = i;
        }
    }

    /// Appends a 0/1 structural column given the rows holding a 1. The slack
    /// block carries the basis inverse, so the current coordinates of the raw
    /// column are sums of slack-column entries, and its reduced cost is
    /// cost - y . column with y_k = -rc[slack_k].
    void add_unit_column(const Rational& cost, const std::vector<std::size_t>& ones) {
        for (std::size_t i = 0; i < m_; ++i) {
            Rational v;
            for (std::size_t k : ones)
                if (!rows_[i][k].is_zero()) v += rows_[i][k];
            rows_[i].push_back(std::move(v));
        }
        Rational rc = cost;
        for (std::size_t k : ones) rc += rc_[k];
        rc_.push_back(std::move(rc));
    }

    /// Primal simplex to optimality; optionally stops as soon as the
    /// objective reaches `stop_at`. Enters on the most positive reduced cost
    /// (smallest index on ties) and falls back permanently to Bland's
    /// smallest-index rule after a long degenerate stretch, which keeps the
    /// run deterministic and guarantees termination.
    void optimize(const Rational* stop_at = nullptr) {
        bool bland = false;
        int degenerate_run = 0;
        for (;;) {
            if (stop_at && z_ == *stop_at) return;
            const std::size_t n = ncols();
            std::size_t enter = n;
            if (bland) {
                for (std::size_t j = 0; j < n; ++j)
                    if (rc_[j].sign() > 0) { enter = j; break; }
            } else {
                for (std::size_t j = 0; j < n; ++j)
                    if (rc_[j].sign() > 0 && (enter == n || rc_[j] > rc_[enter])) enter = j;
            }
            if (enter == n) return;

            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                if (rows_[i][enter].sign() <= 0) continue;
                if (leave == m_) { leave = i; continue; }
                // ratio rhs_i / a_ie < current best? cross-multiply (both a > 0)
                const Rational lhs = rhs_[i] * rows_[leave][enter];
                const Rational rhs = rhs_[leave] * rows_[i][enter];
                if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == m_) throw std::runtime_error("MasterTableau: unbounded");
            const bool degenerate = rhs_[leave].is_zero();
            pivot(leave, enter);
            degenerate_run = degenerate ? degenerate_run + 1 : 0;
            if (degenerate_run > 40) bland = true;
        }
    }

    const Rational& objective() const { return z_; }

    std::vector<Rational> duals() const {
        std::vector<Rational> y(m_);
        for (std::size_t i = 0; i < m_; ++i) y[i] = -rc_[i];
        return y;
    }

    /// (structural index, value) for basic structural variables with value > 0.
    std::vector<std::pair<std::size_t, Rational>> structural_values() const {
        std::vector<std::pair<std::size_t, Rational>> out;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= m_ && rhs_[i].sign() > 0) out.emplace_back(basis_[i] - m_, rhs_[i]);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::size_t ncols() const { return rc_.size(); }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t n = ncols();
        const Rational inv = Rational(1) / rows_[r][c];
        for (std::size_t j = 0; j < n; ++j)
            if (!rows_[r][j].is_zero()) rows_[r][j] *= inv;
        rhs_[r] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || rows_[i][c].is_zero()) continue;
            const Rational f = rows_[i][c];
            for (std::size_t j = 0; j < n; ++j)
                if (!rows_[r][j].is_zero()) rows_[i][j].submul(f, rows_[r][j]);
            rhs_[i].submul(f, rhs_[r]);
        }
        if (!rc_[c].is_zero()) {
            const Rational f = rc_[c];
            for (std::size_t j = 0; j < n; ++j)
                if (!rows_[r][j].is_zero()) rc_[j].submul(f, rows_[r][j]);
            Rational gain = f * rhs_[r];
            z_ += gain;
        }
        basis_[r] = c;
    }

    std::size_t m_;
    std::vector<std::vector<Rational>> rows_;
    std::vector<Rational> rhs_;
    std::vector<Rational> rc_;
    std::vector<std::size_t> basis_;
    Rational z_;
};

std::vector<std::size_t> vertex_ones(const Scenario& sc, const std::vector<int>& a_of_x,
                                     const std::vector<int>& b_of_y) {
    std::vector<std::size_t> ones;
    ones.reserve(static_cast<std::size_t>(sc.mA) * sc.mB);
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) ones.push_back(sc.index(x, y, a_of_x[x], b_of_y[y]));
    return ones;
}

LocalWeightResult make_result(const Distribution& q, Rational w,
                              std::vector<std::pair<std::uint64_t, Rational>> decomposition,
                              std::vector<Rational> dual) {
    const Scenario& sc = q.scenario();
    DeterministicVertices verts(sc);
    LocalWeightResult res;
    res.w = std::move(w);
    res.decomposition = std::move(decomposition);
    std::sort(res.decomposition.begin(), res.decomposition.end());
    res.dual = std::move(dual);

    res.residual = to_vector(q);
    std::vector<int> a_of_x, b_of_y;
    for (const auto& [vidx, alpha] : res.decomposition) {
        verts.assignment(vidx, a_of_x, b_of_y);
        for (std::size_t k : vertex_ones(sc, a_of_x, b_of_y)) res.residual[k] -= alpha;
    }
    return res;
}

}  // namespace

namespace {

/// One pricing candidate per enumerated-side assignment: the other party's
/// best response is chosen per input (smallest index on ties). When a support
/// mask is given, only vertices living entirely on the support are produced;
/// vertices touching a zero cell of q can never carry weight, and the dual on
/// zero rows is lifted afterwards to cover their constraints.
std::vector<std::pair<Rational, std::uint64_t>> price_all(const Scenario& sc,
                                                          const std::vector<Rational>& dual,
                                                          const std::vector<char>* support) {
    if (dual.size() != sc.table_size()) throw std::invalid_argument("price_vertices: dual size");
    DeterministicVertices verts(sc);

    std::uint64_t a_count = 1, b_count = 1;
    for (int x = 0; x < sc.mA; ++x) a_count *= sc.nA;
    for (int y = 0; y < sc.mB; ++y) b_count *= sc.nB;
    const bool enumerate_alice = a_count <= b_count;

    auto allowed = [&](std::size_t flat) { return !support || (*support)[flat]; };

    std::vector<std::pair<Rational, std::uint64_t>> out;
    std::vector<int> a_of_x(sc.mA, 0), b_of_y(sc.mB, 0);
    const std::uint64_t outer = enumerate_alice ? a_count : b_count;
    out.reserve(outer);
    for (std::uint64_t e = 0; e < outer; ++e) {
        std::uint64_t t = e;
        if (enumerate_alice) {
            for (int x = sc.mA - 1; x >= 0; --x) { a_of_x[x] = static_cast<int>(t % sc.nA); t /= sc.nA; }
        } else {
            for (int y = sc.mB - 1; y >= 0; --y) { b_of_y[y] = static_cast<int>(t % sc.nB); t /= sc.nB; }
        }
        Rational value;
        bool feasible = true;
        if (enumerate_alice) {
            for (int y = 0; y < sc.mB && feasible; ++y) {
                int arg = -1;
                Rational best_col;
                for (int b = 0; b < sc.nB; ++b) {
                    Rational s;
                    bool ok = true;
                    for (int x = 0; x < sc.mA && ok; ++x) {
                        const std::size_t flat = sc.index(x, y, a_of_x[x], b);
                        if (!allowed(flat)) ok = false;
                        else s += dual[flat];
                    }
                    if (ok && (arg < 0 || s < best_col)) { best_col = s; arg = b; }
                }
                if (arg < 0) { feasible = false; break; }
                b_of_y[y] = arg;
                value += best_col;
            }
        } else {
            for (int x = 0; x < sc.mA && feasible; ++x) {
                int arg = -1;
                Rational best_row;
                for (int a = 0; a < sc.nA; ++a) {
                    Rational s;
                    bool ok = true;
                    for (int y = 0; y < sc.mB && ok; ++y) {
                        const std::size_t flat = sc.index(x, y, a, b_of_y[y]);
                        if (!allowed(flat)) ok = false;
                        else s += dual[flat];
                    }
                    if (ok && (arg < 0 || s < best_row)) { best_row = s; arg = a; }
                }
                if (arg < 0) { feasible = false; break; }
                a_of_x[x] = arg;
                value += best_row;
            }
        }
        if (feasible) out.emplace_back(value, verts.index_of(a_of_x, b_of_y));
    }
    return out;
}

}  // namespace

std::pair<Rational, std::uint64_t> price_vertices(const Scenario& sc,
                                                  const std::vector<Rational>& dual) {
    const auto all = price_all(sc, dual, nullptr);
    auto best = all.front();
    for (const auto& c : all)
        if (c.first < best.first || (c.first == best.first && c.second < best.second)) best = c;
    return best;
}

/// Dense reference solve by revised simplex: the basis inverse is kept
/// explicitly and every deterministic point is priced each iteration, so no
/// full-width tableau rows are carried. Column ids: 0..m-1 are slacks,
/// m+v is deterministic point v.
LocalWeightResult local_weight(const Distribution& q) {
    require_valid(q, "local_weight");
    const Scenario& sc = q.scenario();
    DeterministicVertices verts(sc);
    if (verts.size() > (std::uint64_t(1) << 24))
        throw std::invalid_argument("local_weight: too many deterministic points; use local_weight_cg");

    const std::size_t m = sc.table_size();
    const std::uint64_t count = verts.size();
    std::vector<std::vector<std::size_t>> ones(count);
    {
        std::vector<int> a_of_x, b_of_y;
        for (std::uint64_t v = 0; v < count; ++v) {
            verts.assignment(v, a_of_x, b_of_y);
            ones[v] = vertex_ones(sc, a_of_x, b_of_y);
        }
    }

    const Rational one(1);
    std::vector<std::vector<Rational>> binv(m, std::vector<Rational>(m));
    std::vector<Rational> xb = to_vector(q);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        binv[i][i] = one;
        basis[i] = i;  // slack basis, feasible since q >= 0
    }

    std::vector<Rational> y(m), d(m);
    bool bland = false;
    int degenerate_run = 0;
    for (;;) {
        // y = c_B B^-1; structural columns cost 1, slacks 0
        for (auto& v : y) v = Rational(0);
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] < m) continue;
            for (std::size_t i = 0; i < m; ++i)
                if (!binv[r][i].is_zero()) y[i] += binv[r][i];
        }

        // price everything: slack rc = -y_i, structural rc = 1 - y . column
        std::size_t enter = SIZE_MAX;
        Rational enter_rc;
        if (bland) {
            for (std::size_t i = 0; i < m && enter == SIZE_MAX; ++i)
                if (y[i].sign() < 0) { enter = i; }
            for (std::uint64_t v = 0; v < count && enter == SIZE_MAX; ++v) {
                Rational rc = one;
                for (std::size_t k : ones[v]) rc -= y[k];
                if (rc.sign() > 0) enter = m + v;
            }
        } else {
            for (std::size_t i = 0; i < m; ++i)
                if (y[i].sign() < 0 && (enter == SIZE_MAX || -y[i] > enter_rc)) {
                    enter = i;
                    enter_rc = -y[i];
                }
            for (std::uint64_t v = 0; v < count; ++v) {
                Rational rc = one;
                for (std::size_t k : ones[v]) rc -= y[k];
                if (rc.sign() > 0 && (enter == SIZE_MAX || rc > enter_rc)) {
                    enter = m + v;
                    enter_rc = rc;
                }
            }
        }
        if (enter == SIZE_MAX) break;  // dual feasible: optimal

        // direction d = B^-1 A_enter
        if (enter < m) {
            for (std::size_t r = 0; r < m; ++r) d[r] = binv[r][enter];
        } else {
            for (std::size_t r = 0; r < m; ++r) {
                Rational s;
                for (std::size_t k : ones[enter - m])
                    if (!binv[r][k].is_zero()) s += binv[r][k];
                d[r] = std::move(s);
            }
        }

        std::size_t leave = m;
        for (std::size_t r = 0; r < m; ++r) {
            if (d[r].sign() <= 0) continue;
            if (leave == m) { leave = r; continue; }
            const Rational lhs = xb[r] * d[leave];
            const Rational rhs = xb[leave] * d[r];
            if (lhs < rhs || (lhs == rhs && basis[r] < basis[leave])) leave = r;
        }
        if (leave == m) throw std::runtime_error("local_weight: unbounded");

        const bool degenerate = xb[leave].is_zero();
        const Rational inv = one / d[leave];
        for (std::size_t i = 0; i < m; ++i)
            if (!binv[leave][i].is_zero()) binv[leave][i] *= inv;
        xb[leave] *= inv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == leave || d[r].is_zero()) continue;
            for (std::size_t i = 0; i < m; ++i)
                if (!binv[leave][i].is_zero()) binv[r][i].submul(d[r], binv[leave][i]);
            xb[r].submul(d[r], xb[leave]);
        }
        basis[leave] = enter;
        degenerate_run = degenerate ? degenerate_run + 1 : 0;
        if (degenerate_run > 40) bland = true;
    }

    Rational w;
    std::vector<std::pair<std::uint64_t, Rational>> decomposition;
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] >= m && xb[r].sign() > 0) {
            w += xb[r];
            decomposition.emplace_back(basis[r] - m, xb[r]);
        }
    return make_result(q, std::move(w), std::move(decomposition), std::move(y));
}

LocalWeightResult local_weight_cg(const Distribution& q) {
    require_valid(q, "local_weight_cg");
    const Scenario& sc = q.scenario();
    DeterministicVertices verts(sc);

    // Support presolve: a vertex touching a zero cell of q can never carry
    // weight, so pricing walks the supported vertices only. Zero-row duals
    // are lifted at the end to cover the skipped columns' constraints.
    std::vector<char> support(sc.table_size());
    for (std::size_t i = 0; i < support.size(); ++i) support[i] = !q.table()[i].is_zero();

    MasterTableau tab(to_vector(q));
    std::vector<std::uint64_t> column_vertex;
    std::set<std::uint64_t> added;
    std::vector<int> a_of_x, b_of_y;
    const Rational one(1);

    auto add_vertex = [&](std::uint64_t vidx) {
        verts.assignment(vidx, a_of_x, b_of_y);
        tab.add_unit_column(one, vertex_ones(sc, a_of_x, b_of_y));
        column_vertex.push_back(vidx);
        added.insert(vidx);
    };

    // Several violating columns enter per round (best value first); this cuts
    // the round count sharply compared to single-column pricing.
    constexpr std::size_t kColumnsPerRound = 16;
    bool dual_complete = false;
    for (;;) {
        tab.optimize(&one);
        if (tab.objective() == one) break;  // w is capped at 1: already optimal
        auto candidates = price_all(sc, tab.duals(), &support);
        std::sort(candidates.begin(), candidates.end());
        std::size_t added_now = 0;
        for (const auto& [value, vidx] : candidates) {
            if (value >= one || added_now == kColumnsPerRound) break;
            if (added.count(vidx)) continue;
            add_vertex(vidx);
            ++added_now;
        }
        if (added_now == 0) {
            if (candidates.empty() || candidates.front().first >= one) dual_complete = true;
            else
                throw std::runtime_error("local_weight_cg: pricing made no progress");
            break;
        }
    }

    std::vector<std::pair<std::uint64_t, Rational>> decomposition;
    for (const auto& [col, val] : tab.structural_values())
        decomposition.emplace_back(column_vertex[col], val);
    std::vector<Rational> dual;
    if (dual_complete) {
        dual = tab.duals();
        // Lift zero-row duals: every pruned vertex hits at least one zero
        // cell, so raising those components to 1 restores b . d >= 1 for all
        // deterministic points without changing b . q.
        for (std::size_t i = 0; i < support.size(); ++i)
            if (!support[i] && dual[i] < one) dual[i] = one;
    }
    return make_result(q, tab.objective(), std::move(decomposition), std::move(dual));
}

// ---------------------------------------------------------------------------
// General-purpose simplex (two phases, Bland's rule).

namespace {

class GeneralTableau {
public:
    GeneralTableau(const std::vector<Rational>& objective, const RatMatrix& a,
                   const std::vector<Sense>& senses, const std::vector<Rational>& rhs)
        : m_(a.rows()), n_(a.cols()), seed_(m_, 0), flipped_(m_, 0) {
        if (objective.size() != n_ || senses.size() != m_ || rhs.size() != m_)
            throw std::invalid_argument("solve_lp: dimension mismatch");

        // Normalize to nonnegative rhs, then seed each row with a slack
        // (LE) or an artificial (GE/EQ) basic column.
        std::vector<Sense> sense = senses;
        rows_.assign(m_, {});
        rhs_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            rhs_[i] = rhs[i];
            if (rhs_[i].sign() < 0) {
                flipped_[i] = 1;
                rhs_[i] = -rhs_[i];
                if (sense[i] == Sense::LE) sense[i] = Sense::GE;
                else if (sense[i] == Sense::GE) sense[i] = Sense::LE;
            }
            rows_[i].resize(n_);
            for (std::size_t j = 0; j < n_; ++j)
                rows_[i][j] = flipped_[i] ? -a.at(i, j) : a.at(i, j);
        }
        cost_ = objective;

        basis_.assign(m_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (sense[i] == Sense::GE) add_seed(i, Rational(-1));  // surplus
            if (sense[i] == Sense::LE) {
                basis_[i] = add_seed(i, Rational(1));  // slack
            } else {
                basis_[i] = add_seed(i, Rational(1));  // artificial
                artificial_.push_back(basis_[i]);
            }
            seed_[i] = basis_[i];
        }
    }

    Solution solve() {
        Solution sol;
        // Phase 1: drive artificial variables to zero.
        if (!artificial_.empty()) {
            std::vector<Rational> phase1(ncols(), Rational(0));
            for (std::size_t j : artificial_) phase1[j] = Rational(-1);
            load_objective(phase1);
            run();
            if (z_.sign() < 0) { sol.status = Status::Infeasible; return sol; }
            for (std::size_t j : artificial_) blocked_.insert(j);
            for (std::size_t i = 0; i < m_; ++i) {
                if (!blocked_.count(basis_[i])) continue;
                for (std::size_t j = 0; j < ncols(); ++j)
                    if (!blocked_.count(j) && !rows_[i][j].is_zero()) { pivot(i, j); break; }
            }
        }
        std::vector<Rational> phase2(ncols(), Rational(0));
        for (std::size_t j = 0; j < ncols(); ++j) phase2[j] = j < cost_.size() ? cost_[j] : Rational(0);
        load_objective(phase2);
        if (!run()) { sol.status = Status::Unbounded; return sol; }

        sol.status = Status::Optimal;
        sol.objective = z_;
        sol.primal.assign(n_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) sol.primal[basis_[i]] = rhs_[i];
        // The seed of row i is a zero-cost column that started as e_i, so its
        // reduced cost reads -y_i (sign flipped back for negated rows).
        sol.dual.resize(m_);
        for (std::size_t i = 0; i < m_; ++i)
            sol.dual[i] = flipped_[i] ? rc_[seed_[i]] : -rc_[seed_[i]];
        return sol;
    }

private:
    std::size_t ncols() const { return rows_.empty() ? 0 : rows_[0].size(); }

    std::size_t add_seed(std::size_t row, const Rational& coeff) {
        const std::size_t j = ncols();
        for (std::size_t i = 0; i < m_; ++i) rows_[i].push_back(i == row ? coeff : Rational(0));
        return j;
    }

    void load_objective(const std::vector<Rational>& c) {
        rc_ = c;
        z_ = Rational(0);
        for (std::size_t i = 0; i < m_; ++i) {
            const Rational& cb = c[basis_[i]];
            if (cb.is_zero()) continue;
            for (std::size_t j = 0; j < ncols(); ++j) rc_[j].submul(cb, rows_[i][j]);
            z_ += cb * rhs_[i];
        }
    }

    bool run() {
        bool bland = false;
        int degenerate_run = 0;
        for (;;) {
            std::size_t enter = ncols();
            if (bland) {
                for (std::size_t j = 0; j < ncols(); ++j)
                    if (!blocked_.count(j) && rc_[j].sign() > 0) { enter = j; break; }
            } else {
                for (std::size_t j = 0; j < ncols(); ++j)
                    if (!blocked_.count(j) && rc_[j].sign() > 0 &&
                        (enter == ncols() || rc_[j] > rc_[enter]))
                        enter = j;
            }
            if (enter == ncols()) return true;
            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                if (rows_[i][enter].sign() <= 0) continue;
                if (leave == m_) { leave = i; continue; }
                const Rational lhs = rhs_[i] * rows_[leave][enter];
                const Rational rhs = rhs_[leave] * rows_[i][enter];
                if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == m_) return false;
            const bool degenerate = rhs_[leave].is_zero();
            pivot(leave, enter);
            degenerate_run = degenerate ? degenerate_run + 1 : 0;
            if (degenerate_run > 40) bland = true;
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const Rational inv = Rational(1) / rows_[r][c];
        for (std::size_t j = 0; j < ncols(); ++j)
            if (!rows_[r][j].is_zero()) rows_[r][j] *= inv;
        rhs_[r] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || rows_[i][c].is_zero()) continue;
            const Rational f = rows_[i][c];
            for (std::size_t j = 0; j < ncols(); ++j)
                if (!rows_[r][j].is_zero()) rows_[i][j].submul(f, rows_[r][j]);
            rhs_[i].submul(f, rhs_[r]);
        }
        if (!rc_[c].is_zero()) {
            const Rational f = rc_[c];
            for (std::size_t j = 0; j < ncols(); ++j)
                if (!rows_[r][j].is_zero()) rc_[j].submul(f, rows_[r][j]);
            z_ += f * rhs_[r];
        }
        basis_[r] = c;
    }

    std::size_t m_, n_;
    std::vector<std::vector<Rational>> rows_;
    std::vector<Rational> rhs_, cost_, rc_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> seed_;
    std::vector<char> flipped_;
    std::set<std::size_t> blocked_;
    std::vector<std::size_t> artificial_;
    Rational z_;
};

}  // namespace

Solution solve_lp(const std::vector<Rational>& objective, const RatMatrix& constraints,
                  const std::vector<Sense>& senses, const std::vector<Rational>& rhs) {
    GeneralTableau tab(objective, constraints, senses, rhs);
    return tab.solve();
}

}  // namespace loophole::lp
