#include "loophole/bell.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "loophole/detect.hpp"
#include "loophole/vertices.hpp"

namespace loophole::bell {

namespace {
const Rational kZero(0), kOne(1), kHalf(1, 2);
}

BellInequality from_dual(const Scenario& scenario, std::vector<Rational> dual) {
    if (dual.size() != scenario.table_size())
        throw std::invalid_argument("from_dual: coefficient count mismatch");
    return BellInequality{scenario, std::move(dual), kOne, Direction::GEQ};
}

Rational evaluate(const BellInequality& s, const Distribution& p) {
    if (!(p.scenario() == s.scenario))
        throw std::invalid_argument("bell::evaluate: scenario mismatch");
    Rational sum;
    auto pt = p.table();
    for (std::size_t i = 0; i < pt.size(); ++i)
        if (!s.coeffs[i].is_zero() && !pt[i].is_zero()) sum += s.coeffs[i] * pt[i];
    return sum;
}

namespace {

/// Value of s on the deterministic point given by the assignment.
Rational deterministic_value(const BellInequality& s, const std::vector<int>& a_of_x,
                             const std::vector<int>& b_of_y) {
    Rational v;
    for (int x = 0; x < s.scenario.mA; ++x)
        for (int y = 0; y < s.scenario.mB; ++y) v += s.at(x, y, a_of_x[x], b_of_y[y]);
    return v;
}

}  // namespace

Rational local_bound(const BellInequality& s, std::uint64_t cap, Exec exec) {
    DeterministicVertices verts(s.scenario);
    if (verts.size() > cap) throw std::invalid_argument("local_bound: enumeration cap exceeded");
    const bool want_min = s.direction == Direction::GEQ;
    const std::uint64_t n = verts.size();

    auto better = [&](const Rational& a, const Rational& b) { return want_min ? a < b : a > b; };

    Rational best;
    bool have = false;
    if (exec == Exec::Serial) {
        std::vector<int> a_of_x, b_of_y;
        for (std::uint64_t i = 0; i < n; ++i) {
            verts.assignment(i, a_of_x, b_of_y);
            Rational v = deterministic_value(s, a_of_x, b_of_y);
            if (!have || better(v, best)) { best = std::move(v); have = true; }
        }
    } else {
#pragma omp parallel
        {
            Rational local_best;
            bool local_have = false;
            std::vector<int> a_of_x, b_of_y;
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
                verts.assignment(static_cast<std::uint64_t>(i), a_of_x, b_of_y);
                Rational v = deterministic_value(s, a_of_x, b_of_y);
                if (!local_have || better(v, local_best)) { local_best = std::move(v); local_have = true; }
            }
#pragma omp critical
            if (local_have && (!have || better(local_best, best))) {
                best = local_best;
                have = true;
            }
        }
    }
    return best;
}

BellInequality lift_two_outcome(const BellInequality& s2, const std::vector<int>& a_x,
                                const std::vector<int>& b_y) {
    const Scenario& sc = s2.scenario;
    if (sc.nA != 2 || sc.nB != 2)
        throw std::invalid_argument("lift_two_outcome: input must have binary outcomes");
    if (static_cast<int>(a_x.size()) != sc.mA || static_cast<int>(b_y.size()) != sc.mB)
        throw std::invalid_argument("lift_two_outcome: designated-outcome lists must match inputs");
    for (int v : a_x)
        if (v != 0 && v != 1) throw std::invalid_argument("lift_two_outcome: bits expected");
    for (int v : b_y)
        if (v != 0 && v != 1) throw std::invalid_argument("lift_two_outcome: bits expected");

    const Scenario post = sc.with_failure_outcome();
    const int fa = failure_outcome(post.nA), fb = failure_outcome(post.nB);
    BellInequality out{post, std::vector<Rational>(post.table_size()), s2.bound, s2.direction};
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    out.coeffs[post.index(x, y, a, b)] = s2.at(x, y, a, b);
            for (int b = 0; b < 2; ++b)
                out.coeffs[post.index(x, y, fa, b)] = s2.at(x, y, a_x[x], b);
            for (int a = 0; a < 2; ++a)
                out.coeffs[post.index(x, y, a, fb)] = s2.at(x, y, a, b_y[y]);
            out.coeffs[post.index(x, y, fa, fb)] = s2.at(x, y, a_x[x], b_y[y]);
        }
    return out;
}

BellInequality load_matrix(std::istream& in) {
    int mA = 0, mB = 0, nA = 0, nB = 0;
    Rational bound;
    bool have_scenario = false, have_bound = false;
    Direction dir = Direction::GEQ;

    std::string line;
    std::vector<Rational> entries;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "#") {
            std::string key;
            if (!(ls >> key)) continue;
            if (key == "scenario") {
                if (!(ls >> mA >> mB >> nA >> nB))
                    throw std::runtime_error("load_matrix: malformed scenario header");
                have_scenario = true;
            } else if (key == "bound") {
                std::string v;
                if (!(ls >> v)) throw std::runtime_error("load_matrix: malformed bound header");
                bound = Rational::parse(v);
                have_bound = true;
            } else if (key == "direction") {
                std::string v;
                if (!(ls >> v)) throw std::runtime_error("load_matrix: malformed direction header");
                if (v == "GEQ") dir = Direction::GEQ;
                else if (v == "LEQ") dir = Direction::LEQ;
                else throw std::runtime_error("load_matrix: direction must be GEQ or LEQ");
            }
            continue;
        }
        entries.push_back(Rational::parse(tok));
        std::string v;
        while (ls >> v) entries.push_back(Rational::parse(v));
    }
    if (!have_scenario) throw std::runtime_error("load_matrix: missing scenario header");
    if (!have_bound) throw std::runtime_error("load_matrix: missing bound header");

    const Scenario sc(mA, mB, nA, nB);
    if (entries.size() != sc.table_size())
        throw std::runtime_error("load_matrix: expected " + std::to_string(sc.table_size()) +
                                 " entries, found " + std::to_string(entries.size()));

    // File rows are (x, a) with a cycling inside each x block; columns are
    // (y, b) likewise. Remap into canonical (x, y, a, b) order.
    BellInequality s{sc, std::vector<Rational>(sc.table_size()), bound, dir};
    const std::size_t width = static_cast<std::size_t>(mB) * nB;
    for (int x = 0; x < mA; ++x)
        for (int a = 0; a < nA; ++a)
            for (int y = 0; y < mB; ++y)
                for (int b = 0; b < nB; ++b) {
                    const std::size_t row = static_cast<std::size_t>(x) * nA + a;
                    const std::size_t col = static_cast<std::size_t>(y) * nB + b;
                    s.coeffs[sc.index(x, y, a, b)] = entries[row * width + col];
                }
    return s;
}

BellInequality load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
    return load_matrix(in);
}

void save_matrix(const BellInequality& s, std::ostream& out) {
    const Scenario& sc = s.scenario;
    out << "# scenario " << sc.mA << " " << sc.mB << " " << sc.nA << " " << sc.nB << "\n";
    out << "# bound " << s.bound.str() << "\n";
    out << "# direction " << (s.direction == Direction::GEQ ? "GEQ" : "LEQ") << "\n";
    for (int x = 0; x < sc.mA; ++x)
        for (int a = 0; a < sc.nA; ++a) {
            bool first = true;
            for (int y = 0; y < sc.mB; ++y)
                for (int b = 0; b < sc.nB; ++b) {
                    out << (first ? "" : " ") << s.at(x, y, a, b).str();
                    first = false;
                }
            out << "\n";
        }
}

void save_matrix_file(const BellInequality& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
    save_matrix(s, out);
}

std::string VerifyReport::describe() const {
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL") << ": local bound " << enumerated_bound.str() << ", value("
       << "eta*) = " << value_at_eta_star.str() << ", violation above: "
       << (violates_above ? "yes" : "no");
    return os.str();
}

VerifyReport verify_threshold(const BellInequality& s, const Distribution& p,
                              const Rational& eta_star) {
    require_valid(p, "verify_threshold");
    if (!(p.scenario().with_failure_outcome() == s.scenario))
        throw std::invalid_argument("verify_threshold: inequality scenario must be the mapped one");
    if (!(eta_star > kZero && eta_star < kOne))
        throw std::invalid_argument("verify_threshold: eta* must lie in (0, 1)");

    VerifyReport rep;
    rep.stated_bound = s.bound;
    rep.enumerated_bound = local_bound(s);

    // Every mapped entry is a polynomial of degree <= 2 in the efficiency, so
    // three evaluations determine the value polynomial exactly.
    const Rational v0 = evaluate(s, detect::apply_detection_map(p, kZero));
    const Rational vh = evaluate(s, detect::apply_detection_map(p, kHalf));
    const Rational v1 = evaluate(s, detect::apply_detection_map(p, kOne));
    rep.value_poly.c0 = v0;
    rep.value_poly.c2 = Rational(2) * v0 - Rational(4) * vh + Rational(2) * v1;
    rep.value_poly.c1 = v1 - v0 - rep.value_poly.c2;
    rep.value_at_eta_star = rep.value_poly.eval(eta_star);

    const Rational& k = rep.enumerated_bound;
    rep.bound_attained = rep.value_at_eta_star == k;

    // q(t) = value(t) - k has a root at eta*; divide it out and decide the
    // sign of the remaining linear factor on (eta*, 1] exactly.
    if (rep.bound_attained) {
        const Rational lc = rep.value_poly.c2;                 // q = lc t^2 + c1 t + (c0 - k)
        const Rational lin0 = rep.value_poly.c1 + lc * eta_star;  // q = (t - eta*)(lc t + lin0)
        const Rational at_star = lc * eta_star + lin0;
        const Rational at_one = lc + lin0;
        if (s.direction == Direction::GEQ)
            rep.violates_above = at_one < kZero && at_star <= kZero;
        else
            rep.violates_above = at_one > kZero && at_star >= kZero;
    }
    rep.pass = rep.bound_attained && rep.violates_above;
    return rep;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("LOOPHOLE_DATA_DIR"); env && *env) return env;
#ifdef LOOPHOLE_BUNDLED_DATA_DIR
    return LOOPHOLE_BUNDLED_DATA_DIR;
#else
    return "data";
#endif
}

}  // namespace loophole::bell
