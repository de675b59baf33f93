#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loophole/detect.hpp"
#include "loophole/lp.hpp"
#include "loophole/rng.hpp"
#include "loophole/vertices.hpp"
#include "testutil.hpp"

using namespace loophole;
using namespace loophole::testutil;

TEST_CASE("general simplex: bounded, vertex, infeasible, unbounded") {
    SUBCASE("single variable") {
        RatMatrix a(1, 1);
        a.at(0, 0) = Rational(1);
        const auto sol = lp::solve_lp({Rational(1)}, a, {lp::Sense::LE}, {Rational(3, 7)});
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == Rational(3, 7));
        CHECK(sol.primal[0] == Rational(3, 7));
        CHECK(sol.dual[0] == Rational(1));
    }
    SUBCASE("symmetric two-variable vertex") {
        RatMatrix a(2, 2);
        a.at(0, 0) = Rational(1); a.at(0, 1) = Rational(2);
        a.at(1, 0) = Rational(2); a.at(1, 1) = Rational(1);
        const auto sol = lp::solve_lp({Rational(1), Rational(1)}, a,
                                      {lp::Sense::LE, lp::Sense::LE},
                                      {Rational(1), Rational(1)});
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == Rational(2, 3));
        CHECK(sol.primal[0] == Rational(1, 3));
        CHECK(sol.primal[1] == Rational(1, 3));
        // strong duality: y . b equals the optimum
        CHECK(sol.dual[0] + sol.dual[1] == Rational(2, 3));
    }
    SUBCASE("infeasible") {
        RatMatrix a(1, 1);
        a.at(0, 0) = Rational(1);
        const auto sol = lp::solve_lp({Rational(1)}, a, {lp::Sense::LE}, {Rational(-1)});
        CHECK(sol.status == lp::Status::Infeasible);
    }
    SUBCASE("unbounded") {
        RatMatrix a(1, 1);
        a.at(0, 0) = Rational(-1);
        const auto sol = lp::solve_lp({Rational(1)}, a, {lp::Sense::LE}, {Rational(1)});
        CHECK(sol.status == lp::Status::Unbounded);
    }
    SUBCASE("negative rhs rows are normalized with the dual sign restored") {
        // max x  s.t.  x >= -3 (inactive), x <= 5
        RatMatrix a(2, 1);
        a.at(0, 0) = Rational(1);
        a.at(1, 0) = Rational(1);
        const auto sol = lp::solve_lp({Rational(1)}, a, {lp::Sense::GE, lp::Sense::LE},
                                      {Rational(-3), Rational(5)});
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == Rational(5));
        CHECK(sol.dual[0] == Rational(0));
        CHECK(sol.dual[1] == Rational(1));
    }
    SUBCASE("equality and GE rows with duals") {
        // max x + y  s.t.  x + y = 1, x >= 1/4  ->  optimum 1
        RatMatrix a(2, 2);
        a.at(0, 0) = Rational(1); a.at(0, 1) = Rational(1);
        a.at(1, 0) = Rational(1);
        const auto sol = lp::solve_lp({Rational(1), Rational(1)}, a,
                                      {lp::Sense::EQ, lp::Sense::GE},
                                      {Rational(1), Rational(1, 4)});
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == Rational(1));
        CHECK(sol.primal[0] + sol.primal[1] == Rational(1));
        CHECK(sol.dual[0] * Rational(1) + sol.dual[1] * Rational(1, 4) == Rational(1));
    }
}

TEST_CASE("local weight basics") {
    DeterministicVertices verts(Scenario(2, 2, 2, 2));
    for (std::uint64_t i = 0; i < verts.size(); i += 5) {
        const auto r = lp::local_weight(verts.at(i));
        CHECK(r.w == Rational(1));
        CHECK(certificate_valid(verts.at(i), r));
    }

    const auto pr = generalized_pr_box(2, 2);
    const auto rpr = lp::local_weight(pr);
    CHECK(rpr.w == Rational(0));
    CHECK(certificate_valid(pr, rpr));

    const auto uni = uniform_box(Scenario(2, 2, 2, 2));
    const auto mix = convex_combine({{Rational(3, 4), pr}, {Rational(1, 4), uni}});
    const auto rmix = lp::local_weight(mix);
    CHECK(rmix.w == Rational(1, 2));
    CHECK(certificate_valid(mix, rmix));

    const auto mapped = detect::apply_detection_map(pr, Rational(2, 3));
    CHECK(lp::local_weight(mapped).is_local());
}

TEST_CASE("residual rescales to a valid no-signalling distribution") {
    const auto pr = generalized_pr_box(2, 2);
    const auto uni = uniform_box(Scenario(2, 2, 2, 2));
    const auto q = convex_combine({{Rational(2, 3), pr}, {Rational(1, 3), uni}});
    const auto r = lp::local_weight(q);
    REQUIRE(r.w < Rational(1));
    REQUIRE(r.w > Rational(0));
    std::vector<Rational> rescaled(r.residual);
    const Rational inv = Rational(1) / (Rational(1) - r.w);
    for (auto& v : rescaled) v *= inv;
    const Distribution leftover(q.scenario(), std::move(rescaled));
    CHECK(validate_normalization(leftover).ok());
    CHECK(validate_no_signalling(leftover).ok);
}

TEST_CASE("column generation agrees with the dense solver") {
    const auto pr = generalized_pr_box(2, 2);
    SUBCASE("mapped points over an efficiency grid") {
        for (auto [n, d] : {std::pair<long, long>{0, 1}, {1, 4}, {1, 2}, {2, 3}, {3, 4}, {1, 1}}) {
            const auto q = detect::apply_detection_map(pr, Rational(n, d));
            const auto full = lp::local_weight(q);
            const auto cg = lp::local_weight_cg(q);
            CHECK(full.w == cg.w);
            CHECK(certificate_valid(q, full));
            CHECK(certificate_valid(q, cg));
        }
    }
    SUBCASE("random rational no-signalling points") {
        SplitMix64 rng(2024);
        const Scenario sc(3, 3, 3, 3);
        int compared = 0;
        for (int trial = 0; trial < 50; ++trial) {
            // local mixtures salted with a mapped nonlocal box
            auto base = random_local_point(rng, sc, 3);
            const auto mapped = detect::apply_detection_map(
                generalized_pr_box(3, 3), random_unit_rational(rng));
            const Rational w = random_unit_rational(rng);
            const auto q = convex_combine({{w, base}, {Rational(1) - w, mapped}});
            const auto full = lp::local_weight(q);
            const auto cg = lp::local_weight_cg(q);
            CHECK(full.w == cg.w);
            CHECK(certificate_valid(q, cg));
            ++compared;
        }
        CHECK(compared == 50);
    }
}

TEST_CASE("pricing returns the dual-cheapest vertex") {
    const Scenario sc(2, 2, 2, 2);
    SUBCASE("zero dual prices every vertex at zero, below the entry cutoff") {
        const auto [value, idx] = lp::price_vertices(sc, std::vector<Rational>(16));
        CHECK(value == Rational(0));
        CHECK(idx == 0);
    }
    SUBCASE("matches exhaustive search on random duals") {
        SplitMix64 rng(33);
        DeterministicVertices verts(sc);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<Rational> dual(16);
            for (auto& v : dual) v = random_unit_rational(rng, 9);
            const auto [value, idx] = lp::price_vertices(sc, dual);
            Rational best;
            bool have = false;
            std::vector<int> ax, by;
            for (std::uint64_t i = 0; i < verts.size(); ++i) {
                verts.assignment(i, ax, by);
                Rational s;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) s += dual[sc.index(x, y, ax[x], by[y])];
                if (!have || s < best) { best = s; have = true; }
            }
            CHECK(value == best);
        }
    }
}

TEST_CASE("local weight is concave under mixing") {
    SplitMix64 rng(55);
    const auto pr = generalized_pr_box(2, 2);
    const auto uni = uniform_box(Scenario(2, 2, 2, 2));
    for (int trial = 0; trial < 12; ++trial) {
        const Rational s = random_unit_rational(rng), t = random_unit_rational(rng);
        const auto q1 = convex_combine({{s, pr}, {Rational(1) - s, uni}});
        const auto q2 = convex_combine({{t, pr}, {Rational(1) - t, uni}});
        const Rational lam = random_unit_rational(rng);
        const auto mix = convex_combine({{lam, q1}, {Rational(1) - lam, q2}});
        const Rational lhs = lp::local_weight(mix).w;
        const Rational rhs =
            lam * lp::local_weight(q1).w + (Rational(1) - lam) * lp::local_weight(q2).w;
        CHECK(lhs >= rhs);
    }
}

TEST_CASE("deterministic pivoting: identical input, identical output") {
    const auto q = detect::apply_detection_map(generalized_pr_box(2, 2), Rational(7, 10));
    const auto r1 = lp::local_weight(q);
    const auto r2 = lp::local_weight(q);
    CHECK(r1.w == r2.w);
    CHECK(r1.decomposition == r2.decomposition);
    CHECK(r1.dual == r2.dual);
}
