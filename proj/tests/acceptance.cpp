// Acceptance suite: the gate the build must hold. Each numbered criterion
// prints one PASS/FAIL line; the process exits nonzero if any fails. All
// equality checks are exact rational comparisons unless a tolerance is
// stated inline.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "loophole/bell.hpp"
#include "loophole/detect.hpp"
#include "loophole/lp.hpp"
#include "loophole/rng.hpp"
#include "loophole/threshold.hpp"
#include "loophole/vertices.hpp"
#include "testutil.hpp"

using namespace loophole;
using namespace loophole::testutil;
using detect::StrategyKind;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, const std::function<bool()>& body) {
    const auto t0 = Clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" (") + e.what() + ")";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("criterion %2d: %s  [%.1fs]  %s%s\n", number, ok ? "PASS" : "FAIL", secs,
                label.c_str(), note.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

bool certify_row(int mA, int mB, const Rational& eta_star) {
    const auto box = generalized_pr_box(mA, mB);
    const auto at = lp::local_weight_cg(detect::apply_detection_map(box, eta_star));
    if (!at.is_local()) return false;
    if (!certificate_valid(detect::apply_detection_map(box, eta_star), at)) return false;
    const Rational above = eta_star + Rational(1, 1000);
    const auto r = lp::local_weight_cg(detect::apply_detection_map(box, above));
    if (r.w >= Rational(1)) return false;
    return certificate_valid(detect::apply_detection_map(box, above), r);
}

}  // namespace

int main() {
    criterion(1, "threshold table rows certified exactly at and just above eta*", [] {
        const std::vector<std::tuple<int, int, Rational>> rows = {
            {2, 2, Rational(2, 3)}, {2, 3, Rational(2, 3)}, {2, 4, Rational(2, 3)},
            {3, 3, Rational(4, 7)}, {3, 4, Rational(5, 9)}, {4, 4, Rational(1, 2)},
        };
        for (const auto& [mA, mB, eta] : rows) {
            if (!certify_row(mA, mB, eta)) {
                std::printf("  row (%d,%d) at %s failed\n", mA, mB, eta.str().c_str());
                return false;
            }
        }
        return true;
    });

    criterion(2, "strategy threshold formulas", [] {
        for (int mA = 2; mA <= 10; ++mA)
            for (int mB = 2; mB <= 10; ++mB) {
                const auto v = detect::strategy_threshold(StrategyKind::SingleGuess, mA, mB);
                if (!v || *v != Rational(mA + mB - 2) / Rational(mA * mB - 1)) return false;
            }
        for (int m = 3; m <= 10; ++m) {
            const auto v = detect::strategy_threshold(StrategyKind::TwoGuess, m, m);
            if (!v || *v != Rational(4, m + 4)) return false;
        }
        return detect::strategy_threshold(StrategyKind::TwoGuess, 3, 3) == Rational(4, 7) &&
               detect::strategy_threshold(StrategyKind::TwoGuess, 4, 4) == Rational(1, 2) &&
               detect::strategy_threshold(StrategyKind::TwoGuess, 5, 5) == Rational(4, 9);
    });

    criterion(3, "two-guess parameters replicate the detection map entrywise", [] {
        for (int m = 2; m <= 5; ++m) {
            const Rational eta(4, m + 4);
            const auto params = detect::solve_params_for_eta(StrategyKind::TwoGuess, m, m, eta);
            if (!params) return false;
            const auto box = generalized_pr_box(m, m);
            if (!(detect::strategy_statistics(StrategyKind::TwoGuess, box, *params) ==
                  detect::apply_detection_map(box, eta)))
                return false;
        }
        return true;
    });

    criterion(4, "mixed strategies reach 5/9 on the (3,4) box", [] {
        const auto box = generalized_pr_box(3, 4);
        const auto mix = detect::mixture_statistics(
            box,
            {{Rational(1, 5), StrategyKind::SingleGuess, Rational(1)},
             {Rational(4, 5), StrategyKind::TwoGuess, Rational(1)}},
            Rational(2, 27));
        return mix == detect::apply_detection_map(box, Rational(5, 9));
    });

    criterion(5, "bundled witnesses: bound one and exact threshold proofs", [] {
        const std::vector<std::tuple<std::string, int, int, Rational>> cases = {
            {"witness_2in.ineq", 2, 2, Rational(2, 3)},
            {"witness_3in.ineq", 3, 3, Rational(4, 7)},
            {"witness_4in.ineq", 4, 4, Rational(1, 2)},
            {"witness_3x4.ineq", 3, 4, Rational(5, 9)},
        };
        for (const auto& [name, mA, mB, eta] : cases) {
            const auto s = bell::load_matrix_file(bell::default_data_dir() + "/" + name);
            if (bell::local_bound(s) != Rational(1)) return false;
            const auto rep = bell::verify_threshold(s, generalized_pr_box(mA, mB), eta);
            if (!rep.pass || rep.value_at_eta_star != Rational(1)) return false;
        }
        return true;
    });

    criterion(6, "dual certificates are sound on 100 random nonlocal mixtures", [] {
        SplitMix64 rng(2026);
        const auto pr = generalized_pr_box(2, 2);
        const auto uni = uniform_box(Scenario(2, 2, 2, 2));
        DeterministicVertices verts(Scenario(2, 2, 2, 2));
        for (int trial = 0; trial < 100; ++trial) {
            const Rational lam(static_cast<long>(rng.bounded(499)) + 501, 1000);  // (1/2, 1]
            const auto q = convex_combine({{lam, pr}, {Rational(1) - lam, uni}});
            const auto r = lp::local_weight(q);
            if (r.w >= Rational(1)) return false;
            Rational bq;
            for (std::size_t i = 0; i < r.dual.size(); ++i) bq += r.dual[i] * q.table()[i];
            if (bq != r.w) return false;
            std::vector<int> ax, by;
            for (std::uint64_t v = 0; v < verts.size(); ++v) {
                verts.assignment(v, ax, by);
                Rational s;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y)
                        s += r.dual[q.scenario().index(x, y, ax[x], by[y])];
                if (s < Rational(1)) return false;
            }
        }
        return true;
    });

    criterion(7, "million-run simulation sits on the closed form", [] {
        const auto sim = detect::simulate_protocol(StrategyKind::TwoGuess, generalized_pr_g(2, 2),
                                                   {Rational(1, 2), Rational(1, 9)}, 1000000, 7);
        const auto closed =
            detect::apply_detection_map(generalized_pr_box(2, 2), Rational(2, 3));
        return detect::tv_distance_uniform_inputs(sim, closed) < Rational(5, 1000) &&
               detect::max_deviation_std_errors(sim, closed) < 5.0;
    });

    criterion(8, "extra inputs add no power: extension and column aliasing", [] {
        const auto ext = detect::extend_inputs(generalized_pr_box(2, 2), 3);
        const auto r = threshold::point_threshold_exact(ext, Rational(2, 3), Rational(1, 1000));
        if (!r.certified) return false;
        // every (3,5) correlation box aliases two Bob inputs (equal or
        // complementary columns), extremal or not: exhaustive over all 2^15
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << 15); ++mask)
            if (!GFunction::from_mask(3, 5, mask).has_aliased_column_pair()) return false;
        return true;
    });

    criterion(9, "two-input enumeration: 8 nonlocal vertices of weight zero", [] {
        const auto vertices = enumerate_binary_extremals(2, 2);
        if (vertices.size() != 8) return false;
        for (const auto& v : vertices)
            if (lp::local_weight(v).w != Rational(0)) return false;
        DeterministicVertices det(Scenario(2, 2, 2, 2));
        return det.size() + vertices.size() == 24;
    });

    criterion(10, "n-prediction scaling peaks exactly at one and two guesses", [] {
        for (int mA = 3; mA <= 12; ++mA) {
            const Rational peak = detect::n_guess_success_scaling(1, mA);
            if (detect::n_guess_success_scaling(2, mA) != peak) return false;
            for (int n = 3; n <= mA; ++n)
                if (detect::n_guess_success_scaling(n, mA) >= peak) return false;
        }
        return true;
    });

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
