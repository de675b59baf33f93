// The parallel kernels must reproduce their serial reference output exactly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loophole/bell.hpp"
#include "loophole/detect.hpp"
#include "loophole/exec.hpp"
#include "loophole/threshold.hpp"
#include "loophole/vertices.hpp"

using namespace loophole;

TEST_CASE("local bound: serial and parallel reductions agree") {
    for (const char* name : {"witness_2in.ineq", "witness_3in.ineq", "witness_4in.ineq"}) {
        const auto s = bell::load_matrix_file(bell::default_data_dir() + "/" + std::string(name));
        CHECK(bell::local_bound(s, std::uint64_t(1) << 24, Exec::Serial) ==
              bell::local_bound(s, std::uint64_t(1) << 24, Exec::Parallel));
    }
}

TEST_CASE("extremal enumeration: identical vertex lists") {
    const auto a = enumerate_binary_extremals(2, 3, 1 << 20, Exec::Serial);
    const auto b = enumerate_binary_extremals(2, 3, 1 << 20, Exec::Parallel);
    CHECK(a.size() == b.size());
    CHECK(a == b);
}

TEST_CASE("simulation: chunked streams merge identically") {
    const auto g = generalized_pr_g(3, 3);
    const detect::StrategyParams params{Rational(1, 3), Rational(1, 13)};
    for (std::uint64_t trials : {1ull, 8191ull, 8192ull, 100001ull}) {
        const auto s = detect::simulate_protocol(detect::StrategyKind::TwoGuess, g, params,
                                                 trials, 5, Exec::Serial);
        const auto p = detect::simulate_protocol(detect::StrategyKind::TwoGuess, g, params,
                                                 trials, 5, Exec::Parallel);
        CHECK(s.counts == p.counts);
        std::uint64_t total = 0;
        for (auto c : s.counts) total += c;
        CHECK(total == trials);
    }
}

TEST_CASE("scenario threshold: same bracket either way") {
    const auto points = enumerate_binary_extremals(2, 2);
    const auto s = threshold::scenario_threshold(points, Rational(1, 64), Exec::Serial);
    const auto p = threshold::scenario_threshold(points, Rational(1, 64), Exec::Parallel);
    CHECK(s.lower == p.lower);
    CHECK(s.upper == p.upper);
    CHECK(s.argmin == p.argmin);
}
