// Times the OpenMP kernels against their serial reference implementations.

#include <chrono>
#include <cstdio>

#include "loophole/bell.hpp"
#include "loophole/detect.hpp"
#include "loophole/exec.hpp"
#include "loophole/threshold.hpp"
#include "loophole/vertices.hpp"

using namespace loophole;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto t0 = Clock::now();
    f();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx   identical: %s\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, identical ? "yes" : "NO");
}

}  // namespace

int main() {
    std::printf("workers available: %d\n\n", worker_count());

    {
        const auto s = bell::load_matrix_file(bell::default_data_dir() + "/witness_4in.ineq");
        Rational a, b;
        const double ts = time_ms([&] { a = bell::local_bound(s, std::uint64_t(1) << 24, Exec::Serial); });
        const double tp = time_ms([&] { b = bell::local_bound(s, std::uint64_t(1) << 24, Exec::Parallel); });
        report("local_bound (6561 points)", ts, tp, a == b);
    }
    {
        std::vector<Distribution> a, b;
        const double ts = time_ms([&] { a = enumerate_binary_extremals(3, 3, 1 << 20, Exec::Serial); });
        const double tp = time_ms([&] { b = enumerate_binary_extremals(3, 3, 1 << 20, Exec::Parallel); });
        report("enumerate_binary_extremals", ts, tp, a == b);
    }
    {
        const auto g = generalized_pr_g(2, 2);
        const detect::StrategyParams params{Rational(1, 2), Rational(1, 9)};
        detect::SimulationResult a{Scenario(2, 2, 3, 3), 0, {}}, b{Scenario(2, 2, 3, 3), 0, {}};
        const double ts = time_ms(
            [&] { a = detect::simulate_protocol(detect::StrategyKind::TwoGuess, g, params, 4000000, 7, Exec::Serial); });
        const double tp = time_ms(
            [&] { b = detect::simulate_protocol(detect::StrategyKind::TwoGuess, g, params, 4000000, 7, Exec::Parallel); });
        report("simulate_protocol (4M runs)", ts, tp, a.counts == b.counts);
    }
    {
        const auto points = enumerate_binary_extremals(2, 2);
        threshold::ScenarioThreshold a, b;
        const double ts = time_ms([&] { a = threshold::scenario_threshold(points, Rational(1, 256), Exec::Serial); });
        const double tp = time_ms([&] { b = threshold::scenario_threshold(points, Rational(1, 256), Exec::Parallel); });
        report("scenario_threshold (8 pts)", ts, tp, a.lower == b.lower && a.upper == b.upper);
    }
    return 0;
}
