#include "loophole/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace loophole::detect {

namespace {

const Rational kZero(0), kOne(1), kHalf(1, 2);

void require_unit_interval(const Rational& v, const char* what) {
    if (v < kZero || v > kOne)
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

std::vector<Rational> alice_marginals(const Distribution& p) {
    const Scenario& sc = p.scenario();
    std::vector<Rational> m(static_cast<std::size_t>(sc.mA) * sc.nA);
    for (int x = 0; x < sc.mA; ++x)
        for (int a = 0; a < sc.nA; ++a) m[x * sc.nA + a] = marginal_a(p, a, x);
    return m;
}

std::vector<Rational> bob_marginals(const Distribution& p) {
    const Scenario& sc = p.scenario();
    std::vector<Rational> m(static_cast<std::size_t>(sc.mB) * sc.nB);
    for (int y = 0; y < sc.mB; ++y)
        for (int b = 0; b < sc.nB; ++b) m[y * sc.nB + b] = marginal_b(p, b, y);
    return m;
}

}  // namespace

Efficiency::Efficiency(Rational v) : value(std::move(v)) {
    require_unit_interval(value, "Efficiency");
}

Distribution apply_detection_map(const Distribution& p, const Efficiency& eta) {
    require_valid(p, "apply_detection_map");
    const Scenario& sc = p.scenario();
    const Scenario post = sc.with_failure_outcome();
    const int fa = failure_outcome(post.nA), fb = failure_outcome(post.nB);

    const Rational& e = eta.value;
    const Rational miss = kOne - e;
    const Rational joint = e * e, mixed = e * miss, both = miss * miss;
    const auto pa = alice_marginals(p);
    const auto pb = bob_marginals(p);

    std::vector<Rational> t(post.table_size());
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            for (int a = 0; a < sc.nA; ++a)
                for (int b = 0; b < sc.nB; ++b)
                    t[post.index(x, y, a, b)] = joint * p(x, y, a, b);
            for (int a = 0; a < sc.nA; ++a)
                t[post.index(x, y, a, fb)] = mixed * pa[x * sc.nA + a];
            for (int b = 0; b < sc.nB; ++b)
                t[post.index(x, y, fa, b)] = mixed * pb[y * sc.nB + b];
            t[post.index(x, y, fa, fb)] = both;
        }
    return Distribution(post, std::move(t));
}

Distribution strategy_statistics(StrategyKind kind, const Distribution& p,
                                 const StrategyParams& params) {
    require_valid(p, "strategy_statistics");
    require_unit_interval(params.alpha, "alpha");
    require_unit_interval(params.beta, "beta");
    const Scenario& sc = p.scenario();
    const Rational rmA(sc.mA), rmB(sc.mB);
    const Rational& alpha = params.alpha;
    const Rational om_alpha = kOne - alpha;

    Rational c_joint = alpha / rmA + om_alpha / rmB;
    Rational c_fb, c_af, c_ff;
    if (kind == StrategyKind::SingleGuess) {
        c_fb = alpha * Rational(sc.mA - 1, sc.mA);
        c_af = om_alpha * Rational(sc.mB - 1, sc.mB);
        c_ff = kZero;
    } else {
        if (!g_function_of(p))
            throw std::invalid_argument(
                "strategy_statistics: TwoGuess requires a binary-correlation box");
        const Rational half_miss_a(sc.mA - 2, 2 * sc.mA), half_miss_b(sc.mB - 2, 2 * sc.mB);
        c_fb = alpha * half_miss_a + om_alpha / rmB;
        c_af = alpha / rmA + om_alpha * half_miss_b;
        c_ff = alpha * half_miss_a + om_alpha * half_miss_b;
    }

    const Scenario post = sc.with_failure_outcome();
    const int fa = failure_outcome(post.nA), fb = failure_outcome(post.nB);
    const Rational omb = kOne - params.beta;
    const auto pa = alice_marginals(p);
    const auto pb = bob_marginals(p);

    std::vector<Rational> t(post.table_size());
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            for (int a = 0; a < sc.nA; ++a)
                for (int b = 0; b < sc.nB; ++b)
                    t[post.index(x, y, a, b)] = omb * c_joint * p(x, y, a, b);
            for (int a = 0; a < sc.nA; ++a)
                t[post.index(x, y, a, fb)] = omb * c_af * pa[x * sc.nA + a];
            for (int b = 0; b < sc.nB; ++b)
                t[post.index(x, y, fa, b)] = omb * c_fb * pb[y * sc.nB + b];
            t[post.index(x, y, fa, fb)] = params.beta + omb * c_ff;
        }
    return Distribution(post, std::move(t));
}

namespace {

struct Replication {
    StrategyParams params;
    Rational eta;
};

/// Solves the coefficient-matching equations between the detection map and
/// the strategy statistics. Each strategy admits at most one exact match:
/// the failure-vs-success ratios pin the leader bias and then the efficiency.
std::optional<Replication> exact_replication_point(StrategyKind kind, int mA, int mB) {
    Rational alpha, beta, eta;
    if (kind == StrategyKind::SingleGuess) {
        const Rational u(mA - 1, mA), v(mB - 1, mB);
        alpha = v / (u + v);
        const Rational w = alpha * u;
        eta = (kOne - Rational(2) * w) / (kOne - w);
        beta = (kOne - eta) * (kOne - eta);
    } else {
        if (mA == mB) {
            alpha = kHalf;
        } else {
            const Rational ca(mA - 4, 2 * mA), cb(mB - 4, 2 * mB);
            if (ca + cb == kZero) return std::nullopt;  // alpha equation inconsistent
            alpha = cb / (ca + cb);
        }
        if (alpha < kZero || alpha > kOne) return std::nullopt;
        const Rational c1 = alpha / Rational(mA) + (kOne - alpha) / Rational(mB);
        const Rational c2 = alpha * Rational(mA - 2, 2 * mA) + (kOne - alpha) / Rational(mB);
        eta = c1 / (c1 + c2);
        beta = kOne - eta * eta / c1;
    }
    if (!(eta > kZero && eta <= kOne)) return std::nullopt;
    if (beta < kZero || beta > kOne) return std::nullopt;

    // Defensive check of all four coefficient identities.
    const Rational omb = kOne - beta, om_alpha = kOne - alpha;
    Rational c_joint = alpha / Rational(mA) + om_alpha / Rational(mB);
    Rational c_fb, c_af, c_ff;
    if (kind == StrategyKind::SingleGuess) {
        c_fb = alpha * Rational(mA - 1, mA);
        c_af = om_alpha * Rational(mB - 1, mB);
        c_ff = kZero;
    } else {
        c_fb = alpha * Rational(mA - 2, 2 * mA) + om_alpha / Rational(mB);
        c_af = alpha / Rational(mA) + om_alpha * Rational(mB - 2, 2 * mB);
        c_ff = alpha * Rational(mA - 2, 2 * mA) + om_alpha * Rational(mB - 2, 2 * mB);
    }
    const Rational miss = kOne - eta;
    if (omb * c_joint != eta * eta) return std::nullopt;
    if (omb * c_fb != eta * miss) return std::nullopt;
    if (omb * c_af != eta * miss) return std::nullopt;
    if (beta + omb * c_ff != miss * miss) return std::nullopt;
    return Replication{{alpha, beta}, eta};
}

}  // namespace

std::optional<Rational> strategy_threshold(StrategyKind kind, int mA, int mB) {
    if (mA < 2 || mB < 2) throw std::invalid_argument("strategy_threshold: mA, mB >= 2");
    if (kind == StrategyKind::SingleGuess)
        return Rational(mA + mB - 2) / Rational(mA * mB - 1);

    if (mA == mB) return Rational(4) / Rational(mA + 4);
    if (mA * mB == 16) return std::nullopt;  // degenerate formula, no symmetric rescue
    const Rational v = Rational(2 * (mA + mB - 8)) / Rational(mA * mB - 16);
    if (!(v > kZero && v <= kOne)) return std::nullopt;
    // The formula only certifies a strategy when the coefficient equations
    // admit parameters in [0,1]^2 at that efficiency.
    const auto rep = exact_replication_point(kind, mA, mB);
    if (!rep || rep->eta != v) return std::nullopt;
    return v;
}

std::optional<StrategyParams> solve_params_for_eta(StrategyKind kind, int mA, int mB,
                                                   const Rational& eta) {
    if (mA < 2 || mB < 2) throw std::invalid_argument("solve_params_for_eta: mA, mB >= 2");
    if (!(eta > kZero && eta <= kOne))
        throw std::invalid_argument("solve_params_for_eta: eta must lie in (0, 1]");
    const auto rep = exact_replication_point(kind, mA, mB);
    if (rep && rep->eta == eta) return rep->params;
    return std::nullopt;
}

Distribution mixture_statistics(const Distribution& p,
                                const std::vector<MixtureComponent>& components,
                                const Rational& beta) {
    if (components.empty()) throw std::invalid_argument("mixture_statistics: no components");
    require_unit_interval(beta, "beta");
    Rational total;
    for (const auto& c : components) {
        if (c.weight < kZero) throw std::invalid_argument("mixture_statistics: negative weight");
        total += c.weight;
    }
    if (total != kOne) throw std::invalid_argument("mixture_statistics: weights must sum to 1");

    std::vector<std::pair<Rational, Distribution>> terms;
    for (const auto& c : components)
        terms.emplace_back(c.weight, strategy_statistics(c.kind, p, {c.alpha, kZero}));
    Distribution mixed = convex_combine(terms);
    if (beta.is_zero()) return mixed;

    const Scenario post = mixed.scenario();
    const int fa = failure_outcome(post.nA), fb = failure_outcome(post.nB);
    std::vector<Rational> ff(post.table_size());
    for (int x = 0; x < post.mA; ++x)
        for (int y = 0; y < post.mB; ++y) ff[post.index(x, y, fa, fb)] = kOne;
    return convex_combine({{kOne - beta, mixed}, {beta, Distribution(post, std::move(ff))}});
}

Rational n_guess_success_scaling(int n, int mA) {
    if (n < 1 || n > mA) throw std::invalid_argument("n_guess_success_scaling: need 1 <= n <= mA");
    Rational r(n, mA);
    for (int i = 1; i < n; ++i) r /= Rational(2);
    return r;
}

Distribution extend_inputs(const Distribution& p, int mB_new) {
    const auto g = g_function_of(p);
    if (!g) throw std::invalid_argument("extend_inputs: input must be a binary-correlation box");
    if (mB_new <= g->cols()) throw std::invalid_argument("extend_inputs: mB_new must exceed mB");
    GFunction ext(g->rows(), mB_new);
    for (int x = 0; x < g->rows(); ++x)
        for (int y = 0; y < mB_new; ++y) ext.set(x, y, g->at(x, y % g->cols()));
    return from_g_function(ext);
}

// --- Monte-Carlo protocol simulation ---------------------------------------

namespace {

bool bernoulli(SplitMix64& rng, const Rational& p) {
    if (p.is_zero()) return false;
    if (p == kOne) return true;
    const mpq_class& q = p.raw();
    if (mpz_fits_ulong_p(q.get_den().get_mpz_t())) {
        const std::uint64_t den = mpz_get_ui(q.get_den().get_mpz_t());
        const std::uint64_t num = mpz_get_ui(q.get_num().get_mpz_t());
        return rng.bounded(den) < num;
    }
    return rng.next() < static_cast<std::uint64_t>(p.to_double() * 1.8446744073709552e19);
}

constexpr int kFail = 2;
constexpr std::uint64_t kChunkTrials = 8192;

}  // namespace

HiddenVariable draw_hidden_variable(StrategyKind kind, int mA, int mB,
                                    const StrategyParams& params, SplitMix64& rng) {
    HiddenVariable hv;
    hv.abort = bernoulli(rng, params.beta);
    if (hv.abort) return hv;
    hv.leader = bernoulli(rng, params.alpha) ? 0 : 1;
    const int m_leader = hv.leader == 0 ? mA : mB;
    hv.k1 = static_cast<int>(rng.bounded(m_leader));
    if (kind == StrategyKind::TwoGuess) {
        hv.k2 = static_cast<int>(rng.bounded(m_leader - 1));
        if (hv.k2 >= hv.k1) ++hv.k2;
        hv.match = rng.bit();
    }
    hv.leader_output = rng.bit() ? 1 : 0;
    return hv;
}

int respond_alexa(StrategyKind kind, const GFunction& g, const HiddenVariable& hv, int x) {
    if (hv.abort) return kFail;
    if (hv.leader == 0) {
        if (x == hv.k1) return hv.leader_output;
        if (kind == StrategyKind::TwoGuess && x == hv.k2)
            return hv.match ? hv.leader_output : hv.leader_output ^ 1;
        return kFail;
    }
    // Boris leads; Alexa answers whenever her correlation target is determined.
    if (kind == StrategyKind::SingleGuess) return hv.leader_output ^ g.at(x, hv.k1);
    const bool statuses_equal = g.at(x, hv.k1) == g.at(x, hv.k2);
    if (statuses_equal == hv.match) return hv.leader_output ^ g.at(x, hv.k1);
    return kFail;
}

int respond_boris(StrategyKind kind, const GFunction& g, const HiddenVariable& hv, int y) {
    if (hv.abort) return kFail;
    if (hv.leader == 1) {
        if (y == hv.k1) return hv.leader_output;
        if (kind == StrategyKind::TwoGuess && y == hv.k2)
            return hv.match ? hv.leader_output : hv.leader_output ^ 1;
        return kFail;
    }
    if (kind == StrategyKind::SingleGuess) return hv.leader_output ^ g.at(hv.k1, y);
    const bool statuses_equal = g.at(hv.k1, y) == g.at(hv.k2, y);
    if (statuses_equal == hv.match) return hv.leader_output ^ g.at(hv.k1, y);
    return kFail;
}

std::uint64_t SimulationResult::cell_trials(int x, int y) const {
    std::uint64_t n = 0;
    for (int a = 0; a < scenario.nA; ++a)
        for (int b = 0; b < scenario.nB; ++b) n += counts[scenario.index(x, y, a, b)];
    return n;
}

Rational SimulationResult::frequency(int x, int y, int a, int b) const {
    const std::uint64_t n = cell_trials(x, y);
    if (n == 0) return Rational(0);
    return Rational(static_cast<long>(counts[scenario.index(x, y, a, b)]), static_cast<long>(n));
}

SimulationResult simulate_protocol(StrategyKind kind, const GFunction& g,
                                   const StrategyParams& params, std::uint64_t trials,
                                   std::uint64_t seed, Exec exec) {
    if (trials == 0) throw std::invalid_argument("simulate_protocol: trials >= 1");
    require_unit_interval(params.alpha, "alpha");
    require_unit_interval(params.beta, "beta");
    const int mA = g.rows(), mB = g.cols();
    SimulationResult res{Scenario(mA, mB, 3, 3), trials, {}};
    res.counts.assign(res.scenario.table_size(), 0);

    const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
    auto run_chunk = [&](std::uint64_t ci, std::vector<std::uint64_t>& local) {
        SplitMix64 rng(derive_stream_seed(seed, ci));
        const std::uint64_t begin = ci * kChunkTrials;
        const std::uint64_t end = std::min(trials, begin + kChunkTrials);
        for (std::uint64_t t = begin; t < end; ++t) {
            const int x = static_cast<int>(rng.bounded(mA));
            const int y = static_cast<int>(rng.bounded(mB));
            const HiddenVariable hv = draw_hidden_variable(kind, mA, mB, params, rng);
            const int a = respond_alexa(kind, g, hv, x);
            const int b = respond_boris(kind, g, hv, y);
            ++local[res.scenario.index(x, y, a, b)];
        }
    };

    if (exec == Exec::Serial) {
        std::vector<std::uint64_t> local(res.counts.size());
        for (std::uint64_t ci = 0; ci < chunks; ++ci) run_chunk(ci, local);
        res.counts = std::move(local);
    } else {
#pragma omp parallel
        {
            std::vector<std::uint64_t> local(res.counts.size(), 0);
#pragma omp for schedule(static)
            for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(chunks); ++ci)
                run_chunk(static_cast<std::uint64_t>(ci), local);
#pragma omp critical
            {
                for (std::size_t i = 0; i < local.size(); ++i) res.counts[i] += local[i];
            }
        }
    }
    return res;
}

Rational tv_distance_uniform_inputs(const SimulationResult& sim, const Distribution& closed) {
    if (!(closed.scenario() == sim.scenario))
        throw std::invalid_argument("tv_distance: scenario mismatch");
    const Scenario& sc = sim.scenario;
    const Rational cells(static_cast<long>(sc.mA) * sc.mB);
    Rational sum;
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y)
            for (int a = 0; a < sc.nA; ++a)
                for (int b = 0; b < sc.nB; ++b) {
                    const Rational emp(static_cast<long>(sim.counts[sc.index(x, y, a, b)]),
                                       static_cast<long>(sim.trials));
                    sum += abs(emp - closed(x, y, a, b) / cells);
                }
    return sum / Rational(2);
}

double max_deviation_std_errors(const SimulationResult& sim, const Distribution& closed) {
    if (!(closed.scenario() == sim.scenario))
        throw std::invalid_argument("max_deviation_std_errors: scenario mismatch");
    const Scenario& sc = sim.scenario;
    double worst = 0.0;
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            const std::uint64_t n = sim.cell_trials(x, y);
            for (int a = 0; a < sc.nA; ++a)
                for (int b = 0; b < sc.nB; ++b) {
                    const double p = closed(x, y, a, b).to_double();
                    const std::uint64_t c = sim.counts[sc.index(x, y, a, b)];
                    if (p <= 0.0 || p >= 1.0) {
                        const bool exact = (p <= 0.0 && c == 0) || (p >= 1.0 && c == n);
                        if (!exact) return std::numeric_limits<double>::infinity();
                        continue;
                    }
                    if (n == 0) return std::numeric_limits<double>::infinity();
                    const double phat = static_cast<double>(c) / static_cast<double>(n);
                    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
                    worst = std::max(worst, std::abs(phat - p) / se);
                }
        }
    return worst;
}

}  // namespace loophole::detect
