#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "loophole/core.hpp"
#include "loophole/exec.hpp"
#include "loophole/rng.hpp"
#include "loophole/vertices.hpp"

namespace loophole::detect {

/// Per-device success probability of producing a real outcome instead of the
/// failure symbol.
struct Efficiency {
    Rational value;
    explicit Efficiency(Rational v);
};

/// The inefficiency map: adjoins a failure outcome to each party, keeping the
/// joint block with weight eta^2, mixed blocks with eta(1-eta) times the
/// surviving party's marginal, and a (1-eta)^2 joint-failure entry.
Distribution apply_detection_map(const Distribution& p, const Efficiency& eta);
inline Distribution apply_detection_map(const Distribution& p, const Rational& eta) {
    return apply_detection_map(p, Efficiency(eta));
}

enum class StrategyKind {
    SingleGuess,  // leader predicts one input, responder always answers
    TwoGuess,     // leader predicts two inputs plus a match/unmatch bit
};

struct StrategyParams {
    Rational alpha;  // leader bias toward Alexa
    Rational beta;   // joint-abort probability
};

/// Closed-form statistics of the preprogrammed-device strategy applied to p.
/// TwoGuess requires p to be a binary-correlation (G-function) box; the
/// structure is checked from the table. The output is local by construction.
Distribution strategy_statistics(StrategyKind kind, const Distribution& p,
                                 const StrategyParams& params);

/// Highest efficiency the strategy replicates exactly, as a closed formula:
/// SingleGuess gives (mA+mB-2)/(mA mB - 1); TwoGuess gives
/// 2(mA+mB-8)/(mA mB - 16), simplifying to 4/(m+4) when mA = mB = m (which
/// also covers m = 4). Returns nullopt when the strategy offers no valid
/// guarantee for the pair.
std::optional<Rational> strategy_threshold(StrategyKind kind, int mA, int mB);

/// Exact parameters making strategy_statistics reproduce the detection map at
/// efficiency eta for every admissible p, or nullopt when the coefficient
/// equations have no solution in [0,1]^2 at this eta.
std::optional<StrategyParams> solve_params_for_eta(StrategyKind kind, int mA, int mB,
                                                   const Rational& eta);

struct MixtureComponent {
    Rational weight;
    StrategyKind kind;
    Rational alpha;
};

/// Mixes per-component strategy statistics at abort 0, then blends the result
/// with the all-failure point at weight beta.
Distribution mixture_statistics(const Distribution& p,
                                const std::vector<MixtureComponent>& components,
                                const Rational& beta);

/// Success scaling of an n-prediction variant: n / (mA 2^(n-1)). Maximal at
/// n = 1 and n = 2 only.
Rational n_guess_success_scaling(int n, int mA);

/// Appends Bob inputs to a binary-correlation box by aliasing each new input
/// y to input y mod mB; the detection threshold downstream is unchanged.
Distribution extend_inputs(const Distribution& p, int mB_new);

// --- Monte-Carlo protocol simulation ---------------------------------------

/// Shared randomness drawn per run. k2/match are used by TwoGuess only.
struct HiddenVariable {
    bool abort = false;
    int leader = 0;  // 0 = Alexa, 1 = Boris
    int k1 = 0;
    int k2 = 0;
    bool match = false;
    int leader_output = 0;
};

HiddenVariable draw_hidden_variable(StrategyKind kind, int mA, int mB,
                                    const StrategyParams& params, SplitMix64& rng);

/// Local response rules; outcomes use post-map indexing (failure = 2).
int respond_alexa(StrategyKind kind, const GFunction& g, const HiddenVariable& hv, int x);
int respond_boris(StrategyKind kind, const GFunction& g, const HiddenVariable& hv, int y);

struct SimulationResult {
    Scenario scenario;  // post-map: (mA, mB, 3, 3)
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> counts;  // flat canonical order

    std::uint64_t cell_trials(int x, int y) const;
    /// Empirical conditional frequency p(ab|xy) as an exact count ratio.
    Rational frequency(int x, int y, int a, int b) const;
};

/// Runs the protocol with uniformly drawn inputs. Deterministic for a fixed
/// seed: trials are split into fixed-size chunks with derived stream seeds,
/// so any worker count yields the identical table.
SimulationResult simulate_protocol(StrategyKind kind, const GFunction& g,
                                   const StrategyParams& params, std::uint64_t trials,
                                   std::uint64_t seed, Exec exec = Exec::Parallel);

/// Total-variation distance between the empirical table and a closed-form
/// conditional table, both weighted by the uniform input distribution.
Rational tv_distance_uniform_inputs(const SimulationResult& sim, const Distribution& closed);

/// Largest per-cell deviation measured in standard errors of the closed-form
/// conditional probability. Cells with closed-form probability 0 or 1 must
/// match exactly; a mismatch there reports an infinite deviation.
double max_deviation_std_errors(const SimulationResult& sim, const Distribution& closed);

}  // namespace loophole::detect
