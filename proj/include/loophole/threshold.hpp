#pragma once

#include <string>
#include <vector>

#include "loophole/core.hpp"
#include "loophole/exec.hpp"
#include "loophole/lp.hpp"

namespace loophole::threshold {

/// Exact locality test: the local weight of q equals 1.
bool is_local(const Distribution& q);

struct BisectionSample {
    Rational eta;
    bool local;
};

struct PointThreshold {
    std::string point_id;
    Rational lower;  // largest tested efficiency with a local image
    Rational upper;  // smallest tested efficiency with a nonlocal image
    bool local_at_one = false;  // the image stays local all the way to 1

    lp::LocalWeightResult certificate_local;     // weight-1 decomposition at lower
    std::vector<Rational> certificate_nonlocal;  // dual witness at upper
    Rational nonlocal_weight;                    // local weight at upper (< 1)

    std::vector<BisectionSample> trace;  // all sampled efficiencies, audited monotone

    // Exact-candidate mode only.
    bool candidate_mode = false;
    bool certified = false;
    Rational candidate, eps;
    std::string failure_reason;
};

/// Bisects the efficiency until the bracket is no wider than gap. Locality is
/// assumed monotone in the efficiency; every sample lands in the audit trace
/// and a non-monotone trace raises an error.
PointThreshold point_threshold(const Distribution& p, const Rational& gap = Rational(1, 4096),
                               std::string point_id = "");

/// Certifies a conjectured exact threshold: the image must be local at the
/// candidate and nonlocal at candidate + eps.
PointThreshold point_threshold_exact(const Distribution& p, const Rational& candidate,
                                     const Rational& eps = Rational(1, 1000),
                                     std::string point_id = "");

struct ScenarioThreshold {
    Rational lower, upper;  // bracket for the minimum over the points
    std::size_t argmin = 0;
    std::vector<PointThreshold> per_point;
};

/// Minimum per-point threshold over a family of same-scenario points; the
/// per-point searches run independently in parallel.
ScenarioThreshold scenario_threshold(const std::vector<Distribution>& points,
                                     const Rational& gap = Rational(1, 4096),
                                     Exec exec = Exec::Parallel);

}  // namespace loophole::threshold
