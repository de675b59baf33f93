#include "loophole/threshold.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>

#include "loophole/detect.hpp"

namespace loophole::threshold {

namespace {

const Rational kZero(0), kOne(1);

void audit_monotone(const std::vector<BisectionSample>& trace) {
    // Valid bisection requires a single local-to-nonlocal crossing: every
    // local sample must lie strictly below every nonlocal one.
    for (const auto& lo : trace)
        for (const auto& hi : trace)
            if (lo.local && !hi.local && lo.eta >= hi.eta)
                throw std::runtime_error(
                    "threshold: locality is not monotone in the efficiency (local at " +
                    lo.eta.str() + ", nonlocal at " + hi.eta.str() + ")");
}

}  // namespace

bool is_local(const Distribution& q) { return lp::local_weight_cg(q).is_local(); }

PointThreshold point_threshold(const Distribution& p, const Rational& gap, std::string point_id) {
    if (gap <= kZero) throw std::invalid_argument("point_threshold: gap must be positive");
    require_valid(p, "point_threshold");

    PointThreshold res;
    res.point_id = std::move(point_id);

    auto full = lp::local_weight_cg(detect::apply_detection_map(p, kOne));
    if (full.is_local()) {
        res.local_at_one = true;
        res.lower = res.upper = kOne;
        res.certificate_local = std::move(full);
        res.trace.push_back({kOne, true});
        return res;
    }
    res.trace.push_back({kOne, false});
    res.upper = kOne;
    res.nonlocal_weight = full.w;
    res.certificate_nonlocal = std::move(full.dual);

    res.lower = kZero;
    bool have_local_cert = false;
    while (res.upper - res.lower > gap) {
        const Rational mid = (res.lower + res.upper) / Rational(2);
        auto r = lp::local_weight_cg(detect::apply_detection_map(p, mid));
        res.trace.push_back({mid, r.is_local()});
        if (r.is_local()) {
            res.lower = mid;
            res.certificate_local = std::move(r);
            have_local_cert = true;
        } else {
            res.upper = mid;
            res.nonlocal_weight = r.w;
            res.certificate_nonlocal = std::move(r.dual);
        }
    }
    if (!have_local_cert) {
        res.certificate_local = lp::local_weight_cg(detect::apply_detection_map(p, res.lower));
        res.trace.push_back({res.lower, res.certificate_local.is_local()});
    }
    audit_monotone(res.trace);
    if (!res.certificate_local.is_local())
        throw std::runtime_error("point_threshold: expected a local image at the lower bound");
    return res;
}

PointThreshold point_threshold_exact(const Distribution& p, const Rational& candidate,
                                     const Rational& eps, std::string point_id) {
    if (eps <= kZero) throw std::invalid_argument("point_threshold_exact: eps must be positive");
    if (candidate < kZero || candidate > kOne)
        throw std::invalid_argument("point_threshold_exact: candidate must lie in [0, 1]");
    require_valid(p, "point_threshold_exact");

    PointThreshold res;
    res.point_id = std::move(point_id);
    res.candidate_mode = true;
    res.candidate = candidate;
    res.eps = eps;

    auto full = lp::local_weight_cg(detect::apply_detection_map(p, kOne));
    res.trace.push_back({kOne, full.is_local()});
    if (full.is_local()) {
        res.local_at_one = true;
        res.lower = res.upper = kOne;
        res.certificate_local = std::move(full);
        res.certified = candidate == kOne;
        if (!res.certified) res.failure_reason = "image is local at every efficiency";
        return res;
    }

    auto at_candidate = lp::local_weight_cg(detect::apply_detection_map(p, candidate));
    res.trace.push_back({candidate, at_candidate.is_local()});
    const Rational above = std::min(kOne, candidate + eps);
    auto at_above = lp::local_weight_cg(detect::apply_detection_map(p, above));
    res.trace.push_back({above, at_above.is_local()});
    audit_monotone(res.trace);

    res.certified = at_candidate.is_local() && !at_above.is_local();
    if (!at_candidate.is_local())
        res.failure_reason = "image already nonlocal at the candidate (local weight " +
                             at_candidate.w.str() + ")";
    else if (at_above.is_local())
        res.failure_reason = "image still local at candidate + eps";

    res.lower = candidate;
    res.upper = above;
    res.certificate_local = std::move(at_candidate);
    res.nonlocal_weight = at_above.w;
    res.certificate_nonlocal = std::move(at_above.dual);
    return res;
}

ScenarioThreshold scenario_threshold(const std::vector<Distribution>& points, const Rational& gap,
                                     Exec exec) {
    if (points.empty()) throw std::invalid_argument("scenario_threshold: empty point list");
    const Scenario& sc = points.front().scenario();
    for (const auto& p : points)
        if (!(p.scenario() == sc))
            throw std::invalid_argument("scenario_threshold: scenario mismatch");

    ScenarioThreshold res;
    res.per_point.resize(points.size(), PointThreshold{});
    const auto n = static_cast<std::int64_t>(points.size());
    if (exec == Exec::Serial) {
        for (std::int64_t i = 0; i < n; ++i)
            res.per_point[i] = point_threshold(points[i], gap, "point-" + std::to_string(i));
    } else {
        std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                res.per_point[i] = point_threshold(points[i], gap, "point-" + std::to_string(i));
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }

    res.lower = res.per_point[0].lower;
    res.upper = res.per_point[0].upper;
    res.argmin = 0;
    for (std::size_t i = 1; i < res.per_point.size(); ++i) {
        res.lower = std::min(res.lower, res.per_point[i].lower);
        if (res.per_point[i].upper < res.upper) {
            res.upper = res.per_point[i].upper;
            res.argmin = i;
        }
    }
    return res;
}

}  // namespace loophole::threshold
