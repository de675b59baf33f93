// Command-line front end: generators, the detection map, local-weight solves,
// threshold certification, protocol simulation, and inequality verification.
// Every invocation is deterministic given its flags, input files, and --seed.

#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loophole/bell.hpp"
#include "loophole/core.hpp"
#include "loophole/detect.hpp"
#include "loophole/exec.hpp"
#include "loophole/json_io.hpp"
#include "loophole/lp.hpp"
#include "loophole/threshold.hpp"
#include "loophole/vertices.hpp"

using namespace loophole;
using nlohmann::json;

namespace {

bool g_float = false;

void put_rat(json& j, const std::string& key, const Rational& v) {
    j[key] = v.str();
    if (g_float) j[key + "_float"] = v.to_double();
}

json scenario_json(const Scenario& sc) {
    return {{"mA", sc.mA}, {"mB", sc.mB}, {"nA", sc.nA}, {"nB", sc.nB}};
}

bool is_pr_alias(const std::string& s) {
    return s.size() == 4 && s.rfind("pr", 0) == 0 && std::isdigit(s[2]) && std::isdigit(s[3]);
}

GFunction resolve_g(const std::string& spec) {
    if (is_pr_alias(spec)) return generalized_pr_g(spec[2] - '0', spec[3] - '0');
    std::ifstream in(spec);
    if (!in) throw std::runtime_error("cannot open G matrix file " + spec);
    std::stringstream ss;
    ss << in.rdbuf();
    return GFunction::parse(ss.str());
}

Distribution resolve_point(const std::string& spec) {
    if (is_pr_alias(spec)) return generalized_pr_box(spec[2] - '0', spec[3] - '0');
    return load_distribution(spec);
}

bell::BellInequality resolve_inequality(const std::string& spec) {
    if (std::ifstream probe(spec); probe) return bell::load_matrix_file(spec);
    const std::string bundled = bell::default_data_dir() + "/" + spec +
                                (spec.find('.') == std::string::npos ? ".ineq" : "");
    return bell::load_matrix_file(bundled);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << j.dump(2) << "\n";
    }
}

json local_weight_json(const lp::LocalWeightResult& r) {
    json j;
    put_rat(j, "w", r.w);
    j["local"] = r.is_local();
    auto& decomp = j["decomposition"] = json::array();
    for (const auto& [idx, weight] : r.decomposition) {
        json term;
        term["vertex"] = idx;
        put_rat(term, "weight", weight);
        decomp.push_back(term);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detection-loophole thresholds for no-signalling correlations"};
    app.require_subcommand(1);
    app.add_flag("--float", g_float, "also render numeric output as floating point");
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker count for parallel kernels (0 = default)");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a distribution");
    std::vector<std::string> gen_spec;
    std::string gen_out;
    gen->add_option("spec", gen_spec, "pr <mA> <mB> | gfun <file> | <prNM alias>")->required();
    gen->add_option("-o,--output", gen_out, "output file (default: stdout)");

    // detect-map
    auto* dmap = app.add_subcommand("detect-map", "apply the detection-efficiency map");
    std::string dmap_point, dmap_eta, dmap_out;
    dmap->add_option("point", dmap_point, "distribution file or prNM alias")->required();
    dmap->add_option("--eta", dmap_eta, "efficiency as num/den")->required();
    dmap->add_option("-o,--output", dmap_out, "output file (default: stdout)");

    // local-weight
    auto* lw = app.add_subcommand("local-weight", "exact local weight of a distribution");
    std::string lw_point, lw_dual_out;
    bool lw_full = false;
    lw->add_option("point", lw_point, "distribution file or prNM alias")->required();
    lw->add_option("--dual-out", lw_dual_out, "write the dual certificate in matrix format");
    lw->add_flag("--full", lw_full, "use the dense reference solver instead of column generation");

    // threshold
    auto* th = app.add_subcommand("threshold", "per-point or scenario detection threshold");
    std::vector<std::string> th_spec;
    std::string th_candidate, th_eps = "1/1000", th_gap = "1/4096", th_out;
    th->add_option("spec", th_spec,
                   "<file>|<prNM>|pr <mA> <mB>|gfun <file>|enumerate <mA> <mB>")
        ->required();
    th->add_option("--candidate", th_candidate, "certify an exact rational threshold");
    th->add_option("--eps", th_eps, "nonlocality margin for candidate mode");
    th->add_option("--gap", th_gap, "bisection bracket width");
    th->add_option("-o,--output", th_out, "report file; certificates saved alongside");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo run of an adversary strategy");
    std::string sim_strategy, sim_g, sim_alpha = "1/2", sim_beta = "0", sim_out;
    std::uint64_t sim_trials = 1000000, sim_seed = 0;
    sim->add_option("--strategy", sim_strategy, "single-guess | two-guess")->required();
    sim->add_option("--g", sim_g, "G matrix file or prNM alias")->required();
    sim->add_option("--alpha", sim_alpha, "leader bias toward Alexa");
    sim->add_option("--beta", sim_beta, "joint-abort probability");
    sim->add_option("--trials", sim_trials, "number of protocol runs");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("-o,--output", sim_out, "report file (default: stdout)");

    // verify-inequality
    auto* ver = app.add_subcommand("verify-inequality", "prove a threshold with a witness");
    std::string ver_file, ver_point, ver_eta;
    ver->add_option("inequality", ver_file, "matrix file or bundled name")->required();
    ver->add_option("--point", ver_point, "distribution file or prNM alias")->required();
    ver->add_option("--eta-star", ver_eta, "threshold to certify, num/den")->required();

    // local-bound
    auto* lb = app.add_subcommand("local-bound", "local bound of an inequality by enumeration");
    std::string lb_file;
    lb->add_option("inequality", lb_file, "matrix file or bundled name")->required();

    // enumerate
    auto* en = app.add_subcommand("enumerate", "nonlocal binary-outcome extremal points");
    int en_mA = 0, en_mB = 0;
    std::uint64_t en_cap = std::uint64_t(1) << 20;
    std::string en_out;
    en->add_option("mA", en_mA, "Alice input count")->required();
    en->add_option("mB", en_mB, "Bob input count")->required();
    en->add_option("--cap", en_cap, "candidate limit");
    en->add_option("-o,--output", en_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_worker_count(jobs);

        if (gen->parsed()) {
            Distribution d = [&]() {
                if (gen_spec.size() == 1 && is_pr_alias(gen_spec[0]))
                    return resolve_point(gen_spec[0]);
                if (gen_spec.size() == 3 && gen_spec[0] == "pr")
                    return generalized_pr_box(std::stoi(gen_spec[1]), std::stoi(gen_spec[2]));
                if (gen_spec.size() == 2 && gen_spec[0] == "gfun")
                    return from_g_function(resolve_g(gen_spec[1]));
                throw std::invalid_argument("gen: expected 'pr <mA> <mB>', 'gfun <file>' or prNM");
            }();
            emit(distribution_to_json(d), gen_out);
        } else if (dmap->parsed()) {
            const Distribution d = resolve_point(dmap_point);
            emit(distribution_to_json(
                     detect::apply_detection_map(d, Rational::parse(dmap_eta))),
                 dmap_out);
        } else if (lw->parsed()) {
            const Distribution d = resolve_point(lw_point);
            const auto r = lw_full ? lp::local_weight(d) : lp::local_weight_cg(d);
            json j = local_weight_json(r);
            if (!lw_dual_out.empty()) {
                if (!r.has_certificate())
                    throw std::runtime_error(
                        "local-weight: no dual certificate (the point is local)");
                bell::save_matrix_file(bell::from_dual(d.scenario(), r.dual), lw_dual_out);
                j["dual_file"] = lw_dual_out;
            }
            emit(j, "");
        } else if (th->parsed()) {
            std::vector<Distribution> points;
            std::string label;
            if (th_spec.size() == 1) {
                points.push_back(resolve_point(th_spec[0]));
                label = th_spec[0];
            } else if (th_spec.size() == 3 && th_spec[0] == "pr") {
                points.push_back(generalized_pr_box(std::stoi(th_spec[1]), std::stoi(th_spec[2])));
                label = "pr" + th_spec[1] + th_spec[2];
            } else if (th_spec.size() == 2 && th_spec[0] == "gfun") {
                points.push_back(from_g_function(resolve_g(th_spec[1])));
                label = th_spec[1];
            } else if (th_spec.size() == 3 && th_spec[0] == "enumerate") {
                points = enumerate_binary_extremals(std::stoi(th_spec[1]), std::stoi(th_spec[2]));
                label = "enumerate-" + th_spec[1] + "x" + th_spec[2];
            } else {
                throw std::invalid_argument("threshold: unrecognized point spec");
            }

            json j;
            j["point"] = label;
            if (!th_candidate.empty()) {
                if (points.size() != 1)
                    throw std::invalid_argument("threshold: --candidate needs a single point");
                auto r = threshold::point_threshold_exact(points[0],
                                                          Rational::parse(th_candidate),
                                                          Rational::parse(th_eps), label);
                j["mode"] = "candidate";
                j["certified"] = r.certified;
                put_rat(j, "lower", r.lower);
                put_rat(j, "upper", r.upper);
                put_rat(j, "candidate", r.candidate);
                put_rat(j, "eps", r.eps);
                if (!r.certified) j["failure_reason"] = r.failure_reason;
                if (!th_out.empty()) {
                    const std::string local_path = th_out + ".local.json";
                    emit(local_weight_json(r.certificate_local), local_path);
                    j["certificate_local_file"] = local_path;
                    if (!r.certificate_nonlocal.empty()) {
                        const std::string dual_path = th_out + ".dual.ineq";
                        bell::save_matrix_file(
                            bell::from_dual(points[0].scenario().with_failure_outcome(),
                                            r.certificate_nonlocal),
                            dual_path);
                        j["certificate_nonlocal_file"] = dual_path;
                    }
                }
            } else if (points.size() == 1) {
                auto r = threshold::point_threshold(points[0], Rational::parse(th_gap), label);
                j["mode"] = "bracket";
                put_rat(j, "lower", r.lower);
                put_rat(j, "upper", r.upper);
                j["local_at_one"] = r.local_at_one;
            } else {
                auto r = threshold::scenario_threshold(points, Rational::parse(th_gap));
                j["mode"] = "scenario";
                j["points"] = points.size();
                put_rat(j, "lower", r.lower);
                put_rat(j, "upper", r.upper);
                j["argmin"] = r.argmin;
            }
            emit(j, th_out.empty() ? "" : th_out + ".json");
        } else if (sim->parsed()) {
            detect::StrategyKind kind;
            if (sim_strategy == "single-guess") kind = detect::StrategyKind::SingleGuess;
            else if (sim_strategy == "two-guess") kind = detect::StrategyKind::TwoGuess;
            else throw std::invalid_argument("simulate: strategy must be single-guess or two-guess");

            const GFunction g = resolve_g(sim_g);
            const detect::StrategyParams params{Rational::parse(sim_alpha),
                                                Rational::parse(sim_beta)};
            const auto result = detect::simulate_protocol(kind, g, params, sim_trials, sim_seed);
            const Distribution closed = detect::strategy_statistics(kind, from_g_function(g), params);

            json j;
            j["strategy"] = sim_strategy;
            j["trials"] = result.trials;
            j["seed"] = sim_seed;
            j["scenario"] = scenario_json(result.scenario);
            auto& emp = j["empirical"] = json::array();
            auto& cf = j["closed_form"] = json::array();
            const Scenario& sc = result.scenario;
            Rational max_dev;
            for (int x = 0; x < sc.mA; ++x)
                for (int y = 0; y < sc.mB; ++y)
                    for (int a = 0; a < sc.nA; ++a)
                        for (int b = 0; b < sc.nB; ++b) {
                            const Rational f = result.frequency(x, y, a, b);
                            emp.push_back(f.str());
                            cf.push_back(closed(x, y, a, b).str());
                            max_dev = std::max(max_dev, abs(f - closed(x, y, a, b)));
                        }
            put_rat(j, "tv_distance", detect::tv_distance_uniform_inputs(result, closed));
            j["tv_distance_float"] = detect::tv_distance_uniform_inputs(result, closed).to_double();
            put_rat(j, "max_abs_deviation", max_dev);
            j["max_std_errors"] = detect::max_deviation_std_errors(result, closed);
            emit(j, sim_out);
        } else if (ver->parsed()) {
            const auto s = resolve_inequality(ver_file);
            const Distribution p = resolve_point(ver_point);
            const auto rep = bell::verify_threshold(s, p, Rational::parse(ver_eta));
            json j;
            j["pass"] = rep.pass;
            put_rat(j, "local_bound", rep.enumerated_bound);
            put_rat(j, "stated_bound", rep.stated_bound);
            put_rat(j, "eta_star", Rational::parse(ver_eta));
            put_rat(j, "value_at_eta_star", rep.value_at_eta_star);
            j["bound_attained"] = rep.bound_attained;
            j["violates_above"] = rep.violates_above;
            json quad;
            put_rat(quad, "c0", rep.value_poly.c0);
            put_rat(quad, "c1", rep.value_poly.c1);
            put_rat(quad, "c2", rep.value_poly.c2);
            j["quadratic"] = quad;
            emit(j, "");
            if (!rep.pass) {
                json err;
                err["error"] = {{"message", "threshold verification failed: " + rep.describe()},
                                {"kind", "domain"}};
                std::cerr << err.dump() << std::endl;
                return 1;
            }
        } else if (lb->parsed()) {
            const auto s = resolve_inequality(lb_file);
            json j;
            put_rat(j, "bound", bell::local_bound(s));
            put_rat(j, "stated_bound", s.bound);
            j["matches_stated"] = bell::local_bound(s) == s.bound;
            j["vertices"] = DeterministicVertices(s.scenario).size();
            emit(j, "");
        } else if (en->parsed()) {
            const auto vertices = enumerate_binary_extremals(en_mA, en_mB, en_cap);
            json j;
            j["scenario"] = scenario_json(Scenario(en_mA, en_mB, 2, 2));
            j["count"] = vertices.size();
            auto& arr = j["vertices"] = json::array();
            for (const auto& v : vertices) arr.push_back(distribution_to_json(v));
            emit(j, en_out);
        }
        return 0;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"message", e.what()}, {"kind", "domain"}};
        std::cerr << err.dump() << std::endl;
        return 1;
    }
}
