// End-to-end checks of the command-line tool: exit codes, output schemas, and
// reproducibility of the primary output files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    static int counter = 0;
    const std::string base = "/tmp/loophole_cli_" + std::to_string(counter++);
    const std::string cmd = std::string(LOOPHOLE_CLI_PATH) + " " + args + " > " + base +
                            ".out 2> " + base + ".err";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(base + ".out");
    r.err = slurp(base + ".err");
    return r;
}

/// Minimal structural validator for the schema subset used in data/schemas:
/// type, required, properties, items, pattern, enum.
bool validate_schema(const json& schema, const json& value, std::string& err) {
    if (schema.contains("type")) {
        const std::string t = schema["type"];
        const bool ok = (t == "object" && value.is_object()) ||
                        (t == "array" && value.is_array()) ||
                        (t == "string" && value.is_string()) ||
                        (t == "integer" && value.is_number_integer()) ||
                        (t == "number" && value.is_number()) ||
                        (t == "boolean" && value.is_boolean());
        if (!ok) { err = "type mismatch, expected " + t; return false; }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema["enum"]) found |= e == value;
        if (!found) { err = "enum mismatch"; return false; }
    }
    if (schema.contains("pattern") && value.is_string()) {
        const std::regex re(schema["pattern"].get<std::string>());
        if (!std::regex_match(value.get<std::string>(), re)) {
            err = "pattern mismatch on '" + value.get<std::string>() + "'";
            return false;
        }
    }
    if (schema.contains("required"))
        for (const auto& key : schema["required"])
            if (!value.contains(key.get<std::string>())) {
                err = "missing required key " + key.get<std::string>();
                return false;
            }
    if (schema.contains("properties") && value.is_object())
        for (const auto& [key, sub] : schema["properties"].items())
            if (value.contains(key))
                if (!validate_schema(sub, value[key], err)) {
                    err = key + ": " + err;
                    return false;
                }
    if (schema.contains("items") && value.is_array())
        for (const auto& item : value)
            if (!validate_schema(schema["items"], item, err)) return false;
    return true;
}

bool check_schema(const std::string& schema_name, const std::string& text) {
    const json schema = json::parse(slurp(std::string(LOOPHOLE_SCHEMA_DIR) + "/" + schema_name));
    std::string err;
    const bool ok = validate_schema(schema, json::parse(text), err);
    if (!ok) MESSAGE(schema_name, ": ", err);
    return ok;
}

}  // namespace

TEST_CASE("gen writes a schema-valid distribution and is reproducible") {
    const auto r1 = run("gen pr 2 2 -o /tmp/loophole_pr22.json");
    CHECK(r1.exit_code == 0);
    const auto r2 = run("gen pr22 -o /tmp/loophole_pr22_alias.json");
    CHECK(r2.exit_code == 0);
    const std::string a = slurp("/tmp/loophole_pr22.json");
    CHECK(a == slurp("/tmp/loophole_pr22_alias.json"));  // byte-identical
    CHECK(check_schema("distribution.schema.json", a));
    const json j = json::parse(a);
    CHECK(j["table"][0] == "1/2");
}

TEST_CASE("detect-map then local-weight certifies the two-input threshold") {
    REQUIRE(run("gen pr 2 2 -o /tmp/loophole_pr22.json").exit_code == 0);
    REQUIRE(run("detect-map /tmp/loophole_pr22.json --eta 2/3 -o /tmp/loophole_pr22_map.json")
                .exit_code == 0);
    CHECK(check_schema("distribution.schema.json", slurp("/tmp/loophole_pr22_map.json")));

    const auto lw = run("local-weight /tmp/loophole_pr22_map.json");
    CHECK(lw.exit_code == 0);
    CHECK(check_schema("local_weight_report.schema.json", lw.out));
    CHECK(json::parse(lw.out)["w"] == "1");

    const auto nl = run("local-weight /tmp/loophole_pr22.json --dual-out /tmp/loophole_pr22.dual");
    CHECK(nl.exit_code == 0);
    CHECK(json::parse(nl.out)["w"] == "0");
    CHECK(slurp("/tmp/loophole_pr22.dual").find("# scenario 2 2 2 2") != std::string::npos);
}

TEST_CASE("threshold candidate mode emits a certified report") {
    const auto r = run("threshold pr 2 2 --candidate 2/3 --eps 1/1000 -o /tmp/loophole_th22");
    CHECK(r.exit_code == 0);
    const std::string report = slurp("/tmp/loophole_th22.json");
    CHECK(check_schema("threshold_report.schema.json", report));
    const json j = json::parse(report);
    CHECK(j["mode"] == "candidate");
    CHECK(j["certified"] == true);
    CHECK(j["lower"] == "2/3");
    // certificates land next to the report
    CHECK(check_schema("local_weight_report.schema.json",
                       slurp(j["certificate_local_file"].get<std::string>())));
}

TEST_CASE("verify-inequality on the bundled witnesses") {
    const auto r = run("verify-inequality witness_3in --point pr33 --eta-star 4/7");
    CHECK(r.exit_code == 0);
    CHECK(check_schema("verify_report.schema.json", r.out));
    CHECK(json::parse(r.out)["pass"] == true);

    const auto fail = run("verify-inequality witness_2in --point pr22 --eta-star 3/5");
    CHECK(fail.exit_code == 1);  // refuted certification is a domain failure
    CHECK(json::parse(fail.out)["pass"] == false);
}

TEST_CASE("local-bound and enumerate reports") {
    const auto lb = run("local-bound witness_2in");
    CHECK(lb.exit_code == 0);
    CHECK(check_schema("local_bound_report.schema.json", lb.out));
    CHECK(json::parse(lb.out)["bound"] == "1");

    const auto en = run("enumerate 2 2");
    CHECK(en.exit_code == 0);
    CHECK(check_schema("enumerate_report.schema.json", en.out));
    CHECK(json::parse(en.out)["count"] == 8);
}

TEST_CASE("simulate report matches the schema and is seed-deterministic") {
    const std::string args =
        "simulate --strategy two-guess --g pr22 --alpha 1/2 --beta 1/9 --trials 200000 --seed 7";
    const auto r1 = run(args);
    CHECK(r1.exit_code == 0);
    CHECK(check_schema("simulate_report.schema.json", r1.out));
    const auto r2 = run(args);
    CHECK(r1.out == r2.out);
    const json j = json::parse(r1.out);
    CHECK(j["tv_distance_float"].get<double>() < 0.02);
}

TEST_CASE("exit codes: usage errors and domain errors") {
    CHECK(run("no-such-command").exit_code == 2);
    CHECK(run("gen").exit_code == 2);

    const auto domain = run("detect-map /tmp/definitely_missing_file.json --eta 1/2");
    CHECK(domain.exit_code == 1);
    CHECK(check_schema("error.schema.json", domain.err));
}
