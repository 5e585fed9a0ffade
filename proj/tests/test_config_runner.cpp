#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sqrtsg/errors.hpp"
#include "sqrtsg/runner.hpp"

using namespace sqrtsg;

namespace {

const char* kSmall = R"(seed: 5
functions:
  - {name: dbl, body: "2*n"}
scenarios:
  - id: small
    space: {kind: hilbert, dim: 2}
    operator: {kind: scaled_identity, c: 1}
    initial_points:
      - [1, 0]
      - [0, -0.5]
    solver: {T: 12, h: 0.04, margin: 2}
    modulus: {kind: strongly_accretive, c: 1}
    rate_data: {M: 1}
    checks:
      fejer: true
      modulus: {samples: 500}
    sweeps:
      - {theorem: "4.1", k: [0, 1]}
      - {theorem: "4.2", k: [0], f: ["dbl(n) + 1"]}
      - {theorem: "5.1", k_range: [0, 1], f: ["0", "n"]}
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

void expect_config_error(const std::string& text, const std::string& needle, int line = 0) {
    try {
        (void)parse_config(text);
        FAIL("accepted: " << needle);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CAPTURE(msg);
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
        if (line > 0) CHECK(e.line() == line);
    }
}

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("parse a config") {
    const RunConfig cfg = parse_config(kSmall);
    CHECK(cfg.seed == 5);
    REQUIRE(cfg.scenarios.size() == 1);
    const ScenarioConfig& s = cfg.scenarios[0];
    CHECK(s.id == "small");
    CHECK(s.points.size() == 2);
    CHECK(s.solver.T == 12.0);
    CHECK(s.sweeps.size() == 3);
    CHECK(s.sweeps[1].fs[0](3) == 7);
    CHECK(s.checks.fejer);
    CHECK_FALSE(s.checks.apriori);
    CHECK(s.checks.modulus->samples == 500);
    CHECK(parse_config(kSmall, "<s>", 99).seed == 99);
}

TEST_CASE("config errors name the field and line") {
    expect_config_error(replace(kSmall, "rate_data: {M: 1}", "rate_data: {B: 2}"), "rate_data.M", 13);
    expect_config_error(replace(kSmall, "seed: 5\n", ""), "'seed'");
    expect_config_error(replace(kSmall, "c: 1}\n    initial", "c: 1, typo: 3}\n    initial"), "unknown field 'operator.typo'", 7);
    expect_config_error(replace(kSmall, "T: 12", "T: -12"), "solver.T");
    expect_config_error(replace(kSmall, "h: 0.04", "h: abc"), "solver.h");
    expect_config_error(replace(kSmall, "[0, -0.5]", "[0, -0.5, 1]"), "dimension");
    expect_config_error(replace(kSmall, "{theorem: \"4.1\", k: [0, 1]}", "{theorem: \"4.1\", k: [0], f: [\"1\"]}"),
                        "takes no counterfunctions");
    expect_config_error(replace(kSmall, "\"4.1\", k: [0, 1]", "\"4.7\", k: [0, 1]"), "4.7");
    expect_config_error(replace(kSmall, "dbl(n) + 1", "dbl(n) + * 1"), "column");
    expect_config_error(replace(kSmall, "rate_data: {M: 1}", "rate_data: {M: 1, b: 0.5}"), "b = 0.5", 13);
    expect_config_error(replace(kSmall, "scaled_identity, c: 1", "warp_drive, c: 1"), "unknown operator kind");
    expect_config_error(replace(kSmall, "    modulus: {kind: strongly_accretive, c: 1}\n", ""), "modulus");
    std::string dup = kSmall;
    dup += dup.substr(dup.find("  - id: small"));
    expect_config_error(dup, "duplicate scenario id");
    expect_config_error("seed: 1\nscenarios: [", "");
}

TEST_CASE("lp configs are sample-validated") {
    const std::string lp = R"(seed: 2
scenarios:
  - id: lp
    space: {kind: lp, dim: 2, p: 4, M: 0.3}
    operator: {kind: scaled_identity, c: 1}
    initial_points: [[0.5, 0.5]]
    solver: {T: 10, h: 0.05}
)";
    expect_config_error(lp, "violated by sampling", 4);
    CHECK_NOTHROW(parse_config(replace(lp, "M: 0.3", "M: 0.0005")));
    expect_config_error(replace(replace(lp, "M: 0.3", "M: 0.0005"), "solver: {T: 10, h: 0.05}",
                                "solver: {T: 10, h: 0.05}\n    modulus: {kind: strongly_accretive, c: 1}\n"
                                "    rate_data: {M: 0.0005}\n    sweeps: [{theorem: \"5.1\", k: [0]}]"),
                        "rate_data.omega");
}

TEST_CASE("execute a small config") {
    const RunConfig cfg = parse_config(kSmall);
    const RunResult r = execute(cfg, 1);
    CHECK(r.errors.empty());
    CHECK(r.exit_code() == 0);
    for (const auto& c : r.checks) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.pass);
    }
    // 2 points * (2 + 1) orbit reports plus 2 points * (2 k * 2 f) for the exact orbit.
    CHECK(r.reports.size() == 2 * 3 + 2 * 4);
    const auto j = reports_json(cfg, r);
    CHECK(j["seed"] == 5);
    CHECK(j["reports"].size() == r.reports.size());
    CHECK(j["summary"]["failed_reports"] == 0);
    CHECK(j["summary"]["exit_code"] == 0);
}

TEST_CASE("results do not depend on the number of jobs") {
    const RunConfig cfg = parse_config(kSmall);
    const std::string a = reports_json(cfg, execute(cfg, 1)).dump();
    const std::string b = reports_json(cfg, execute(cfg, 4)).dump();
    CHECK(a == b);
}

TEST_CASE("exit codes") {
    RunResult r;
    CHECK(r.exit_code() == 0);
    RateReport ext;
    ext.extrapolated = true;
    r.reports.push_back(ext);
    CHECK(r.exit_code() == 0);
    RateReport bad;
    r.reports.push_back(bad);
    CHECK(r.exit_code() == 2);
    r.errors.push_back("boom");
    CHECK(r.exit_code() == 1);
    RunResult c;
    c.checks.push_back({"s", "fejer", false, ""});
    CHECK(c.exit_code() == 2);
}

TEST_CASE("outputs are written") {
    const auto dir = std::filesystem::temp_directory_path() / "sqrtsg_test_outputs";
    std::filesystem::remove_all(dir);
    const std::filesystem::path cfg_path = dir.string() + ".cfg";
    {
        std::ofstream f(cfg_path);
        f << kSmall;
    }
    std::ostringstream out, err;
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.jobs = 2;
    CHECK(run(cfg_path.string(), opts, out, err) == 0);
    for (const char* name : {"reports.json", "reports.csv", "trajectories.csv", "plot/plot.gp"}) {
        CAPTURE(name);
        CHECK(std::filesystem::exists(dir / name));
    }
    std::ifstream t(dir / "trajectories.csv");
    std::string header;
    std::getline(t, header);
    CHECK(header == "scenario,curve,t,u1,u2,norm,dist_zero_set");

    CHECK(run((dir / "missing.cfg").string(), opts, out, err) == 1);
    std::filesystem::remove_all(dir);
    std::filesystem::remove(cfg_path);
}

TEST_CASE("catalog listing") {
    std::ostringstream text, js;
    list_catalog(text, false);
    list_catalog(js, true);
    CHECK(text.str().find("scaled_identity") != std::string::npos);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j.contains("operators"));
    CHECK(j["operators"].size() >= 8);
    CHECK(j.contains("theorems"));
}

}  // TEST_SUITE
