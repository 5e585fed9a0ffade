// Drives the installed binary; SQRTSG_BIN and SQRTSG_SCENARIOS come from the build.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Result {
    int code;
    std::string out;
};

Result sh(const std::string& args) {
    const std::string cmd = std::string(SQRTSG_BIN) + " " + args + " 2>&1";
    Result r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const char* name) { return std::string(SQRTSG_SCENARIOS) + "/" + name; }

std::filesystem::path tmp(const char* name) {
    const auto d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    return d;
}

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("identity scenario exits 0 with passing 4.1 reports") {
    const auto out = tmp("sqrtsg_cli_identity");
    const Result r = sh("run " + scenario("identity_hilbert.cfg") + " --out " + out.string() + " --jobs 2");
    CHECK(r.code == 0);
    std::ifstream f(out / "reports.json");
    const auto j = nlohmann::json::parse(f);
    int seen = 0;
    for (const auto& rep : j["reports"]) {
        if (rep["theorem"] == "4.1" && rep["scenario"] == "identity_hilbert/x0") {
            CHECK(rep["pass"] == true);
            ++seen;
        }
    }
    CHECK(seen == 6);
    std::filesystem::remove_all(out);
}

TEST_CASE("rotation scenario exits 2") {
    const auto out = tmp("sqrtsg_cli_rotation");
    CHECK(sh("run " + scenario("rotation_counterexample.cfg") + " --out " + out.string()).code == 2);
    std::filesystem::remove_all(out);
}

TEST_CASE("malformed config exits 1 and names the field") {
    const auto cfg = tmp("sqrtsg_cli_bad.cfg");
    {
        std::ofstream f(cfg);
        f << "seed: 1\nscenarios:\n  - id: a\n    space: {kind: hilbert, dim: 1}\n    operator: {kind: zero}\n"
             "    initial_points: [[1]]\n    solver: {T: 4, h: 0.1}\n    modulus: {kind: expression, expr: \"0\"}\n"
             "    rate_data: {B: 1}\n    sweeps: [{theorem: \"4.1\", k: [0]}]\n";
    }
    const Result r = sh("run " + cfg.string() + " --out " + tmp("sqrtsg_cli_bad").string());
    CHECK(r.code == 1);
    CHECK(r.out.find("rate_data.M") != std::string::npos);
    CHECK(r.out.find("line 9") != std::string::npos);
    std::filesystem::remove(cfg);
}

TEST_CASE("list-catalog") {
    const Result text = sh("list-catalog");
    CHECK(text.code == 0);
    CHECK_FALSE(text.out.empty());
    const Result js = sh("list-catalog --json");
    CHECK(js.code == 0);
    const auto j = nlohmann::json::parse(js.out, nullptr, false);
    CHECK_FALSE(j.is_discarded());
}

TEST_CASE("unknown flag prints usage and exits 1") {
    const Result r = sh("run --frobnicate");
    CHECK(r.code == 1);
    CHECK(r.out.find("Usage") != std::string::npos);
    CHECK(sh("").code == 1);
}

TEST_CASE("seed override is recorded") {
    const auto out = tmp("sqrtsg_cli_seed");
    CHECK(sh("run " + scenario("zero_operator.cfg") + " --seed 77 --out " + out.string()).code == 0);
    std::ifstream f(out / "reports.json");
    CHECK(nlohmann::json::parse(f)["seed"] == 77);
    std::filesystem::remove_all(out);
}

}  // TEST_SUITE
