#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "oracles.hpp"

// End-to-end checks of the command-line tool: output contracts and exit
// codes, run against the shipped configs.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QPRICER_BIN) + " " + args + " 2>/dev/null";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer;
    while (std::size_t got = fread(buffer.data(), 1, buffer.size(), pipe)) {
        res.output.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string config(const char* name) {
    return std::string(QPRICER_SOURCE_DIR) + "/configs/" + name;
}

}  // namespace

TEST_CASE("cli price: json output carries the contract keys") {
    const auto res = run_cli("price --config " + config("table1.json") + " --format json");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    REQUIRE(doc.contains("price"));
    CHECK(doc.contains("N"));
    CHECK(doc.contains("logC"));
    CHECK(doc.contains("runtime_ms"));
    CHECK(doc.contains("diagnostics"));
    CHECK(doc["N"] == 501);
    CHECK(doc["logC"] == doctest::Approx(3.02).epsilon(1e-12));
    // The paper-style configuration prices close to its fine-grid reference.
    CHECK(doc["price"] == doctest::Approx(0.00490279434669).epsilon(1e-5));
}

TEST_CASE("cli price: grid-size override changes the run") {
    const auto res =
        run_cli("price --config " + config("table1.json") + " --format json --n 1001");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(doc["N"] == 1001);
}

TEST_CASE("cli converge: CSV header and row shape") {
    const auto res = run_cli("converge --config " + config("table1.json") +
                             " --n-list 501,1001 --reference-n 4001");
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.output.rfind("N,value,rel_error\n", 0) == 0);
    int rows = 0;
    for (char c : res.output) rows += (c == '\n');
    CHECK(rows == 3);  // header + two grid sizes
    CHECK(res.output.find("501,") != std::string::npos);
    CHECK(res.output.find("1001,") != std::string::npos);
}

TEST_CASE("cli converge: empty grid list is a configuration error") {
    const auto res = run_cli("converge --config " + config("table1.json") +
                             " --n-list \"\" --reference-n 4001");
    CHECK(res.exit_code == 2);
}

TEST_CASE("cli mc-check: cash bond agrees exactly") {
    const auto res = run_cli("mc-check --config " + config("cash_bond.json") + " --format json");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(doc["z_score"] == 0.0);
    CHECK(doc["pass"] == true);
}

TEST_CASE("cli mc-check: a broken grid is caught by the oracle") {
    // N = 5 is legal but far too coarse; the z-score must blow past 4.
    const auto res = run_cli("mc-check --config " + config("table2.json") +
                             " --n 5 --pairs 20000 --format json");
    CHECK(res.exit_code == 1);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(doc["pass"] == false);
}

TEST_CASE("cli mc-check: deterministic per seed") {
    const std::string base =
        "mc-check --config " + config("table1.json") + " --pairs 5000 --format json";
    const auto a = run_cli(base + " --seed 9");
    const auto b = run_cli(base + " --seed 9");
    const auto c = run_cli(base + " --seed 10");
    REQUIRE(a.exit_code == 0);
    const auto da = nlohmann::json::parse(a.output);
    const auto db = nlohmann::json::parse(b.output);
    const auto dc = nlohmann::json::parse(c.output);
    CHECK(da["mc_estimate"] == db["mc_estimate"]);
    CHECK(da["mc_estimate"] != dc["mc_estimate"]);
}

TEST_CASE("cli bound: within the round-off budget for the shipped config") {
    const auto res = run_cli("bound --config " + config("table1.json") + " --format json");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(doc["bound"].get<double>() <= doc["spot_scale"].get<double>());
    CHECK(doc["digital_d_max"].get<double>() <= -10.0);
}

TEST_CASE("cli greeks: European call delta matches the closed form") {
    const auto res = run_cli("greeks --config " + config("european_call.json") +
                             " --bump 0.005 --format json");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    // q = 0: delta = N(d1) with d1 = (0.05 + 0.02) / 0.2 = 0.35.
    const double delta_ref = (double)oracles::norm_cdf_ref(0.35L);
    CHECK(doc["delta"].get<double>() == doctest::Approx(delta_ref).epsilon(1e-6));
    CHECK(doc["gamma"].get<double>() > 0.0);
    CHECK(doc["vega"].get<double>() > 0.0);
    CHECK(doc["consistency"]["delta"].get<double>() < 1e-4);
}

TEST_CASE("cli greeks: cash bond has vanishing delta and gamma") {
    const auto res = run_cli("greeks --config " + config("cash_bond.json") + " --format json");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(std::abs(doc["delta"].get<double>()) < 1e-12);
    CHECK(std::abs(doc["gamma"].get<double>()) < 1e-10);
}

TEST_CASE("cli: malformed config names the field and exits 2") {
    const std::string bad = std::string(QPRICER_SOURCE_DIR) + "/tests/data/bad_missing_vol.json";
    const auto res = run_cli("price --config " + bad);
    CHECK(res.exit_code == 2);
    const auto missing = run_cli("price --config /nonexistent/nope.json");
    CHECK(missing.exit_code == 2);
}
