#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "ibrt/oracles.hpp"
#include "ibrt/problem_io.hpp"
#include "json.hpp"
#include "studies.hpp"

using ibrt::tools::run_cli;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

testutil::Csv csv(const std::vector<std::string>& args) {
    const Run r = run(args);
    REQUIRE(r.code == 0);
    return testutil::parse_csv(r.out);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("format_real round trips") {
    for (double v : {0.1, 1.0 / 3.0, 6.25, 1e-300, -2.5e17}) CHECK(std::stod(ibrt::tools::format_real(v)) == v);
    CHECK(ibrt::tools::format_real(std::nan("")) == "nan");
    CHECK(ibrt::tools::format_real(-INFINITY) == "-inf");
}

TEST_CASE("ba-solve on the symmetric channel") {
    const testutil::Csv c = csv({"ba-solve", "-p", "bsc:0.3", "--beta", "8", "--stop", "1e-12"});
    REQUIRE(c.rows.size() == 1);
    const ibrt::InfoPoint ip = ibrt::bsc_exact_root(0.3, 8.0).info();
    CHECK(c.num(0, "i_x_nats") == doctest::Approx(ip.i_x).epsilon(1e-8));
    CHECK(c.num(0, "i_y_nats") == doctest::Approx(ip.i_y).epsilon(1e-8));
    CHECK(c.str(0, "converged") == "true");
    CHECK(c.num(0, "effective_cardinality") == 2.0);
    const nlohmann::json m = nlohmann::json::parse(c.manifest);
    CHECK(m["command"] == "ba-solve");
    CHECK(m["schema"] == ibrt::tools::kSchemaVersion);
    CHECK(m["tool_version"] == ibrt::tools::kToolVersion);
    CHECK(m["info_unit"] == "nats");
    CHECK(m["config"]["beta"] == 8.0);
}

TEST_CASE("ba-solve below the bifurcation is trivial") {
    const testutil::Csv c = csv({"ba-solve", "-p", "bsc:0.3", "--beta", "5"});
    CHECK(c.num(0, "effective_cardinality") == 1.0);
    CHECK(c.num(0, "i_x_nats") < 1e-6);
}

TEST_CASE("bits rename and rescale the information columns") {
    const testutil::Csv nats = csv({"ba-solve", "-p", "bsc:0.3", "--beta", "8"});
    const testutil::Csv bits = csv({"ba-solve", "-p", "bsc:0.3", "--beta", "8", "--bits"});
    CHECK(bits.col("i_x_bits") < bits.header.size());
    CHECK(bits.col("i_x_nats") == bits.header.size());
    CHECK(bits.num(0, "i_x_bits") == doctest::Approx(nats.num(0, "i_x_nats") / std::log(2.0)));
    CHECK(nlohmann::json::parse(bits.manifest)["info_unit"] == "bits");
}

TEST_CASE("track emits one row per grid point") {
    const testutil::Csv c = csv({"track", "-p", "bsc:0.3", "--beta0", "10", "--delta-beta", "-0.5", "--beta-min", "8"});
    REQUIRE(c.rows.size() == 5);
    CHECK(c.num(0, "beta") == 10.0);
    CHECK(c.num(4, "beta") == doctest::Approx(8.0));
    CHECK(c.col("dec_y1_c1") < c.header.size());
    CHECK(c.col("mrg_c0") < c.header.size());
    CHECK(c.str(0, "event") == "none");
    CHECK(c.str(0, "ba_unconverged") == "false");
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
        const double beta = c.num(r, "beta");
        CHECK(c.num(r, "i_y_nats") == doctest::Approx(ibrt::bsc_exact_root(0.3, beta).info().i_y).epsilon(1e-3));
    }
}

TEST_CASE("track rejects a non-negative step") {
    const Run r = run({"track", "-p", "bsc:0.3", "--beta0", "10", "--delta-beta", "0.5"});
    CHECK(r.code == ibrt::tools::kExitUsage);
    CHECK(r.err.find("negative") != std::string::npos);
}

TEST_CASE("curve methods agree away from the bifurcation") {
    const std::vector<std::string> grid{"--beta0", "12", "--beta-end", "8", "--points", "9"};
    auto with = [&](const std::string& method) {
        std::vector<std::string> a{"curve", "-p", "bsc:0.3", "--method", method};
        a.insert(a.end(), grid.begin(), grid.end());
        return csv(a);
    };
    const testutil::Csv oracle = with("oracle");
    const testutil::Csv track = with("track");
    const testutil::Csv anneal = with("ba_anneal");
    REQUIRE(oracle.rows.size() == 9);
    REQUIRE(track.rows.size() == 9);
    REQUIRE(anneal.rows.size() == 9);
    for (std::size_t r = 0; r < 9; ++r) {
        CHECK(track.num(r, "i_y_nats") == doctest::Approx(oracle.num(r, "i_y_nats")).epsilon(1e-3));
        CHECK(anneal.num(r, "i_y_nats") == doctest::Approx(oracle.num(r, "i_y_nats")).epsilon(1e-6));
    }
}

TEST_CASE("oracle curve sampled by I_X") {
    const testutil::Csv c = csv({"curve", "-p", "bsc:0.3", "--method", "oracle", "--ix-points", "5"});
    REQUIRE(c.rows.size() == 5);
    CHECK(c.num(0, "i_x_nats") == 0.0);
    CHECK(c.num(4, "i_y_nats") == doctest::Approx(std::log(2.0) - ibrt::binary_entropy(0.3)));
    CHECK(run({"curve", "-p", "bsc:0.3", "--method", "track", "--ix-points", "5"}).code == ibrt::tools::kExitUsage);
}

TEST_CASE("empty grid is a usage error") {
    const Run r = run({"curve", "-p", "bsc:0.3", "--beta0", "10", "--beta-end", "8", "--points", "0"});
    CHECK(r.code == ibrt::tools::kExitUsage);
    CHECK(r.err.find("grid is empty") != std::string::npos);
}

TEST_CASE("deriv-check against the closed form") {
    const testutil::Csv c = csv({"deriv-check", "-p", "bsc:0.3", "--betas", "10,8,6.3"});
    REQUIRE(c.rows.size() == 3);
    CHECK(c.num(0, "linf_error") < 1e-10);
    CHECK(c.num(2, "linf_error") < 1e-8);
    CHECK(c.str(0, "reference") != "");
}

TEST_CASE("deriv-check without an oracle notes the fallback") {
    std::mt19937_64 rng(61);
    const ibrt::IBProblem prob = testutil::random_problem(rng, 3, 3);
    const std::string path = "cli_test_problem.json";
    {
        std::ofstream f(path);
        f << ibrt::problem_to_json(prob);
    }
    const Run r = run({"deriv-check", "-p", path, "--betas", "20,15"});
    std::remove(path.c_str());
    REQUIRE(r.code == 0);
    CHECK(r.err.find("central differences") != std::string::npos);
    const testutil::Csv c = testutil::parse_csv(r.out);
    REQUIRE(c.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(c.num(i, "linf_error") < 1e-4);
}

TEST_CASE("eig-scan on the trivial decomposable root") {
    const testutil::Csv c = csv({"eig-scan", "-p", "decomposable", "--betas", "2,0.5", "--root", "trivial"});
    REQUIRE(c.rows.size() == 2);
    CHECK(c.col("eig5_im") < c.header.size());
    CHECK(run({"eig-scan", "-p", "decomposable", "--betas", "2", "-T", "0"}).code == ibrt::tools::kExitUsage);
}

TEST_CASE("eig-scan near the BSC bifurcation") {
    const testutil::Csv c = csv({"eig-scan", "-p", "bsc:0.3", "--betas", "16,6.26"});
    CHECK(c.num(1, "sigma_min_i_minus_s") < c.num(0, "sigma_min_i_minus_s"));
    CHECK(c.num(1, "min_abs_one_minus_eig") < 0.05);
}

TEST_CASE("order-study with explicit steps") {
    const testutil::Csv c =
        csv({"order-study", "-p", "bsc:0.3", "--beta0", "12", "--beta-end", "10", "--steps", "0.5,0.25", "--methods", "euler"});
    REQUIRE(c.rows.size() == 2);
    CHECK(c.str(0, "method") == "euler");
    CHECK(c.num(1, "sup_error") < c.num(0, "sup_error"));
    CHECK(run({"order-study", "-p", "bsc:0.3", "--methods", "rk4"}).code == ibrt::tools::kExitUsage);
}

TEST_CASE("json output") {
    const Run r = run({"curve", "-p", "bsc:0.3", "--method", "oracle", "--betas", "10,5", "--json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["manifest"]["command"] == "curve");
    CHECK(doc["columns"][0] == "beta");
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][0][0] == 10.0);
}

TEST_CASE("out file receives the table") {
    const std::string path = "cli_test_out.csv";
    const Run r = run({"ba-solve", "-p", "bsc:0.3", "--beta", "8", "-o", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::remove(path.c_str());
    const testutil::Csv c = testutil::parse_csv(ss.str());
    CHECK(c.rows.size() == 1);
    CHECK(nlohmann::json::parse(c.manifest)["outputs"][0] == path);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == ibrt::tools::kExitUsage);
    CHECK(run({"frobnicate"}).code == ibrt::tools::kExitUsage);
    CHECK(run({"ba-solve", "-p", "bsc:0.3"}).code == ibrt::tools::kExitUsage);
    CHECK(run({"ba-solve", "-p", "bsc:0.7", "--beta", "2"}).code == ibrt::tools::kExitInput);
    CHECK(run({"ba-solve", "-p", "/nonexistent.json", "--beta", "2"}).code == ibrt::tools::kExitInput);
    CHECK(run({"ba-solve", "-p", "bsc:0.3", "--beta", "2", "--init", "zeros"}).code == ibrt::tools::kExitUsage);
    CHECK(run({"--version"}).code == ibrt::tools::kExitOk);
    CHECK(run({"ba-solve", "--help"}).code == ibrt::tools::kExitOk);
}

TEST_CASE("output is deterministic") {
    const std::vector<std::string> a{"track", "-p", "bsc:0.3", "--beta0", "9", "--delta-beta", "-0.25", "--beta-min", "6"};
    CHECK(run(a).out == run(a).out);
    const std::vector<std::string> b{"ba-solve", "-p", "bsc:0.3", "--beta", "8", "--init", "random", "--seed", "7"};
    CHECK(run(b).out == run(b).out);
}

TEST_CASE("study helpers") {
    using namespace ibrt::tools;
    const std::vector<double> g = descending_grid(10.0, 8.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 10.0);
    CHECK(g.back() == 8.0);
    const LinearFit f = fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    const ibrt::Encoder a{ibrt::Matrix{{0.9, 0.2}, {0.1, 0.8}}};
    const ibrt::Encoder b{ibrt::Matrix{{0.1, 0.8}, {0.9, 0.2}}};
    CHECK(encoder_distance(a, b) == doctest::Approx(0.0));
    CHECK(resolve_problem("bsc:0.25").bsc_alpha.value() == 0.25);
    CHECK(resolve_problem("decomposable").decomposable);
}

}  // TEST_SUITE
