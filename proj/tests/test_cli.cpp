#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cubeot/cli.hpp"

using namespace cubeot;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("cubeot_test_" + name);
}

}  // namespace

TEST_CASE("transport of a point mass to uniform") {
    const RunResult r = run_cli({"transport", "--n", "4", "--a", "dirac:0", "--b", "uniform"});
    CHECK(r.code == 0);
    CHECK(r.out.find("n,value,value_num,value_den,plan_size,duality_gap,certified") != std::string::npos);
    CHECK(r.out.find("4,2,2,1,") != std::string::npos);  // W = n/2 = 2 as 2/1
}

TEST_CASE("transport of uniform to itself is free") {
    const RunResult r = run_cli({"transport", "--n", "3", "--a", "uniform", "--b", "uniform"});
    CHECK(r.code == 0);
    CHECK(r.out.find("3,0,0,1,") != std::string::npos);
}

TEST_CASE("transport from an empirical sample file matches the library") {
    const auto path = temp_file("samples.txt");
    {
        std::ofstream f(path);
        f << "0\n3\n3\n12\n";
    }
    const RunResult r = run_cli(
        {"transport", "--n", "4", "--a", "empirical:" + path.string(), "--b", "uniform"});
    CHECK(r.code == 0);

    std::vector<CubePoint> pts = {CubePoint(0, 4), CubePoint(3, 4), CubePoint(3, 4), CubePoint(12, 4)};
    const TransportSolution sol = wasserstein_exact(
        RationalMeasure::from_empirical(empirical_measure(pts)), RationalMeasure::uniform(4));
    CHECK(r.out.find("," + std::to_string(sol.exact_value.num) + "," +
                     std::to_string(sol.exact_value.den) + ",") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("plan dump carries its schema") {
    const RunResult r =
        run_cli({"transport", "--n", "2", "--a", "dirac:0", "--b", "dirac:3", "--plan"});
    CHECK(r.code == 0);
    CHECK(r.out.find("source,target,mass_num,mass_den,cost") != std::string::npos);
    CHECK(r.out.find("0,3,1,1,2") != std::string::npos);
}

TEST_CASE("estimate emits the pinned csv schema") {
    const RunResult r = run_cli({"estimate", "--n", "1", "--N", "1", "--trials", "10"});
    CHECK(r.code == 0);
    CHECK(r.out.find("n,N,trials,seed,mean,stderr,ci_low,ci_high") != std::string::npos);
    CHECK(r.out.find("1,1,10,0,0.5,0,0.5,0.5") != std::string::npos);
    CHECK(r.out.find("# cubeot 0.1.0") != std::string::npos);
    CHECK(r.out.find("# command=estimate") != std::string::npos);
    // few trials only warns, on stderr, leaving the payload untouched
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(run_cli({"estimate", "--n", "1", "--N", "1", "--trials", "40"}).err.empty());
}

TEST_CASE("estimate writes byte-identical files for identical configs") {
    const auto p1 = temp_file("est1.csv"), p2 = temp_file("est2.csv");
    const std::vector<std::string> base = {"estimate", "--n",     "3",  "--N",   "8,16",
                                           "--trials", "20",      "--seed", "42", "--per-trial"};
    std::vector<std::string> run1 = base;
    run1.push_back("--out");
    run1.push_back(p1.string());
    std::vector<std::string> run2 = base;
    run2.push_back("--out");
    run2.push_back(p2.string());
    CHECK(run_cli(run1).code == 0);
    CHECK(run_cli(run2).code == 0);
    const std::string c1 = slurp(p1), c2 = slurp(p2);
    CHECK(!c1.empty());
    CHECK(c1 == c2);
    CHECK(c1.find("N,trial,value") != std::string::npos);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("estimate json mirrors the field names") {
    const RunResult r =
        run_cli({"estimate", "--n", "2", "--N", "4", "--trials", "8", "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["estimates"][0]["n"] == 2);
    CHECK(doc["estimates"][0]["N"] == 4);
    CHECK(doc["estimates"][0].contains("mean"));
    CHECK(doc["estimates"][0].contains("stderr"));
    CHECK(doc["estimates"][0].contains("ci_low"));
    CHECK(doc["estimates"][0].contains("ci_high"));
    CHECK(doc["version"] == cli::kVersion);
}

TEST_CASE("bounds reports the proportional envelope at N = 2^n") {
    const RunResult r = run_cli({"bounds", "--n", "10", "--N", "1024"});
    CHECK(r.code == 0);
    CHECK(r.out.find("regime=proportional") != std::string::npos);
    CHECK(r.out.find("formula,params,lower,upper,asymptotic") != std::string::npos);
    CHECK(r.out.find("envelope_proportional") != std::string::npos);
    CHECK(r.out.find("0.36787944117144233") != std::string::npos);  // e^{-1}
    CHECK(r.out.find("0.7071067811865475") != std::string::npos);   // 1/sqrt(2)
}

TEST_CASE("bounds routes c = 1 to the proportional regime") {
    // N = 2^20 exactly saturates the cube
    const RunResult r = run_cli({"bounds", "--n", "20", "--N", "1048576"});
    CHECK(r.code == 0);
    CHECK(r.out.find("regime=proportional") != std::string::npos);
    CHECK(r.out.find("c=1 ") != std::string::npos);
}

TEST_CASE("bounds carries every applicable formula") {
    const RunResult r = run_cli({"bounds", "--n", "8", "--N", "256", "--t", "0.5,1"});
    CHECK(r.code == 0);
    for (const char* id : {"spectral", "spectral_optimized", "poly_alpha", "radius_lower",
                           "ball_diffusion", "variance", "concentration"})
        CHECK(r.out.find(id) != std::string::npos);
}

TEST_CASE("cli validation failures exit nonzero") {
    CHECK(run_cli({"estimate", "--N", "4"}).code == 1);           // missing --n
    CHECK(run_cli({"estimate", "--n", "3"}).code == 1);           // missing --N
    CHECK(run_cli({"verify", "--suite", "nonsense"}).code == 1);  // unknown suite
    CHECK(run_cli({"transport", "--n", "2", "--a", "dirac:9", "--b", "uniform"}).code == 1);
    CHECK(run_cli({"nonsense"}).code == 1);
    // resource exhaustion is a distinct exit code
    CHECK(run_cli({"estimate", "--n", "9", "--N", "4", "--trials", "4", "--exact-cap", "8"}).code == 2);
}

TEST_CASE("verify suites pass and print a table") {
    for (const char* suite : {"fourier", "transport", "bounds", "montecarlo"}) {
        const RunResult r = run_cli({"verify", "--suite", suite, "--n-max", "4"});
        CHECK(r.code == 0);
        CHECK(r.out.find("[PASS]") != std::string::npos);
        CHECK(r.out.find("[FAIL]") == std::string::npos);
        CHECK(r.out.find("passed") != std::string::npos);
    }
}
