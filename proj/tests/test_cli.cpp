#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

// End-to-end checks of the installed CLI binary: exit codes and output
// schemas. WQED_CLI_PATH is injected by the build.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(WQED_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
    const int status = pclose(pipe);
    res.exit_code = WEXITSTATUS(status);
    return res;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = std::string("/tmp/wqed_test_") + name;
    std::ofstream out(path);
    out << text;
    return path;
}

const char* kTlsConfig = R"({
  "kind": "tls", "omega": 2e15, "gamma1": 2e4,
  "inputs": [2.1e15, 1.9e15]
})";

const char* kLambdaConfig = R"({
  "kind": "lambda", "omega": 2e15, "gamma1": 2e4, "gamma2": 1.4142135623730951e4,
  "dtilde1": 0.0, "dtilde2": 2e14,
  "inputs": [2.1e15, 1.9e15], "initial_ground": 1
})";

}  // namespace

TEST_CASE("cli: malformed config exits 2") {
    const auto path = write_temp("bad.json", "{ not json");
    const auto res = run("amp --config " + path);
    CHECK(res.exit_code == 2);
}

TEST_CASE("cli: single-photon resonant amplitude text output") {
    const auto path = write_temp("tls1.json", R"({
      "kind": "tls", "omega": 2e15, "gamma1": 2e4, "inputs": [2e15]
    })");
    const auto res = run("amp --config " + path + " --outputs 2e15");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("d(f-i)") != std::string::npos);
    CHECK(res.output.find("-1") != std::string::npos);  // resonant coefficient -1
}

TEST_CASE("cli: lambda resonant Raman transfer coefficients") {
    const auto path = write_temp("lam1.json", R"({
      "kind": "lambda", "omega": 2e15, "gamma1": 2e4, "gamma2": 2e4,
      "dtilde1": 0.0, "dtilde2": 2e14, "inputs": [2e15], "initial_ground": 1
    })");
    const auto res = run("amp --config " + path + " --format json --outputs 1.8e15");
    CHECK(res.exit_code == 0);
    // mu = 2 coefficient -1 at f = i - dtilde2
    CHECK(res.output.find("\"final_ground\": 2") != std::string::npos);
    CHECK(res.output.find("-1.0") != std::string::npos);
}

TEST_CASE("cli: pole CSV for the TLS drive") {
    const auto cfgp = write_temp("tls2.json", kTlsConfig);
    const std::string csv = "/tmp/wqed_test_poles.csv";
    const auto res = run("poles --config " + cfgp + " --out " + csv);
    CHECK(res.exit_code == 0);
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "re_f,im_f,order,class,origin");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2);  // Omega +- i pi gamma^2
}

TEST_CASE("cli: poles are byte-stable across runs") {
    const auto cfgp = write_temp("lam2.json", kLambdaConfig);
    const auto a = run("poles --config " + cfgp + " --json");
    const auto b = run("poles --config " + cfgp + " --json");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("cli: series convergence table, weak coupling") {
    const auto path = write_temp("tls3.json", R"({
      "kind": "tls", "omega": 2e15, "gamma1": 2e4, "inputs": [2.1e15]
    })");
    const auto res = run("series --config " + path + " --nmax 8");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("closed form") != std::string::npos);
    CHECK(res.output.find("converged at order") != std::string::npos);
}

TEST_CASE("cli: series divergence flag and Borel value at strong coupling") {
    // Delta = pi gamma^2 / 2 -> ratio 2
    const double a = 3.14159265358979323846 * 4e8;
    std::ostringstream cfg;
    cfg << R"({"kind": "tls", "omega": 2e15, "gamma1": 2e4, "inputs": [)" << std::setprecision(17)
        << 2e15 + a / 2.0 << "]}";
    const auto path = write_temp("tls4.json", cfg.str());
    const auto res = run("series --config " + path + " --nmax 12");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("divergent") != std::string::npos);
    CHECK(res.output.find("borel value") != std::string::npos);
    CHECK(res.output.find("reconstructed kernel") != std::string::npos);
}

TEST_CASE("cli: series with nmax 2 makes no convergence claim") {
    const auto path = write_temp("tls5.json", R"({
      "kind": "tls", "omega": 2e15, "gamma1": 2e4, "inputs": [2.1e15]
    })");
    const auto res = run("series --config " + path + " --nmax 2");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("no convergence claim") != std::string::npos);
}

TEST_CASE("cli: spectrum CSV schema and resonance flags") {
    const auto cfgp = write_temp("lam3.json", kLambdaConfig);
    const std::string csv = "/tmp/wqed_test_spec.csv";
    // include the known real pole at Omega + delta + dtilde2 = 2.3e15 exactly
    const auto res =
        run("spectrum --config " + cfgp + " --fmin 2.3e15 --fmax 2.35e15 --points 11 --out " + csv);
    CHECK(res.exit_code == 0);
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "f,abs2,flag");
    std::string first;
    std::getline(in, first);
    CHECK(first.find("at-resonance") != std::string::npos);
}

TEST_CASE("cli: on-pole series point exits 3") {
    // evaluation point exactly on the f0 = i0 real pole of the lambda mixing term
    const auto cfgp = write_temp("lam4.json", kLambdaConfig);
    const auto res = run("series --config " + cfgp + " --f0 2.1e15 --mu 1");
    CHECK(res.exit_code == 3);
}

TEST_CASE("cli: checks pass and report JSON") {
    const auto res = run("check all --seed 99");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"check\": \"fan\"") != std::string::npos);
    CHECK(res.output.find("\"check\": \"pg\"") != std::string::npos);
    CHECK(res.output.find("\"check\": \"a8\"") != std::string::npos);
    CHECK(res.output.find("\"raw_contractions\": 32") != std::string::npos);
    CHECK(res.output.find("\"surviving_terms\": 16") != std::string::npos);
    CHECK(res.output.find("\"pass\": false") == std::string::npos);
}
