#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = MAXDDE_CLI_PATH;
const fs::path kTmp = MAXDDE_TEST_TMP;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > " + (kTmp / "stdout.txt").string() +
                            " 2> " + (kTmp / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

struct TmpDir {
    TmpDir() {
        fs::create_directories(kTmp);
    }
};
const TmpDir init_tmp;

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes trajectory, events and projection files") {
    const auto out = kTmp / "sim";
    REQUIRE(run("simulate --preset ex2 --p 1 --tmax 60 --out " + out.string()) == 0);
    CHECK(count_lines(out / "trajectory.csv") > 1000);
    CHECK(count_lines(out / "events.csv") >= 3);
    CHECK(count_lines(out / "projection.csv") > 500);
    const std::string head = slurp(out / "trajectory.csv").substr(0, 24);
    CHECK(head == "t,u,uprime,window_max,f\n");
}

TEST_CASE("simulate accepts a problem file; b = 0 decays") {
    const auto pf = kTmp / "decay.json";
    std::ofstream(pf) << R"({"a":-0.4,"b":0.0,"h":4.71238898038469,
        "forcing":{"type":"one_minus_sin"}})";
    const auto out = kTmp / "decay";
    REQUIRE(run("simulate --problem " + pf.string() + " --p 9 --tmax 40 --out " +
                out.string()) == 0);
    // last u value settled near the forced equilibrium band, far below p
    std::ifstream in(out / "trajectory.csv");
    std::string line, last;
    while (std::getline(in, line)) last = line;
    const double u = std::stod(last.substr(last.find(',') + 1));
    CHECK(u < 6.0);
}

TEST_CASE("return-map CSV has the documented columns; empty grid errors") {
    const auto out = kTmp / "rmap";
    REQUIRE(run("return-map --preset ex2 --grid 25 --out " + out.string()) == 0);
    const std::string text = slurp(out / "return_map.csv");
    CHECK(text.substr(0, text.find('\n')) ==
          "p,q,lambda,mu,nu_star,R,Rprime,branch_j,u_shaped");
    CHECK(count_lines(out / "return_map.csv") == 26);

    CHECK(run("return-map --preset ex2 --grid 0 --out " + out.string()) == 1);
}

TEST_CASE("return-map output is byte-identical across runs") {
    const auto o1 = kTmp / "det1", o2 = kTmp / "det2";
    REQUIRE(run("return-map --preset ex1 --grid 12 --out " + o1.string()) == 0);
    REQUIRE(run("return-map --preset ex1 --grid 12 --out " + o2.string()) == 0);
    CHECK(slurp(o1 / "return_map.csv") == slurp(o2 / "return_map.csv"));
}

TEST_CASE("analyze reports the cosine example's multiplier") {
    const auto out = kTmp / "ana1";
    REQUIRE(run("analyze --preset ex1 --grid 150 --out " + out.string()) == 0);
    const json j = json::parse(slurp(out / "analysis.json"));
    CHECK(j["stability"]["stable"].get<bool>());
    bool found = false;
    for (const auto& fp : j["fixed_points"]) {
        if (std::abs(fp["p"].get<double>() - 1.0) < 1e-4) {
            found = true;
            CHECK(std::abs(fp["multiplier"].get<double>() + 1.91) < 1e-2);
        }
    }
    CHECK(found);
}

TEST_CASE("analyze reproduces the chaotic example's constants") {
    const auto out = kTmp / "ana2";
    REQUIRE(run("analyze --preset ex2 --grid 150 --out " + out.string()) == 0);
    const json j = json::parse(slurp(out / "analysis.json"));
    CHECK(std::abs(j["beta1"]["raw"].get<double>() - 0.39290) < 1e-3);
    CHECK(std::abs(j["q0"]["raw"].get<double>() - 1.18459) < 5e-4);
    CHECK(std::abs(j["p_c"].get<double>() - 0.10831) < 3e-3);
    CHECK(std::abs(j["alpha_star"].get<double>() - 1.2052) < 0.01);
    CHECK(std::abs(j["beta_star"].get<double>() - 12.11) < 0.05);
    CHECK(std::abs(j["R0"].get<double>() - 2.2373) < 0.01);
    CHECK(std::abs(j["RR0"].get<double>() - 0.4568) < 0.01);
    REQUIRE(j["discontinuities"].size() == 2);
    for (const auto& d : j["discontinuities"]) CHECK(d["contract_ok"].get<bool>());
    CHECK(std::abs(j["fixed_points"][0]["p"].get<double>() - 1.0377) < 2e-3);
}

TEST_CASE("analyze rejects malformed problem files") {
    const auto pf = kTmp / "bad.json";
    std::ofstream(pf) << "{oops";
    CHECK(run("analyze --problem " + pf.string()) == 1);
    CHECK(slurp(kTmp / "stderr.txt").find("error:") != std::string::npos);
}

TEST_CASE("certify produces a certificate for ex2 and refuses ex1") {
    const auto out = kTmp / "cert";
    REQUIRE(run("certify --preset ex2 --grid 201 --max-period 1 --out " +
                out.string()) == 0);
    const json j = json::parse(slurp(out / "certificate.json"));
    CHECK(j["transitive_power"].get<int>() == 3);
    CHECK(std::abs(j["entropy_lower"].get<double>() - 0.4812) < 1e-3);
    CHECK(j["orbit_counts"][2].get<int>() == 4);
    for (const auto& m : j["covering_margins"])
        CHECK(m["margin"].get<double>() > 1e-3);

    CHECK(run("certify --preset ex1 --grid 201 --max-period 1 --out " +
              out.string()) == 2);
    CHECK(slurp(kTmp / "stderr.txt").find("covering") != std::string::npos);
}

TEST_CASE("appendix-verify reports the three bounds") {
    const auto out = kTmp / "app";
    REQUIRE(run("appendix-verify --grid 500 --out " + out.string()) == 0);
    const json j = json::parse(slurp(out / "appendix_verify.json"));
    CHECK(std::abs(j["min_psi"].get<double>() - 0.00862) < 5e-4);
    CHECK(std::abs(j["min_increment"].get<double>() - 0.02057) < 5e-4);
    CHECK(std::abs(j["max_phi"].get<double>() + 0.06072) < 5e-4);
}

TEST_CASE("help and bad usage") {
    CHECK(run("--help") == 0);
    CHECK(run("frobnicate") == 1);
    CHECK(run("simulate") == 1);  // problem selection required
}

}  // TEST_SUITE
