#include <catch2/catch_amalgamated.hpp>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef LINEFIB_CLI_PATH
#error "LINEFIB_CLI_PATH must be defined by the build"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(LINEFIB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
    int status = pclose(pipe);
    int code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

}  // namespace

TEST_CASE("examples subcommand lists the six built-ins") {
    RunResult r = run_cli("examples");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc["examples"].size() == 6);
    std::vector<std::string> names;
    for (const auto& e : doc["examples"]) names.push_back(e["name"].get<std::string>());
    CHECK(names == std::vector<std::string>{"constant", "theta-linear", "theta-cubic",
                                            "theta-sine", "skew-hopf",
                                            "helix-not-straight"});
    CHECK(doc.contains("version"));
    CHECK(doc.contains("config"));
}

TEST_CASE("contact subcommand on the constant field reports zero defect") {
    RunResult r = run_cli("contact --field \"1,0,0\"");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["contact"]["defect_min"].get<double>() == 0.0);
    CHECK(doc["contact"]["defect_max"].get<double>() == 0.0);
    CHECK(doc["contact"]["zero_set_detected"].get<bool>() == true);
    CHECK(doc["config"]["seed"].get<unsigned>() == 42);
}

TEST_CASE("audit subcommand emits the stable schema keys") {
    RunResult r = run_cli("audit --example skew-hopf --box -1,1 --grid 5");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    const auto& audit = doc["audit"];
    CHECK(audit.contains("unit_defect_max"));
    CHECK(audit.contains("straightness_defect_max"));
    CHECK(audit["intersections"].is_array());
    CHECK(audit["intersections"].empty());
    CHECK(audit["parallel_pairs_count"].get<int>() == 0);
    CHECK(audit["rank_histogram"].is_array());
    CHECK(audit["verdicts"]["is_fibration_on_box"].get<bool>() == true);
    CHECK(audit["verdicts"]["rank_profile"].get<std::string>() == "constant 2");
}

TEST_CASE("standardize subcommand classifies the twist field") {
    RunResult r = run_cli("standardize --field \"cos(z),-sin(z),0\"");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["standardization"]["verdict"].get<std::string>() ==
          "CONTACT_RANK1_STANDARDIZED");
    CHECK(doc["standardization"]["pullback_defect"].get<double>() < 1e-8);
    CHECK(doc["standardization"]["theta_z"].size() ==
          doc["standardization"]["theta_values"].size());
    CHECK(doc["standardization"]["theta_prime_min"].get<double>() > 0.0);
}

TEST_CASE("standardize reports are byte-identical across runs") {
    RunResult a = run_cli("standardize --example theta-cubic");
    RunResult b = run_cli("standardize --example theta-cubic");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK_FALSE(a.output.empty());
}

TEST_CASE("negative verdicts still exit 0") {
    RunResult helix = run_cli("standardize --example helix-not-straight");
    REQUIRE(helix.exit_code == 0);
    auto doc = nlohmann::json::parse(helix.output);
    CHECK(doc["standardization"]["verdict"].get<std::string>() == "NOT_A_FIBRATION_ON_BOX");

    RunResult sine = run_cli("standardize --example theta-sine");
    REQUIRE(sine.exit_code == 0);
    auto sdoc = nlohmann::json::parse(sine.output);
    CHECK(sdoc["standardization"]["verdict"].get<std::string>() == "FIBRATION_NOT_CONTACT");
    CHECK(sdoc["standardization"]["refused"].get<bool>() == true);
}

TEST_CASE("winding subcommand") {
    RunResult r = run_cli("winding --example skew-hopf --at 0,0,0 --eps 0.1");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc["lemma_checks"]["winding"].size() == 1);
    CHECK(doc["lemma_checks"]["winding"][0]["winding"].get<int>() == 1);
    CHECK(doc["lemma_checks"]["winding"][0]["degenerate"].get<bool>() == false);

    // degenerate winding at a rank-1 point is a numerical failure: exit 2
    RunResult degen = run_cli("winding --example theta-linear --at 0,0,0 --eps 0.1");
    CHECK(degen.exit_code == 2);
    auto ddoc = nlohmann::json::parse(degen.output);
    CHECK(ddoc["lemma_checks"]["winding"][0]["degenerate"].get<bool>() == true);
}

TEST_CASE("flow subcommand") {
    RunResult r = run_cli("flow --example theta-linear --at 0,0,0 --tmax 1 --step 0.001");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc["lemma_checks"]["flow"].size() == 1);
    CHECK(doc["lemma_checks"]["flow"][0]["constancy"].get<double>() < 1e-8);
    CHECK(doc["lemma_checks"]["flow"][0]["projected_straightness"].get<double>() < 1e-8);

    // the rank-2 example has no kernel line field: exit 2
    RunResult bad = run_cli("flow --example skew-hopf --at 0,0,0 --tmax 0.1");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("invalid input exits 1") {
    CHECK(run_cli("audit --field \"x,\"").exit_code == 1);
    CHECK(run_cli("audit --field \"2x,0,0\"").exit_code == 1);
    CHECK(run_cli("audit --example no-such-example").exit_code == 1);
    CHECK(run_cli("audit --field \"1,0,0\" --box 1,-1").exit_code == 1);
    CHECK(run_cli("audit").exit_code == 1);  // no field
    CHECK(run_cli("no-such-subcommand").exit_code == 1);
}

TEST_CASE("field strings with embedded commas inside calls parse") {
    RunResult r = run_cli("contact --field \"atan2(-y, x),1,0\" --grid 3 --box 0.5,1.5");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["config"]["field"]["v1"].get<std::string>() == "atan2(-y, x)");
}

TEST_CASE("skew subcommand lists the parallel pairs") {
    RunResult r = run_cli("skew --example theta-linear --grid 3");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    REQUIRE(doc.contains("skew"));
    CHECK(doc["skew"]["parallel_pairs"].size() ==
          doc["audit"]["parallel_pairs_count"].get<std::size_t>());
}

TEST_CASE("--out writes the same bytes that stdout carries") {
    std::string path = "/tmp/linefib_cli_out_test.json";
    std::remove(path.c_str());
    RunResult direct = run_cli("audit --example constant --grid 3");
    RunResult filed = run_cli("audit --example constant --grid 3 --out " + path);
    REQUIRE(filed.exit_code == 0);
    CHECK(filed.output.empty());
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == direct.output);
    std::remove(path.c_str());
}

TEST_CASE("six-number boxes and tolerance overrides are honored") {
    RunResult r = run_cli("audit --example skew-hopf --box -1,1,-0.5,0.5,0,1 --grid 3 "
                          "--tol-angle 0.5");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["config"]["box"]["min"] == nlohmann::json({-1.0, -0.5, 0.0}));
    CHECK(doc["config"]["box"]["max"] == nlohmann::json({1.0, 0.5, 1.0}));
    CHECK(doc["config"]["tolerances"]["angle"].get<double>() == 0.5);
    // with a half-radian "parallel" threshold many near-parallel pairs appear
    CHECK(doc["audit"]["parallel_pairs_count"].get<int>() > 0);
}
