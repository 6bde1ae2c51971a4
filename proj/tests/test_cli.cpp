#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Drives the installed binary exactly as a user would.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / "cloak_cli_tests";
    fs::create_directories(dir);
    fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd = std::string(CLOAK_CLI_PATH) + " " + args + " > " + out.string() +
                      " 2> " + err.string();
    int status = std::system(cmd.c_str());

    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string repo_file(const std::string& rel) { return std::string(CLOAK_REPO_DIR) + "/" + rel; }

fs::path write_temp(const std::string& name, const std::string& text) {
    fs::path dir = fs::temp_directory_path() / "cloak_cli_tests";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

constexpr const char* kReferencePolicyBytes =
    R"json({"contract":"SupplyChain","functions":[{"inputs":[{"binds":"p","name":"parties","owner":"all","type":"address[]"},{"name":"bids","owner":"class:p","type":"uint[]"},{"name":"tenderer","owner":"all","type":"address"}],"kind":"mpt","mutate":["balances"],"name":"biddingProcure","read":["balances"],"returns":[{"name":"winner","owner":"all","type":"address"},{"name":"sPrice","owner":"id:winner","type":"uint"}]}],"states":[{"name":"balances","owner":"id:k","type":"mapping(address=>uint)"},{"name":"mPrice","owner":"all","type":"uint"}]})json";

}  // namespace

TEST_CASE("check mode prints the canonical policy") {
    RunResult r = run_cli("-i " + repo_file("demo/supplychain.cloak") + " -t");
    CHECK(r.exit_code == 0);
    CHECK(r.out == std::string(kReferencePolicyBytes) + "\n");
    CHECK(r.err.empty());
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("").exit_code == 2);  // nothing to do

    RunResult no_input = run_cli("-t");
    CHECK(no_input.exit_code == 2);
    CHECK(no_input.err.find("-i") != std::string::npos);

    RunResult no_mode = run_cli("-i " + repo_file("demo/supplychain.cloak"));
    CHECK(no_mode.exit_code == 2);

    RunResult missing = run_cli("-i /nonexistent/x.cloak -t");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("cannot read") != std::string::npos);

    // -s and -t are mutually exclusive.
    CHECK(run_cli("-i " + repo_file("demo/supplychain.cloak") + " -s -t").exit_code == 2);

    CHECK(run_cli("--bogus-flag").exit_code == 2);
}

TEST_CASE("diagnostics exit 1 and land on stderr") {
    fs::path bad = write_temp("bad.cloak", "contract C { function f() public { uint x = ; } }");
    RunResult r = run_cli("-i " + bad.string() + " -t");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("error[parse]") != std::string::npos);

    fs::path flow = write_temp("flow.cloak",
                               "contract C {\n"
                               "  function f(uint @me x) public returns (uint r) { r = x; }\n"
                               "}\n");
    RunResult r2 = run_cli("-i " + flow.string() + " -t");
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("error[implicit-flow]") != std::string::npos);
}

TEST_CASE("strip mode prints plain source") {
    RunResult r = run_cli("-i " + repo_file("demo/supplychain.cloak") + " -s");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find('@') == std::string::npos);
    CHECK(r.out.find("reveal") == std::string::npos);
    CHECK(r.out.find("contract SupplyChain") != std::string::npos);
    CHECK(r.out.find("biddingProcure") != std::string::npos);
}

TEST_CASE("output mode writes the four artifacts deterministically") {
    fs::path dir1 = fs::temp_directory_path() / "cloak_cli_tests" / "art1";
    fs::path dir2 = fs::temp_directory_path() / "cloak_cli_tests" / "art2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    RunResult r1 = run_cli("-i " + repo_file("demo/supplychain.cloak") + " -o " + dir1.string());
    CHECK(r1.exit_code == 0);
    for (const char* name : {"policy.json", "service.sol", "verifier.sol", "summary.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir1 / name));
    }
    CHECK(slurp(dir1 / "policy.json") == kReferencePolicyBytes);

    RunResult r2 = run_cli("-i " + repo_file("demo/supplychain.cloak") + " -o " + dir2.string());
    CHECK(r2.exit_code == 0);
    // summary.json embeds wall-clock timings; the compiled artifacts are byte-stable.
    for (const char* name : {"policy.json", "service.sol", "verifier.sol"}) {
        CAPTURE(name);
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }

    // service.sol parses as the annotation-free contract.
    std::string svc = slurp(dir1 / "service.sol");
    CHECK(svc.rfind("pragma solidity 0.5.17;", 0) == 0);
    CHECK(svc.find('@') == std::string::npos);
}

TEST_CASE("debug flag reports per-function analysis on stderr") {
    RunResult r = run_cli("-i " + repo_file("demo/supplychain.cloak") + " -t --debug");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("function biddingProcure: kind=mpt") != std::string::npos);
    CHECK(r.err.find("owners={all, id:tenderer, id:winner, class:p}") != std::string::npos);
    CHECK(r.err.find("policy hash:") != std::string::npos);
    CHECK(r.err.find("runtime teemr:") != std::string::npos);
    // Policy itself still lands on stdout, unpolluted.
    CHECK(r.out == std::string(kReferencePolicyBytes) + "\n");
}

TEST_CASE("demo subcommand runs scenarios end to end") {
    RunResult ok = run_cli("demo " + repo_file("demo/bidding_demo.json"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("final root:") != std::string::npos);

    RunResult tamper = run_cli("demo " + repo_file("demo/tamper_demo.json"));
    CHECK(tamper.exit_code == 0);

    RunResult missing = run_cli("demo /nonexistent/scenario.json");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("scenario failed") != std::string::npos);

    // A scenario whose expectation is false exits 1. The copy lives outside
    // demo/, so the contract path must be absolute for the scenario to load.
    std::string text = slurp(repo_file("demo/bidding_demo.json"));
    auto pos = text.find("\"mPrice\": \"3\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "\"mPrice\": \"9\"");
    auto cpos = text.find("\"supplychain.cloak\"");
    REQUIRE(cpos != std::string::npos);
    text.replace(cpos, 19, "\"" + repo_file("demo/supplychain.cloak") + "\"");
    fs::path wrong = write_temp("wrong_expect.json", text);
    RunResult bad = run_cli("demo " + wrong.string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("scenario failed") != std::string::npos);

    RunResult no_arg = run_cli("demo");
    CHECK(no_arg.exit_code == 2);
}

TEST_CASE("corpus contracts pass check mode through the binary") {
    for (const char* name : {"power_grid", "bidding", "supply_chain", "scores", "insurance",
                             "erc20_token", "yundou", "oracle", "htlc"}) {
        CAPTURE(name);
        RunResult r = run_cli("-i " + repo_file("corpus/" + std::string(name) + ".cloak") + " -t");
        CHECK(r.exit_code == 0);
        CHECK(r.err.empty());
        CHECK_FALSE(r.out.empty());
    }
}
