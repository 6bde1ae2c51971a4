#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "cloak/compiler.hpp"
#include "cloak/parser.hpp"
#include "cloak/pretty.hpp"
#include "cloak/scenario.hpp"
#include "cloak/strip.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;

void print_diagnostics(const cloak::SourceBuffer& buffer,
                       const std::vector<cloak::Diagnostic>& diags) {
    std::cerr << cloak::render_diagnostics(buffer, diags);
}

void print_debug(const cloak::CompiledContract& cc) {
    for (const auto& fa : cc.checked.functions) {
        const cloak::CompiledFunction* timing = nullptr;
        for (const auto& f : cc.functions)
            if (f.name == fa.fn->name) timing = &f;
        std::cerr << "function " << fa.fn->name << ": kind=" << cloak::function_kind_name(fa.kind)
                  << " owners=" << fa.combined.to_string() << " check=" << fa.check_us
                  << "us codegen=" << (timing ? timing->codegen_us : 0) << "us\n";
    }
    std::cerr << "policy hash:   " << cc.policy_hash.hex() << '\n'
              << "service hash:  " << cc.service_hash.hex() << '\n'
              << "verifier hash: " << cc.verifier_hash.hex() << '\n'
              << "runtime teemr: " << cloak::crypto::runtime_teemr().hex() << '\n';
}

int run_strip(const std::string& input) {
    auto text = cloak::read_text_file(input);
    if (!text) {
        std::cerr << "error: cannot read '" << input << "'\n";
        return kUsage;
    }
    cloak::SourceFile file = cloak::parse_source(input, std::move(*text));
    if (cloak::has_errors(file.diagnostics)) {
        print_diagnostics(file.buffer, file.diagnostics);
        return kDiagnostics;
    }
    cloak::SourceFile plain = cloak::strip_annotations(file);
    auto diags = cloak::validate_subset(plain);
    if (cloak::has_errors(diags)) {
        print_diagnostics(plain.buffer, diags);
        return kDiagnostics;
    }
    std::cout << cloak::pretty_print(plain);
    return kOk;
}

int run_compile(const std::string& input, const std::string& outdir, bool check_only, bool debug) {
    cloak::CompileResult result = cloak::compile_file(input);
    if (!result.ok()) {
        if (!result.diagnostics.empty())
            print_diagnostics(result.file.buffer, result.diagnostics);
        for (const auto& d : result.diagnostics)
            if (d.message.rfind("cannot read", 0) == 0) return kUsage;
        return kDiagnostics;
    }
    const cloak::CompiledContract& cc = *result.compiled;
    if (debug) print_debug(cc);

    if (check_only) {
        std::cout << cc.policy_bytes << '\n';
        return kOk;
    }

    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory '" << outdir << "'\n";
        return kUsage;
    }
    auto out = [&](const char* name, const std::string& content) {
        std::string path = (std::filesystem::path(outdir) / name).string();
        if (!cloak::write_text_file_atomic(path, content)) {
            std::cerr << "error: cannot write '" << path << "'\n";
            return false;
        }
        return true;
    };
    if (!out("policy.json", cc.policy_bytes) ||
        !out("service.sol", cc.artifacts.service_source) ||
        !out("verifier.sol", cc.artifacts.verifier_source) ||
        !out("summary.json", cc.summary_json().dump(2) + "\n"))
        return kUsage;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compiler and deterministic deployment simulator for confidential contracts"};
    app.name("cloak");

    std::string input, outdir, scenario;
    bool strip_mode = false;
    bool check_mode = false;
    bool debug = false;

    auto* opt_i = app.add_option("-i,--input", input, "Annotated contract source");
    app.add_option("-o,--output", outdir, "Directory for policy.json, service.sol, verifier.sol, summary.json");
    auto* opt_s = app.add_flag("-s,--solc", strip_mode, "Strip annotations, print plain source to stdout");
    auto* opt_t = app.add_flag("-t,--check", check_mode, "Check only, print the canonical policy to stdout");
    app.add_flag("--debug", debug, "Print per-function analysis and artifact hashes to stderr");
    opt_s->excludes(opt_t);

    auto* demo = app.add_subcommand("demo", "Run a scripted end-to-end scenario");
    demo->add_option("scenario", scenario, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*demo) {
        cloak::ScenarioReport report = cloak::run_scenario_file(scenario);
        for (const auto& line : report.lines) std::cout << line << '\n';
        if (!report.ok) std::cerr << "scenario failed: " << report.failure << '\n';
        return report.exit_code;
    }

    if (opt_i->count() == 0) {
        std::cerr << "error: -i <file> is required (see --help)\n";
        return kUsage;
    }
    if (strip_mode) return run_strip(input);
    if (!check_mode && outdir.empty()) {
        std::cerr << "error: one of -o <dir>, -t, or -s is required\n";
        return kUsage;
    }
    return run_compile(input, outdir, check_mode, debug);
}
