#include "cloak/scenario.hpp"

#include <filesystem>

#include "cloak/compiler.hpp"
#include "cloak/executor.hpp"

namespace cloak {

namespace {

// Thrown for malformed scenarios (exit 2); expectation mismatches (exit 1)
// flow through StepMismatch.
struct ScenarioFault {
    std::string message;
};

struct StepMismatch {
    std::string message;
};

struct Expectation {
    bool accept = true;
    bool ready = false;        // submit only: accepted and session complete
    std::string reject_with;   // required substring of the error name
};

Expectation parse_expectation(const nlohmann::json& step) {
    Expectation e;
    std::string text = step.value("expect", "accept");
    if (text == "accept") return e;
    if (text == "ready") {
        e.ready = true;
        return e;
    }
    if (text.rfind("reject", 0) == 0) {
        e.accept = false;
        if (text.size() > 7 && text[6] == ':') e.reject_with = text.substr(7);
        return e;
    }
    throw ScenarioFault{"unknown expectation '" + text + "'"};
}

class Runner {
public:
    ScenarioReport run(const nlohmann::json& j, const std::string& base_dir) {
        ScenarioReport report;
        try {
            setup(j, base_dir);
            const auto& steps = j.at("steps");
            size_t n = 0;
            for (const auto& step : steps) {
                ++n;
                std::string line = "step " + std::to_string(n) + ": " + run_step(step);
                report.lines.push_back(std::move(line));
            }
            report.lines.push_back("final root: " + final_root());
        } catch (const StepMismatch& m) {
            report.ok = false;
            report.exit_code = 1;
            report.failure = m.message;
        } catch (const ScenarioFault& f) {
            report.ok = false;
            report.exit_code = 2;
            report.failure = f.message;
        } catch (const nlohmann::json::exception& e) {
            report.ok = false;
            report.exit_code = 2;
            report.failure = std::string("malformed scenario: ") + e.what();
        }
        return report;
    }

private:
    Ledger ledger_;
    KeyDirectory directory_;
    std::map<std::string, crypto::PartyKeys> parties_;
    std::map<std::string, Executor> executors_;
    std::map<std::string, std::string> address_book_;  // $name -> 40-hex address
    CompileResult compiled_;
    std::string contract_id_;
    std::string contract_executor_;
    // symbolic session name -> (executor name, session id)
    std::map<std::string, std::pair<std::string, std::string>> sessions_;
    std::map<std::string, ResultAnnouncement> announcements_;

    void setup(const nlohmann::json& j, const std::string& base_dir) {
        std::string seed = j.value("seed", std::string("scenario"));
        for (const auto& name : j.at("parties")) {
            std::string n = name.get<std::string>();
            auto keys = crypto::PartyKeys::from_seed(crypto::derive_seed(seed + ":party:" + n));
            directory_.add(keys.address, keys.box.pk);
            address_book_["$" + n] = crypto::hex_encode(keys.address);
            parties_.emplace(n, std::move(keys));
        }
        for (const auto& name : j.at("executors")) {
            std::string n = name.get<std::string>();
            auto keys =
                crypto::ExecutorKeys::from_seed(crypto::derive_seed(seed + ":executor:" + n));
            address_book_["$" + n] = crypto::hex_encode(keys.address);
            executors_.emplace(n, Executor(std::move(keys), &directory_));
        }

        std::filesystem::path p = j.at("contract").get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        compiled_ = compile_file(p.string());
        if (!compiled_.ok()) {
            std::string msg = "contract '" + p.string() + "' failed to compile";
            for (const auto& d : compiled_.diagnostics) msg += "; " + d.message;
            throw ScenarioFault{msg};
        }
    }

    // ---- shared lookups -------------------------------------------------------

    Executor& executor(const nlohmann::json& step, const char* key = "executor") {
        std::string name = step.at(key).get<std::string>();
        auto it = executors_.find(name);
        if (it == executors_.end()) throw ScenarioFault{"unknown executor '" + name + "'"};
        return it->second;
    }

    const crypto::PartyKeys& party(const nlohmann::json& step, const char* key = "party") {
        std::string name = step.at(key).get<std::string>();
        auto it = parties_.find(name);
        if (it == parties_.end()) throw ScenarioFault{"unknown party '" + name + "'"};
        return it->second;
    }

    crypto::Address address_of(const std::string& name) {
        auto it = address_book_.find("$" + name);
        if (it == address_book_.end()) throw ScenarioFault{"unknown participant '" + name + "'"};
        auto bytes = crypto::hex_decode(it->second);
        crypto::Address a{};
        std::copy(bytes->begin(), bytes->end(), a.begin());
        return a;
    }

    // Replaces "$name" strings (values and object keys) with hex addresses.
    nlohmann::json resolve(const nlohmann::json& j) {
        if (j.is_string()) {
            std::string s = j.get<std::string>();
            if (!s.empty() && s[0] == '$') {
                auto it = address_book_.find(s);
                if (it == address_book_.end()) throw ScenarioFault{"unknown name '" + s + "'"};
                return it->second;
            }
            return j;
        }
        if (j.is_array()) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& e : j) out.push_back(resolve(e));
            return out;
        }
        if (j.is_object()) {
            nlohmann::json out = nlohmann::json::object();
            for (const auto& [k, v] : j.items()) {
                std::string key = k;
                if (!key.empty() && key[0] == '$') {
                    auto it = address_book_.find(key);
                    if (it == address_book_.end())
                        throw ScenarioFault{"unknown name '" + key + "'"};
                    key = it->second;
                }
                out[key] = resolve(v);
            }
            return out;
        }
        return j;
    }

    void check(const Expectation& e, bool accepted, const std::string& error_name,
               const std::string& what) {
        if (e.accept && !accepted)
            throw StepMismatch{what + ": expected accept, got reject (" + error_name + ")"};
        if (!e.accept && accepted) throw StepMismatch{what + ": expected reject, got accept"};
        if (!e.accept && !e.reject_with.empty() &&
            error_name.find(e.reject_with) == std::string::npos)
            throw StepMismatch{what + ": expected reject '" + e.reject_with + "', got '" +
                               error_name + "'"};
    }

    std::string outcome_text(bool accepted, const std::string& error_name) {
        return accepted ? "accepted" : "rejected (" + error_name + ")";
    }

    std::string final_root() {
        if (contract_id_.empty()) return "none";
        auto root = ledger_.current_root(contract_id_);
        return root ? root->hex() : "none";
    }

    // ---- steps -------------------------------------------------------------------

    std::string run_step(const nlohmann::json& step) {
        std::string op = step.at("op").get<std::string>();
        if (op == "register") return do_register(step);
        if (op == "deploy") return do_deploy(step);
        if (op == "session") return do_session(step);
        if (op == "submit") return do_submit(step);
        if (op == "execute") return do_execute(step);
        if (op == "verify") return do_verify(step);
        if (op == "open") return do_open(step);
        if (op == "check_state") return do_check_state(step);
        if (op == "tamper") return do_tamper(step);
        throw ScenarioFault{"unknown op '" + op + "'"};
    }

    std::string do_register(const nlohmann::json& step) {
        Expectation e = parse_expectation(step);
        auto outcome = ledger_.register_worker(crypto::mock_attest(executor(step).keys()));
        std::string err = outcome.ok() ? "" : register_error_name(*outcome.error);
        check(e, outcome.ok(), err, "register");
        return "register " + step.at("executor").get<std::string>() + ": " +
               outcome_text(outcome.ok(), err);
    }

    std::string do_deploy(const nlohmann::json& step) {
        Expectation e = parse_expectation(step);
        std::string name = step.at("executor").get<std::string>();
        Executor& ex = executor(step);

        std::map<std::string, Value> fixture;
        if (step.contains("state")) {
            const ContractDecl& ast = *compiled_.compiled->ast;
            nlohmann::json slots = resolve(step.at("state"));
            for (const auto& [slot, jval] : slots.items()) {
                const VarDecl* decl = nullptr;
                for (const auto& sv : ast.state_vars)
                    if (sv.name == slot) decl = &sv;
                if (!decl) throw ScenarioFault{"fixture slot '" + slot + "' not in contract"};
                auto v = value_from_json(jval, decl->type);
                if (!v) throw ScenarioFault{"fixture value for '" + slot + "' has the wrong type"};
                fixture.emplace(slot, std::move(*v));
            }
        }

        auto outcome = ex.deploy(ledger_, compiled_.compiled->policy_bytes,
                                 compiled_.compiled->artifacts.service_source, fixture);
        check(e, outcome.ok(), outcome.error.value_or(""), "deploy");
        if (outcome.ok()) {
            contract_id_ = outcome.contract_id;
            contract_executor_ = name;
        }
        return "deploy by " + name + ": " +
               (outcome.ok() ? "accepted, contract " + outcome.contract_id.substr(0, 16)
                             : "rejected (" + *outcome.error + ")");
    }

    std::string do_session(const nlohmann::json& step) {
        Expectation e = parse_expectation(step);
        Executor& ex = executor(step);
        std::string fn = step.at("function").get<std::string>();
        crypto::Address initiator = address_of(step.at("initiator").get<std::string>());

        std::map<std::string, Value> args;
        if (step.contains("args")) {
            const ContractDecl& ast = *compiled_.compiled->ast;
            const FunctionDecl* decl = nullptr;
            for (const auto& f : ast.functions)
                if (f->name == fn) decl = f.get();
            if (!decl) throw ScenarioFault{"unknown function '" + fn + "' in args typing"};
            nlohmann::json resolved = resolve(step.at("args"));
            for (const auto& [pname, jval] : resolved.items()) {
                const VarDecl* param = nullptr;
                for (const auto& p : decl->params)
                    if (p.name == pname) param = &p;
                if (!param) throw ScenarioFault{"unknown argument '" + pname + "'"};
                auto v = value_from_json(jval, param->type);
                if (!v) throw ScenarioFault{"argument '" + pname + "' has the wrong type"};
                args.emplace(pname, std::move(*v));
            }
        }

        auto outcome = ex.propose_mpt(contract_id_, fn, initiator, args);
        std::string err = outcome.ok() ? "" : session_error_name(*outcome.error);
        check(e, outcome.ok(), err, "session");
        if (outcome.ok() && step.contains("id"))
            sessions_[step.at("id").get<std::string>()] = {step.at("executor").get<std::string>(),
                                                           outcome.session_id};
        return "session " + fn + ": " + outcome_text(outcome.ok(), err) +
               (outcome.ok() ? ", " + std::to_string(outcome.expected.size()) + " parties" : "");
    }

    std::string do_submit(const nlohmann::json& step) {
        Expectation e = parse_expectation(step);
        std::string sym = step.at("session").get<std::string>();
        auto sit = sessions_.find(sym);
        if (sit == sessions_.end()) throw ScenarioFault{"unknown session '" + sym + "'"};
        Executor& ex = executors_.at(sit->second.first);
        const crypto::PartyKeys& p = party(step);

        std::string message = resolve(step.at("inputs")).dump();
        crypto::Bytes sealed = crypto::seal(
            ex.keys().box.pk,
            {reinterpret_cast<const uint8_t*>(message.data()), message.size()});
        auto outcome = ex.submit_input(sit->second.second, p.address, sealed);
        std::string err = outcome.ok() ? "" : session_error_name(*outcome.error);
        check(e, outcome.ok(), err, "submit");
        if (e.ready != outcome.ready && outcome.ok())
            throw StepMismatch{"submit: expected " + std::string(e.ready ? "ready" : "pending") +
                               ", session is " + (outcome.ready ? "ready" : "pending")};
        return "submit by " + step.at("party").get<std::string>() + ": " +
               outcome_text(outcome.ok(), err) + (outcome.ready ? ", ready" : "");
    }

    std::string do_execute(const nlohmann::json& step) {
        Expectation e = parse_expectation(step);
        std::string sym = step.at("session").get<std::string>();
        auto sit = sessions_.find(sym);
        if (sit == sessions_.end()) throw ScenarioFault{"unknown session '" + sym + "'"};
        Executor& ex = executors_.at(sit->second.first);

        auto outcome = ex.execute_mpt(sit->second.second, ledger_);
        std::string err = outcome.ok() ? "" : session_error_name(*outcome.error);
        check(e, outcome.ok(), err, "execute");

        if (outcome.ok() && step.contains("expect_locals")) {
            nlohmann::json locals = resolve(step.at("expect_locals"));
            for (const auto& [name, expected] : locals.items()) {
                auto it = outcome.body_locals.find(name);
                if (it == outcome.body_locals.end())
                    throw StepMismatch{"execute: no local named '" + name + "'"};
                if (value_to_json(it->second) != expected)
                    throw StepMismatch{"execute: local '" + name + "' is " +
                                       value_to_json(it->second).dump() + ", expected " +
                                       expected.dump()};
            }
        }
        if (outcome.ok() && step.contains("save"))
            announcements_[step.at("save").get<std::string>()] = *outcome.announcement;
        return "execute " + sym + ": " + outcome_text(outcome.ok(), err);
    }

    const ResultAnnouncement& announcement(const nlohmann::json& step) {
        std::string name = step.at("announcement").get<std::string>();
        auto it = announcements_.find(name);
        if (it == announcements_.end()) throw ScenarioFault{"unknown announcement '" + name + "'"};
        return it->second;
    }

    std::string do_verify(const nlohmann::json& step) {
        Expectation e = parse_expectation(step);
        auto outcome = ledger_.verify_and_update(announcement(step));
        std::string err = outcome.ok() ? "" : verify_error_name(*outcome.error);
        check(e, outcome.ok(), err, "verify");
        return "verify " + step.at("announcement").get<std::string>() + ": " +
               outcome_text(outcome.ok(), err);
    }

    std::string do_open(const nlohmann::json& step) {
        const ResultAnnouncement& a = announcement(step);
        const crypto::PartyKeys& p = party(step);
        Executor& ex = executors_.at(contract_executor_);
        const PrivacyPolicy* policy = ex.contract_policy(a.contract_id);
        if (!policy) throw ScenarioFault{"no policy for announcement contract"};

        auto outcome = open_result(p, a, *policy);
        if (step.contains("expect_error")) {
            std::string want = step.at("expect_error").get<std::string>();
            if (outcome.ok())
                throw StepMismatch{"open: expected error '" + want + "', got success"};
            if (want != open_error_name(*outcome.error))
                throw StepMismatch{"open: expected error '" + want + "', got '" +
                                   open_error_name(*outcome.error) + "'"};
            return "open by " + step.at("party").get<std::string>() + ": rejected (" + want + ")";
        }
        if (!outcome.ok())
            throw StepMismatch{std::string("open: failed (") + open_error_name(*outcome.error) +
                               ")"};
        if (step.contains("expect_returns")) {
            nlohmann::json expected = resolve(step.at("expect_returns"));
            if (expected.size() != outcome.returns.size())
                throw StepMismatch{"open: got " + std::to_string(outcome.returns.size()) +
                                   " returns, expected " + std::to_string(expected.size())};
            for (const auto& [name, jval] : expected.items()) {
                auto it = outcome.returns.find(name);
                if (it == outcome.returns.end())
                    throw StepMismatch{"open: no return named '" + name + "'"};
                if (value_to_json(it->second) != jval)
                    throw StepMismatch{"open: return '" + name + "' is " +
                                       value_to_json(it->second).dump() + ", expected " +
                                       jval.dump()};
            }
        }
        return "open by " + step.at("party").get<std::string>() + ": verified, " +
               std::to_string(outcome.returns.size()) + " values";
    }

    std::string do_check_state(const nlohmann::json& step) {
        Executor& ex = executor(step);
        const auto* state = ex.contract_state(contract_id_);
        if (!state) throw ScenarioFault{"executor holds no contract state"};

        nlohmann::json expect = resolve(step.at("expect"));
        for (const auto& [slot, expected] : expect.items()) {
            auto it = state->find(slot);
            if (it == state->end()) throw StepMismatch{"check_state: no slot '" + slot + "'"};
            if (value_to_json(it->second) != expected)
                throw StepMismatch{"check_state: slot '" + slot + "' is " +
                                   value_to_json(it->second).dump() + ", expected " +
                                   expected.dump()};
        }
        auto local = ex.recommit(contract_id_);
        auto chain = ledger_.current_root(contract_id_);
        if (!local || !chain || local->root != *chain)
            throw StepMismatch{"check_state: executor commitment diverges from ledger root"};
        return "check_state: " + std::to_string(expect.size()) + " slots match, root in sync";
    }

    std::string do_tamper(const nlohmann::json& step) {
        ResultAnnouncement a = announcement(step);
        std::string field = step.at("field").get<std::string>();
        if (field == "policy_hash") {
            a.policy_hash.v[0] ^= 0xff;
        } else if (field == "code_hash") {
            a.code_hash.v[0] ^= 0xff;
        } else if (field == "old_root") {
            a.old_root.v[0] ^= 0xff;
        } else if (field == "new_root") {
            a.new_state.root.v[0] ^= 0xff;
        } else if (field == "signature") {
            a.proof[0] ^= 0xff;
        } else if (field == "teemr") {
            a.teemr.v[0] ^= 0xff;
        } else if (field == "executor") {
            a.executor[0] ^= 0xff;
        } else if (field == "return_commitment") {
            if (a.return_commitments.empty())
                throw ScenarioFault{"tamper: announcement has no return commitments"};
            a.return_commitments[0].second.digest.v[0] ^= 0xff;
        } else {
            throw ScenarioFault{"tamper: unknown field '" + field + "'"};
        }
        announcements_[step.at("save").get<std::string>()] = std::move(a);
        return "tamper " + field + ": saved as " + step.at("save").get<std::string>();
    }
};

}  // namespace

ScenarioReport run_scenario_file(const std::string& path) {
    auto text = read_text_file(path);
    if (!text) {
        ScenarioReport report;
        report.ok = false;
        report.exit_code = 2;
        report.failure = "cannot read scenario '" + path + "'";
        return report;
    }
    nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
    if (j.is_discarded()) {
        ScenarioReport report;
        report.ok = false;
        report.exit_code = 2;
        report.failure = "scenario '" + path + "' is not valid JSON";
        return report;
    }
    return run_scenario_json(j, std::filesystem::path(path).parent_path().string());
}

ScenarioReport run_scenario_json(const nlohmann::json& j, const std::string& base_dir) {
    return Runner().run(j, base_dir);
}

}  // namespace cloak
