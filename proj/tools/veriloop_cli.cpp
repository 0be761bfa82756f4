// veriloop command-line front end. All subcommands print a single JSON
// document (or a short text summary with --output text) on stdout; output is
// byte-identical across runs for identical arguments.
//
// Exit codes: 0 success, 1 failed checks / infeasible key length, 2 usage
// errors (bad flags, malformed inputs).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "veriloop/checks.hpp"
#include "veriloop/counterexample.hpp"
#include "veriloop/state_io.hpp"

namespace {

void print_json(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int run_counterexample(const std::string& output) {
    veriloop::CounterexampleReport report = veriloop::counterexample::run();
    if (output == "json") {
        nlohmann::ordered_json j;
        j["schema"] = "veriloop/1";
        j["command"] = "counterexample";
        j.update(report.to_json());
        print_json(j);
    } else {
        std::cout << "d_no_verification    = " << report.d_no_verification << "\n"
                  << "pr_keys_differ       = " << report.pr_keys_differ << "\n"
                  << "trace_distance_with_V= " << report.trace_distance_with_V << "\n"
                  << "secrecy_V0           = " << report.secrecy_V0 << "\n"
                  << "lemma2_rhs           = " << report.lemma2_rhs << "\n"
                  << "bound holds:           " << (report.bound_holds() ? "yes" : "NO") << "\n"
                  << "naive bound violated:  " << (report.naive_bound_violated() ? "yes" : "NO")
                  << "\n";
    }
    return report.bound_holds() && report.naive_bound_violated() ? 0 : 1;
}

int run_check_cmd(const std::string& output, const std::string& name,
                  const veriloop::CheckOptions& opt) {
    veriloop::CheckSuiteResult suite = veriloop::run_check(veriloop::check_from_name(name), opt);
    if (output == "json") {
        print_json(suite.to_json());
    } else {
        std::cout << "check " << name << ": " << (suite.options.trials - suite.failures) << "/"
                  << suite.options.trials << " passed";
        if (suite.name == veriloop::CheckName::lemma2)
            std::cout << "; naive-bound violations " << suite.naive_bound_violations << "/"
                      << suite.adversarial_instances << " adversarial";
        std::cout << (suite.all_pass() ? "" : "  [FAIL]") << "\n";
    }
    return suite.all_pass() ? 0 : 1;
}

int run_keylen(const std::string& output, double hmin, double eps_sec, int tag_bits) {
    nlohmann::ordered_json j;
    j["schema"] = "veriloop/1";
    j["command"] = "keylen";
    j["hmin_bound"] = hmin;
    j["eps_sec"] = eps_sec;
    j["tag_bits"] = tag_bits;
    try {
        const int len = veriloop::key_length({hmin, eps_sec, tag_bits});
        j["key_length"] = len;
        if (output == "json") print_json(j);
        else std::cout << "key length = " << len << "\n";
        return 0;
    } catch (const veriloop::Error& e) {
        if (e.code() != veriloop::errc::key_length_nonpositive) throw;
        j["error"] = veriloop::errc_name(e.code());
        j["message"] = e.what();
        if (output == "json") print_json(j);
        else std::cout << e.what() << "\n";
        return 1;
    }
}

int run_simulate(const std::string& output, const std::string& state_file,
                 const std::string& hash_seed_hex, int out_bits, const std::string& source) {
    const veriloop::CqState state = veriloop::load_state(state_file);
    const int pos = state.register_index(source);
    const int width = state.registers()[static_cast<std::size_t>(pos)].bit_width();
    veriloop::require(width >= 1, veriloop::errc::length_mismatch,
                      "register '" + source + "' does not hold fixed-width bit-strings");
    const veriloop::ToeplitzHash hash =
        veriloop::ToeplitzHash::from_hex(width, out_bits, hash_seed_hex);

    veriloop::Transcript transcript;
    const veriloop::CqState keyed =
        veriloop::privacy_amplification(state, source, "K_prime", hash, &transcript);
    const veriloop::CqState final_state = keyed.marginalize({source});

    nlohmann::ordered_json j;
    j["schema"] = "veriloop/1";
    j["command"] = "simulate";
    j["state_file"] = state_file;
    j["source"] = source;
    j["hash"] = {{"n_in", hash.n_in}, {"n_out", hash.n_out}, {"seed_hex", hash.seed_hex()}};
    j["transcript"] = transcript.steps;
    j["total_trace"] = final_state.total_trace();
    try {
        j["secrecy_distance"] = veriloop::secrecy_distance(final_state, "K_prime");
    } catch (const veriloop::Error& e) {
        if (e.code() != veriloop::errc::abort_symbol_present) throw;
        j["secrecy_distance"] = nullptr;  // undefined on abort terms
    }
    if (output == "json") {
        print_json(j);
    } else {
        std::cout << "K_prime = Toeplitz(" << hash.n_in << "->" << hash.n_out << ", seed "
                  << hash.seed_hex() << ") applied to " << source << "; trace "
                  << final_state.total_trace() << "\n";
        if (j["secrecy_distance"].is_null()) std::cout << "secrecy distance undefined (aborts)\n";
        else std::cout << "secrecy distance = " << j["secrecy_distance"].get<double>() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"veriloop: QKD post-processing states, the error-verification "
                 "loophole, and the one-extra-bit fix"};
    app.require_subcommand(1);
    std::string output = "json";
    app.add_option("--output", output, "output format")->check(CLI::IsMember({"json", "text"}));

    CLI::App* ce = app.add_subcommand("counterexample",
                                      "evaluate the loophole fixture and report its metrics");

    CLI::App* ck = app.add_subcommand("check", "run a randomized check suite");
    std::string check_name;
    veriloop::CheckOptions opt;
    std::optional<std::string> profile_name_opt;
    ck->add_option("--name", check_name,
                   "lemma1|lemma2|lemma3|chain_rule|lhl|collision")
        ->required();
    ck->add_option("--trials", opt.trials, "number of instances");
    ck->add_option("--seed", opt.master_seed, "master seed");
    ck->add_option("--n-bits", opt.n_bits, "fix the reconciled key length");
    ck->add_option("--eve", opt.eve, "fix the Eve alphabet size");
    ck->add_option("--profile", profile_name_opt,
                   "independent|copied|noisy-copy|adversarial-parity");
    ck->add_option("--noise", opt.noise, "fix the noisy-copy flip probability");
    ck->add_option("--eps-sec", opt.eps_sec, "secrecy target (lemma3)");
    ck->add_flag("--timings", opt.timings, "include per-report runtime_ms in the JSON");

    CLI::App* kl = app.add_subcommand("keylen", "final key length per the one-extra-bit rule");
    double hmin = 0, eps_sec = 0;
    int tag_bits = 0;
    kl->add_option("--hmin", hmin, "lower bound on H_min(A|E) in bits")->required();
    kl->add_option("--eps-sec", eps_sec, "secrecy target")->required();
    kl->add_option("--tag-bits", tag_bits, "announced verification tag length |H|");

    CLI::App* sim = app.add_subcommand("simulate", "apply fixed-hash privacy amplification "
                                                   "to a state file");
    std::string state_file, hash_seed_hex, source = "A";
    int out_bits = 1;
    sim->add_option("--state", state_file, "state JSON file")->required();
    sim->add_option("--hash-seed", hash_seed_hex, "Toeplitz seed, hex, MSB first")->required();
    sim->add_option("--out-bits", out_bits, "output key length")->required();
    sim->add_option("--source", source, "source register name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ce->parsed()) return run_counterexample(output);
        if (ck->parsed()) {
            if (profile_name_opt) opt.profile = veriloop::profile_from_name(*profile_name_opt);
            return run_check_cmd(output, check_name, opt);
        }
        if (kl->parsed()) return run_keylen(output, hmin, eps_sec, tag_bits);
        if (sim->parsed())
            return run_simulate(output, state_file, hash_seed_hex, out_bits, source);
    } catch (const veriloop::Error& e) {
        nlohmann::ordered_json j;
        j["schema"] = "veriloop/1";
        j["error"] = veriloop::errc_name(e.code());
        j["message"] = e.what();
        print_json(j);
        return 2;
    }
    return 2;
}
