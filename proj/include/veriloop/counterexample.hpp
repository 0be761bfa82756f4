#pragma once

#include <nlohmann/json.hpp>

#include "veriloop/cq_state.hpp"
#include "veriloop/metrics.hpp"
#include "veriloop/protocol.hpp"

namespace veriloop {

// The canonical loophole fixture. A two-bit reconciled key pair
//
//     rho_ABE = (1/8) sum_{x,y,z} [xy]_A (x) [zx]_B (x) [z]_E
//
// run through first-bit privacy amplification and the "compare Bob's two
// bits" verification gives keys that are 0-secret without verification and
// 0-correct with it, yet the final state (with the public outcome V) sits at
// trace distance 1/4 from ideal. The fixture is built through the public
// state API so it exercises the full pipeline.

struct CounterexampleReport {
    double d_no_verification = 0;     // secrecy of K_A before verification
    double pr_keys_differ = 0;        // correctness of the verified protocol
    double trace_distance_with_V = 0; // distance of the final state to its ideal
    double secrecy_V0 = 0;            // secrecy of K_A conditioned on V=0
    double lemma2_rhs = 0;            // secrecy_V0 + pr_keys_differ

    // trace_distance_with_V <= secrecy_V0 + pr_keys_differ must hold
    bool bound_holds() const { return trace_distance_with_V <= lemma2_rhs + 1e-12; }
    // ... while the naive bound d_no_verification + pr_keys_differ fails
    bool naive_bound_violated() const {
        return trace_distance_with_V > d_no_verification + pr_keys_differ + 1e-12;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["d_no_verification"] = d_no_verification;
        j["pr_keys_differ"] = pr_keys_differ;
        j["trace_distance_with_V"] = trace_distance_with_V;
        j["secrecy_V0"] = secrecy_V0;
        j["lemma2_rhs"] = lemma2_rhs;
        j["bound_holds"] = bound_holds();
        j["naive_bound_violated"] = naive_bound_violated();
        j["all_pass"] = bound_holds() && naive_bound_violated();
        return j;
    }
};

namespace counterexample {

// The 8-term state above: A = xy, B = zx, Eve holds [z] (diagonal, dim 2).
inline CqState build_state() {
    std::vector<ClassicalRegister> regs = {ClassicalRegister::bits("A", 2),
                                           ClassicalRegister::bits("B", 2)};
    std::vector<std::pair<Assignment, ComplexMatrix>> terms;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z) {
                ComplexMatrix block(2);
                block.at(z, z) = 0.125;
                terms.push_back({{bits_to_string(static_cast<std::uint64_t>(2 * x + y), 2),
                                  bits_to_string(static_cast<std::uint64_t>(2 * z + x), 2)},
                                 block});
            }
    return CqState::build(std::move(regs), 2, terms);
}

inline CounterexampleReport run(Transcript* transcript = nullptr) {
    const CqState rho_abe = build_state();

    // PA rule "take the first bit", expressed as the fixed linear map with
    // T = [1 0] (seed value 0b10).
    const ToeplitzHash first_bit = ToeplitzHash::make(2, 1, 0b10);
    CqState s = privacy_amplification(rho_abe, "A", "K_A", first_bit, transcript);
    s = privacy_amplification(s, "B", "K_B", first_bit, transcript);

    CounterexampleReport r;
    r.d_no_verification = secrecy_distance(s.marginalize({"A", "B", "K_B"}), "K_A");

    // Error verification: Bob compares his two reconciled key bits.
    const int pb = s.register_index("B");
    VerificationOutcome outcome = verify_with_predicate(
        s,
        [pb](const Assignment& a) {
            const std::string& b = a[static_cast<std::size_t>(pb)];
            return b[0] == b[1];
        },
        "V", transcript);
    CqState final_state =
        abort_collapse(outcome, {"K_A", "K_B"}, "V", transcript).marginalize({"A", "B"});

    r.trace_distance_with_V = trace_distance(final_state, final_state.ideal_state({"K_A", "K_B"}));
    r.secrecy_V0 = secrecy_distance(final_state.condition("V", "0").marginalize({"K_B"}), "K_A");
    r.pr_keys_differ = prob_keys_differ(final_state, "K_A", "K_B");
    r.lemma2_rhs = r.secrecy_V0 + r.pr_keys_differ;
    return r;
}

}  // namespace counterexample
}  // namespace veriloop
