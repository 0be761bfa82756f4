#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "veriloop/cq_state.hpp"
#include "veriloop/metrics.hpp"
#include "veriloop/toeplitz.hpp"

namespace veriloop {

// Ordered log of protocol steps, serializable as a JSON transcript. Hash
// seeds are recorded bit-exact (hex) so a run can be reproduced from the
// transcript alone.
struct Transcript {
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();

    void record(std::string_view step, const std::vector<std::string>& registers_added,
                double trace_before, double trace_after, nlohmann::ordered_json parameters) {
        nlohmann::ordered_json e;
        e["step"] = std::string(step);
        e["registers_added"] = registers_added;
        e["trace_before"] = trace_before;
        e["trace_after"] = trace_after;
        e["parameters"] = std::move(parameters);
        steps.push_back(std::move(e));
    }
};

// Result of an error-verification step: the input state with the announced
// hash value H (hash mode only) and the public outcome V appended.
// V = "0" means continue, "1" means abort.
struct VerificationOutcome {
    CqState state;
    int tag_bits = 0;  // |H|; 0 in predicate mode
};

namespace detail {

inline int checked_bit_width(const CqState& s, std::string_view reg) {
    const ClassicalRegister& r = s.registers()[static_cast<std::size_t>(s.register_index(reg))];
    int w = r.bit_width();
    require(w >= 1, errc::length_mismatch,
            "register '" + std::string(reg) + "' does not hold fixed-width bit-strings");
    return w;
}

}  // namespace detail

// Hash-based error verification: appends H = hash(a) (public, n_out bits)
// and V with V = "0" iff hash(a) == hash(b). Trace is preserved.
inline VerificationOutcome verify_with_hash(const CqState& s, std::string_view reg_a,
                                            std::string_view reg_b, const ToeplitzHash& hash,
                                            std::string_view h_name = "H",
                                            std::string_view v_name = "V",
                                            Transcript* transcript = nullptr) {
    const int pa = s.register_index(reg_a);
    const int pb = s.register_index(reg_b);
    const int wa = detail::checked_bit_width(s, reg_a);
    const int wb = detail::checked_bit_width(s, reg_b);
    require(wa == hash.n_in && wb == hash.n_in, errc::length_mismatch,
            "reconciled key registers must hold " + std::to_string(hash.n_in) + "-bit strings");

    const double before = s.total_trace();
    const ClassicalRegister h_reg = ClassicalRegister::bits(std::string(h_name), hash.n_out);
    CqState with_h = s.apply_classical_function(h_reg, [&](const Assignment& a) {
        return hash.apply(a[static_cast<std::size_t>(pa)]);
    });
    const int ph = with_h.register_index(h_name);
    const ClassicalRegister v_reg = ClassicalRegister::bits(std::string(v_name), 1);
    CqState with_v = with_h.apply_classical_function(v_reg, [&](const Assignment& a) {
        return a[static_cast<std::size_t>(ph)] == hash.apply(a[static_cast<std::size_t>(pb)])
                   ? "0"
                   : "1";
    });
    if (transcript)
        transcript->record("verify_with_hash",
                           {std::string(h_name), std::string(v_name)}, before,
                           with_v.total_trace(),
                           {{"n_in", hash.n_in},
                            {"n_out", hash.n_out},
                            {"seed_hex", hash.seed_hex()},
                            {"reg_a", std::string(reg_a)},
                            {"reg_b", std::string(reg_b)}});
    return VerificationOutcome{std::move(with_v), hash.n_out};
}

// Predicate-based verification (e.g. Bob comparing bits of his own key):
// appends only V; the predicate returns true to continue (V = "0").
inline VerificationOutcome verify_with_predicate(
    const CqState& s, const std::function<bool(const Assignment&)>& continue_predicate,
    std::string_view v_name = "V", Transcript* transcript = nullptr) {
    const double before = s.total_trace();
    const ClassicalRegister v_reg = ClassicalRegister::bits(std::string(v_name), 1);
    CqState with_v = s.apply_classical_function(
        v_reg, [&](const Assignment& a) { return continue_predicate(a) ? "0" : "1"; });
    if (transcript)
        transcript->record("verify_with_predicate", {std::string(v_name)}, before,
                           with_v.total_trace(), nlohmann::ordered_json::object());
    return VerificationOutcome{std::move(with_v), 0};
}

// On V = "1" terms every key register's value is replaced by the abort
// symbol (terms merged accordingly); V = "0" terms, Eve blocks and H are
// untouched. Realizes rho^{V=1} = [abort][abort] (x) rho_E^{V=1}.
inline CqState abort_collapse(const VerificationOutcome& outcome,
                              const std::vector<std::string>& key_registers,
                              std::string_view v_name = "V", Transcript* transcript = nullptr) {
    CqState s = outcome.state;
    for (const auto& key : key_registers) s = s.extend_alphabet(key, kAbortSymbol);
    const int pv = s.register_index(v_name);
    std::vector<int> key_pos;
    for (const auto& key : key_registers) key_pos.push_back(s.register_index(key));

    const double before = s.total_trace();
    CqState collapsed = s.map_assignments([&](const Assignment& a) {
        if (a[static_cast<std::size_t>(pv)] == "0") return a;
        Assignment b = a;
        for (int pos : key_pos) b[static_cast<std::size_t>(pos)] = std::string(kAbortSymbol);
        return b;
    });
    if (transcript)
        transcript->record("abort_collapse", {}, before, collapsed.total_trace(),
                           {{"key_registers", key_registers}});
    return collapsed;
}

// Fixed-hash privacy amplification: appends out_register = hash(source).
// Abort terms pass through with an abort output key. The source register is
// retained; callers marginalize it before evaluating distances.
inline CqState privacy_amplification(const CqState& s, std::string_view source_register,
                                     std::string_view out_register, const ToeplitzHash& hash,
                                     Transcript* transcript = nullptr) {
    const int ps = s.register_index(source_register);
    const ClassicalRegister& src = s.registers()[static_cast<std::size_t>(ps)];
    require(src.bit_width() == hash.n_in, errc::length_mismatch,
            "source register width differs from hash n_in");
    const ClassicalRegister out_reg =
        ClassicalRegister::bits(std::string(out_register), hash.n_out, src.has_abort());
    const double before = s.total_trace();
    CqState out = s.apply_classical_function(out_reg, [&](const Assignment& a) {
        const std::string& sym = a[static_cast<std::size_t>(ps)];
        return sym == kAbortSymbol ? std::string(kAbortSymbol) : hash.apply(sym);
    });
    if (transcript)
        transcript->record("privacy_amplification", {std::string(out_register)}, before,
                           out.total_trace(),
                           {{"mode", "fixed"},
                            {"source", std::string(source_register)},
                            {"n_out", hash.n_out},
                            {"seed_hex", hash.seed_hex()}});
    return out;
}

// Family-averaged privacy amplification: appends the public hash-choice
// register F (uniform over the exhaustively enumerated Toeplitz family,
// symbols are the seeds in hex) and out_register = hash_F(source).
inline CqState privacy_amplification_averaged(const CqState& s, std::string_view source_register,
                                              std::string_view out_register, int out_bits,
                                              std::string_view f_register = "F",
                                              Transcript* transcript = nullptr) {
    require(out_bits >= 1, errc::out_of_range, "out_bits must be >= 1");
    const int ps = s.register_index(source_register);
    const ClassicalRegister& src = s.registers()[static_cast<std::size_t>(ps)];
    const int w = src.bit_width();
    require(w >= 1, errc::length_mismatch, "source register does not hold bit-strings");
    const ToeplitzFamily family(w, out_bits);

    std::vector<std::string> f_alphabet;
    f_alphabet.reserve(family.size());
    for (std::uint64_t i = 0; i < family.size(); ++i)
        f_alphabet.push_back(family.member(i).seed_hex());

    std::vector<ClassicalRegister> regs = s.registers();
    regs.push_back(ClassicalRegister::make(std::string(f_register), std::move(f_alphabet)));
    regs.push_back(ClassicalRegister::bits(std::string(out_register), out_bits, src.has_abort()));

    const double member_weight = 1.0 / static_cast<double>(family.size());
    std::vector<std::pair<Assignment, ComplexMatrix>> terms;
    s.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix& block) {
        const Assignment base = s.symbols_of(idx);
        const std::string& sym = base[static_cast<std::size_t>(ps)];
        const ComplexMatrix scaled = block.scaled(member_weight);
        for (std::uint64_t i = 0; i < family.size(); ++i) {
            const ToeplitzHash h = family.member(i);
            Assignment a = base;
            a.push_back(h.seed_hex());
            a.push_back(sym == kAbortSymbol ? std::string(kAbortSymbol) : h.apply(sym));
            terms.emplace_back(std::move(a), scaled);
        }
    });
    const double before = s.total_trace();
    CqState out = CqState::build(std::move(regs), s.eve_dim(), terms, s.tolerances());
    if (transcript)
        transcript->record("privacy_amplification", {std::string(f_register), std::string(out_register)},
                           before, out.total_trace(),
                           {{"mode", "averaged"},
                            {"source", std::string(source_register)},
                            {"n_out", out_bits},
                            {"family_size", family.size()}});
    return out;
}

// Inputs of the key-length rule: a lower bound on H_min(A|E) of the
// reconciled key, the secrecy target, and the announced tag length.
struct KeyLengthParams {
    double hmin_bound = 0;  // bits
    double eps_sec = 0;     // in (0,1]
    int tag_bits = 0;       // |H|
};

// Final key length floor(hmin - 2*log2(1/eps_sec)) - tag_bits - 1. The
// trailing -1 is the one-bit overhead that compensates announcing the
// verification outcome.
inline int key_length(const KeyLengthParams& p) {
    require(p.hmin_bound > 0 && p.hmin_bound <= 1e9, errc::out_of_range,
            "hmin_bound must be positive");
    require(p.eps_sec > 0.0 && p.eps_sec <= 1.0, errc::out_of_range, "eps_sec must be in (0,1]");
    require(p.tag_bits >= 0, errc::out_of_range, "tag_bits must be >= 0");
    const double ell = std::floor(p.hmin_bound - 2.0 * std::log2(1.0 / p.eps_sec));
    const double out = ell - p.tag_bits - 1;
    require(out >= 1.0, errc::key_length_nonpositive,
            "derived key length " + std::to_string(static_cast<long long>(out)) + " < 1");
    return static_cast<int>(out);
}

// Pr[K_A != K_B]; abort == abort counts as equal (an aborted run never has
// mismatched keys).
inline double prob_keys_differ(const CqState& s, std::string_view reg_ka, std::string_view reg_kb) {
    const int pa = s.register_index(reg_ka);
    const int pb = s.register_index(reg_kb);
    double p = 0;
    s.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix& block) {
        const auto& ra = s.registers()[static_cast<std::size_t>(pa)];
        const auto& rb = s.registers()[static_cast<std::size_t>(pb)];
        if (ra.symbol(idx[static_cast<std::size_t>(pa)]) !=
            rb.symbol(idx[static_cast<std::size_t>(pb)]))
            p += block.trace_real();
    });
    return p;
}

struct CorrectnessBound {
    double empirical = 0;  // family-averaged Pr[V=0 | A != B]
    double analytic = 0;   // 2^-n_out
    bool pass = false;
};

// Family-averaged Pr[V=0 | A != B] against the universal-hashing bound
// 2^-n_out; only defined when the state carries disagreement mass.
inline CorrectnessBound correctness_bound(const CqState& pre_verification, std::string_view reg_a,
                                          std::string_view reg_b, int n_out) {
    const int pa = pre_verification.register_index(reg_a);
    const int pb = pre_verification.register_index(reg_b);
    const int w = detail::checked_bit_width(pre_verification, reg_a);
    require(detail::checked_bit_width(pre_verification, reg_b) == w, errc::length_mismatch,
            "reconciled key registers have different widths");
    const ToeplitzFamily family(w, n_out);

    // classical weights over (a, b) value pairs
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> weight;
    pre_verification.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix& block) {
        const auto& ra = pre_verification.registers()[static_cast<std::size_t>(pa)];
        const auto& rb = pre_verification.registers()[static_cast<std::size_t>(pb)];
        const std::uint64_t va = bits_from_string(ra.symbol(idx[static_cast<std::size_t>(pa)]));
        const std::uint64_t vb = bits_from_string(rb.symbol(idx[static_cast<std::size_t>(pb)]));
        weight[{va, vb}] += block.trace_real();
    });

    double disagree = 0;
    for (const auto& [ab, wgt] : weight)
        if (ab.first != ab.second) disagree += wgt;
    require(disagree > kSupportThreshold, errc::no_disagreement_mass,
            "Pr[A != B] is zero; the conditional bound is undefined");

    double avg = 0;
    for (std::uint64_t seed = 0; seed < family.size(); ++seed) {
        double mass = 0;
        for (const auto& [ab, wgt] : weight)
            if (ab.first != ab.second &&
                toeplitz_apply_raw(seed, ab.first, n_out) == toeplitz_apply_raw(seed, ab.second, n_out))
                mass += wgt;
        avg += mass;
    }
    avg /= static_cast<double>(family.size());

    CorrectnessBound r;
    r.empirical = avg / disagree;
    r.analytic = std::ldexp(1.0, -n_out);
    r.pass = r.empirical <= r.analytic + 1e-12;
    return r;
}

}  // namespace veriloop
