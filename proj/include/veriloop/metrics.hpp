#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "veriloop/cq_state.hpp"
#include "veriloop/linalg.hpp"

namespace veriloop {

// Weights at or below this are treated as true zeros when counting support.
inline constexpr double kSupportThreshold = 1e-12;

// Trace distance between two cq states over identical registers. Both states
// are block-diagonal in the classical registers, so the distance decomposes
// exactly into a sum of per-assignment trace norms (1/2-inside convention,
// see trace_norm).
inline double trace_distance(const CqState& a, const CqState& b) {
    double d = 0;
    CqState::for_each_pair(a, b, [&](const ComplexMatrix* pa, const ComplexMatrix* pb) {
        if (pa && pb) d += trace_norm(*pa - *pb);
        else if (pa) d += trace_norm(*pa);
        else d += trace_norm(*pb);
    });
    return d;
}

// d(rho_{K rest}|rest): distance from the state to a uniform key tensored
// with the reduced state of everything else. Every non-key classical
// register counts as part of the conditioning side (public / Eve-held), as
// does the Eve system itself. The state may be sub-normalized; no
// renormalization is applied.
inline double secrecy_distance(const CqState& s, std::string_view key_register) {
    const int pos = s.register_index(key_register);
    const ClassicalRegister& key = s.registers()[static_cast<std::size_t>(pos)];
    if (key.has_abort()) {
        bool occupied = false;
        s.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix&) {
            if (idx[static_cast<std::size_t>(pos)] == key.abort_index()) occupied = true;
        });
        require(!occupied, errc::abort_symbol_present,
                "secrecy distance is undefined on abort terms of register '" +
                    std::string(key_register) + "'");
    }
    return trace_distance(s, s.ideal_state({std::string(key_register)}));
}

// Conditional min-entropy H_min(target | everything else), in bits, for
// states whose Eve blocks are diagonal in the declared basis (computational
// basis when none is given). Defined as
//
//     -log2( sum over side values of max over target of p(target, side) )
//
// where a side value is one joint assignment of all non-target registers
// together with one Eve basis index. Sub-normalized states are handled
// as-is (no renormalization); the zero state has infinite min-entropy.
inline double min_entropy(const CqState& s, std::string_view target_register,
                          const ComplexMatrix* diagonal_basis = nullptr) {
    const int tpos = s.register_index(target_register);
    const double tol = s.tolerances().validation;
    std::map<std::pair<std::vector<int>, int>, double> best;
    s.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix& block) {
        const ComplexMatrix rotated =
            diagonal_basis ? block.conjugated_by(*diagonal_basis) : block;
        require(rotated.offdiagonal_max() <= tol, errc::non_diagonal_eve,
                "Eve block is not diagonal in the declared basis");
        std::vector<int> side;
        side.reserve(idx.size() - 1);
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (static_cast<int>(i) != tpos) side.push_back(idx[i]);
        for (int e = 0; e < rotated.dim(); ++e) {
            const double p = rotated.at(e, e).real();
            double& slot = best[{side, e}];
            slot = std::max(slot, p);
        }
    });
    double guessing = 0;
    for (const auto& [key, p] : best) guessing += p;
    if (guessing <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log2(guessing);
}

// Max-entropy of a set of classical registers: log2 of the size of their
// joint support. An empty support yields 0 (with a note on stderr) rather
// than -infinity.
inline double max_entropy(const CqState& s, const std::vector<std::string>& registers) {
    std::vector<int> pos;
    for (const auto& name : registers) pos.push_back(s.register_index(name));
    std::map<std::vector<int>, double> weight;
    s.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix& block) {
        std::vector<int> proj;
        proj.reserve(pos.size());
        for (int p : pos) proj.push_back(idx[static_cast<std::size_t>(p)]);
        weight[proj] += block.trace_real();
    });
    std::uint64_t support = 0;
    for (const auto& [proj, w] : weight)
        if (w > kSupportThreshold) ++support;
    if (support == 0) {
        std::cerr << "veriloop: max_entropy of empty support, returning 0\n";
        return 0.0;
    }
    return std::log2(static_cast<double>(support));
}

}  // namespace veriloop
