#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "veriloop/linalg.hpp"
#include "veriloop/registers.hpp"

namespace veriloop {

// One joint value of all classical registers, in register order.
using Assignment = std::vector<std::string>;

// Construction-time tolerances. The values checked against them are exact
// dyadic rationals in every construction of interest, so the defaults are
// tight.
struct StateTolerances {
    double validation = 1e-9;   // hermiticity / positivity / trace slack
    double arithmetic = 1e-12;  // equality slack in derived quantities
};

// A sub-normalized classical-quantum state: a map from assignments of the
// classical registers to Hermitian PSD blocks on the Eve system. Absent
// assignments mean zero blocks. The total trace is the probability of the
// event the state is conditioned on, hence <= 1.
//
// Values are immutable after construction; every operation returns a new
// state. Safe for concurrent reads.
class CqState {
public:
    CqState() = default;

    static CqState build(std::vector<ClassicalRegister> registers, int eve_dim,
                         const std::vector<std::pair<Assignment, ComplexMatrix>>& terms,
                         const StateTolerances& tol = {}) {
        CqState s;
        s.tol_ = tol;
        s.regs_ = std::move(registers);
        for (std::size_t i = 0; i < s.regs_.size(); ++i)
            for (std::size_t j = i + 1; j < s.regs_.size(); ++j)
                require(s.regs_[i].name() != s.regs_[j].name(), errc::invalid_argument,
                        "duplicate register name '" + s.regs_[i].name() + "'");
        require(eve_dim >= 1 && eve_dim <= kMaxEveDim, errc::cap_exceeded,
                "eve_dim must be in [1," + std::to_string(kMaxEveDim) + "]");
        s.eve_dim_ = eve_dim;
        s.strides_ = compute_strides(s.regs_);

        std::vector<int> idx(s.regs_.size());
        for (const auto& [assignment, block] : terms) {
            require(assignment.size() == s.regs_.size(), errc::alphabet_mismatch,
                    "assignment has " + std::to_string(assignment.size()) + " symbols, expected " +
                        std::to_string(s.regs_.size()));
            for (std::size_t r = 0; r < s.regs_.size(); ++r) {
                int k = s.regs_[r].index_of(assignment[r]);
                require(k >= 0, errc::alphabet_mismatch,
                        "symbol '" + assignment[r] + "' not in alphabet of register '" +
                            s.regs_[r].name() + "'");
                idx[r] = k;
            }
            require(block.dim() == eve_dim, errc::shape_mismatch,
                    "block dimension differs from eve_dim");
            s.accumulate(s.terms_, s.encode(idx), block);
        }

        double total = 0;
        for (const auto& [key, block] : s.terms_) {
            require(block.hermiticity_residual() <= tol.validation, errc::non_hermitian_block,
                    "block is not Hermitian within tolerance");
            require(min_eigenvalue(block) >= -tol.validation, errc::negative_block,
                    "block is not positive semidefinite within tolerance");
            total += block.trace_real();
        }
        require(total <= 1.0 + tol.validation, errc::trace_exceeds_one,
                "total trace " + std::to_string(total) + " exceeds 1");
        s.prune_zeros();
        return s;
    }

    const std::vector<ClassicalRegister>& registers() const noexcept { return regs_; }
    int eve_dim() const noexcept { return eve_dim_; }
    std::size_t term_count() const noexcept { return terms_.size(); }
    const StateTolerances& tolerances() const noexcept { return tol_; }

    double total_trace() const {
        double t = 0;
        for (const auto& [key, block] : terms_) t += block.trace_real();
        return t;
    }

    int register_index(std::string_view name) const {
        for (std::size_t i = 0; i < regs_.size(); ++i)
            if (regs_[i].name() == name) return static_cast<int>(i);
        fail(errc::unknown_register, "no register named '" + std::string(name) + "'");
    }

    bool has_register(std::string_view name) const {
        for (const auto& r : regs_)
            if (r.name() == name) return true;
        return false;
    }

    // Keeps only the terms with the given value and removes the register;
    // the returned total trace is the probability weight of that value.
    CqState condition(std::string_view reg, std::string_view value) const {
        const int pos = register_index(reg);
        const int want = regs_[static_cast<std::size_t>(pos)].index_of_or_throw(value);

        std::vector<ClassicalRegister> new_regs = regs_;
        new_regs.erase(new_regs.begin() + pos);
        CqState out = from_parts(std::move(new_regs), eve_dim_, tol_);
        std::vector<int> idx;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            if (idx[static_cast<std::size_t>(pos)] != want) continue;
            idx.erase(idx.begin() + pos);
            out.terms_.emplace(out.encode(idx), block);
        }
        return out;
    }

    // Sums terms over the dropped registers; total trace is preserved exactly.
    CqState marginalize(const std::vector<std::string>& regs_to_drop) const {
        std::vector<bool> drop(regs_.size(), false);
        for (const auto& name : regs_to_drop) {
            int pos = register_index(name);
            require(!drop[static_cast<std::size_t>(pos)], errc::invalid_argument,
                    "register '" + name + "' listed twice");
            drop[static_cast<std::size_t>(pos)] = true;
        }
        std::vector<ClassicalRegister> new_regs;
        for (std::size_t i = 0; i < regs_.size(); ++i)
            if (!drop[i]) new_regs.push_back(regs_[i]);

        CqState out = from_parts(std::move(new_regs), eve_dim_, tol_);
        std::vector<int> idx, kept;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            kept.clear();
            for (std::size_t i = 0; i < regs_.size(); ++i)
                if (!drop[i]) kept.push_back(idx[i]);
            accumulate(out.terms_, out.encode(kept), block);
        }
        out.prune_zeros();
        return out;
    }

    // Classical view: weight(assignment) = tr(block).
    std::map<Assignment, double> trace_out_eve() const {
        std::map<Assignment, double> w;
        std::vector<int> idx;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            w[symbols_of(idx)] += block.trace_real();
        }
        return w;
    }

    // Appends a register whose value is computed from each term's assignment.
    // Eve blocks are untouched, so the total trace is preserved exactly.
    CqState apply_classical_function(const ClassicalRegister& new_register,
                                     const std::function<std::string(const Assignment&)>& f) const {
        require(!has_register(new_register.name()), errc::invalid_argument,
                "register '" + new_register.name() + "' already present");
        std::vector<ClassicalRegister> new_regs = regs_;
        new_regs.push_back(new_register);
        CqState out = from_parts(std::move(new_regs), eve_dim_, tol_);
        std::vector<int> idx;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            const std::string sym = f(symbols_of(idx));
            int k = new_register.index_of(sym);
            require(k >= 0, errc::alphabet_mismatch,
                    "function output '" + sym + "' not in alphabet of register '" +
                        new_register.name() + "'");
            idx.push_back(k);
            out.terms_.emplace(out.encode(idx), block);
        }
        return out;
    }

    // The ideal state with respect to the given key registers: branch-wise per
    // assignment of the public (non-key) registers, the keys are replaced by a
    // uniform perfectly-correlated distribution tensored with the branch's
    // reduced Eve operator. Branches whose keys are the abort symbol are
    // returned unchanged (an aborted run leaks nothing, so it is already
    // ideal).
    CqState ideal_state(const std::vector<std::string>& key_registers,
                        std::string_view abort_symbol = kAbortSymbol) const {
        require(!key_registers.empty(), errc::invalid_argument, "key register list is empty");
        std::vector<int> key_pos;
        for (const auto& name : key_registers) key_pos.push_back(register_index(name));

        int width = -1;
        for (int pos : key_pos) {
            const ClassicalRegister& r = regs_[static_cast<std::size_t>(pos)];
            require(r.is_full_bit_register(), errc::shape_mismatch,
                    "key register '" + r.name() + "' must range over all bit-strings of one width");
            int w = r.bit_width();
            if (width < 0) width = w;
            require(width == w, errc::shape_mismatch, "key registers have different bit widths");
        }
        // alphabet index of each bit-string value, per key register
        std::vector<std::vector<int>> value_index(key_pos.size());
        for (std::size_t k = 0; k < key_pos.size(); ++k) {
            const ClassicalRegister& r = regs_[static_cast<std::size_t>(key_pos[k])];
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << width); ++v)
                value_index[k].push_back(r.index_of_or_throw(bits_to_string(v, width)));
        }

        CqState out = from_parts(regs_, eve_dim_, tol_);
        std::map<std::uint64_t, ComplexMatrix> branch_sum;  // keyed by public part
        std::vector<int> idx;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            int aborts = 0;
            for (int pos : key_pos) {
                const ClassicalRegister& r = regs_[static_cast<std::size_t>(pos)];
                if (r.symbol(idx[static_cast<std::size_t>(pos)]) == abort_symbol) ++aborts;
            }
            if (aborts == static_cast<int>(key_pos.size())) {
                out.terms_.emplace(key, block);  // abort branch is already ideal
                continue;
            }
            require(aborts == 0, errc::mixed_abort_term,
                    "term has the abort symbol in some but not all key registers");
            std::uint64_t public_key = key;
            for (int pos : key_pos)
                public_key -= static_cast<std::uint64_t>(idx[static_cast<std::size_t>(pos)]) *
                              strides_[static_cast<std::size_t>(pos)];
            accumulate(branch_sum, public_key, block);
        }

        const double scale = 1.0 / static_cast<double>(std::uint64_t{1} << width);
        for (const auto& [public_key, sum] : branch_sum) {
            const ComplexMatrix uniform = sum.scaled(scale);
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << width); ++v) {
                std::uint64_t key = public_key;
                for (std::size_t k = 0; k < key_pos.size(); ++k)
                    key += static_cast<std::uint64_t>(value_index[k][v]) *
                           strides_[static_cast<std::size_t>(key_pos[k])];
                accumulate(out.terms_, key, uniform);
            }
        }
        out.prune_zeros();
        return out;
    }

    // Rewrites each term's assignment under f (registers unchanged); terms
    // mapped to the same assignment are merged, so the trace is preserved.
    CqState map_assignments(const std::function<Assignment(const Assignment&)>& f) const {
        CqState out = from_parts(regs_, eve_dim_, tol_);
        std::vector<int> idx, new_idx(regs_.size());
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            const Assignment mapped = f(symbols_of(idx));
            require(mapped.size() == regs_.size(), errc::alphabet_mismatch,
                    "mapped assignment arity mismatch");
            for (std::size_t r = 0; r < regs_.size(); ++r) {
                int k = regs_[r].index_of(mapped[r]);
                require(k >= 0, errc::alphabet_mismatch,
                        "symbol '" + mapped[r] + "' not in alphabet of register '" +
                            regs_[r].name() + "'");
                new_idx[r] = k;
            }
            accumulate(out.terms_, out.encode(new_idx), block);
        }
        return out;
    }

    // Appends a symbol to one register's alphabet (no terms change).
    CqState extend_alphabet(std::string_view reg, std::string_view symbol) const {
        const int pos = register_index(reg);
        const ClassicalRegister& r = regs_[static_cast<std::size_t>(pos)];
        if (r.index_of(symbol) >= 0) return *this;
        std::vector<std::string> alphabet = r.alphabet();
        alphabet.emplace_back(symbol);
        std::vector<ClassicalRegister> new_regs = regs_;
        new_regs[static_cast<std::size_t>(pos)] = ClassicalRegister::make(r.name(), std::move(alphabet));
        CqState out = from_parts(std::move(new_regs), eve_dim_, tol_);
        std::vector<int> idx;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            out.terms_.emplace(out.encode(idx), block);
        }
        return out;
    }

    void for_each_term(const std::function<void(const std::vector<int>&, const ComplexMatrix&)>& fn) const {
        std::vector<int> idx;
        for (const auto& [key, block] : terms_) {
            decode(key, idx);
            fn(idx, block);
        }
    }

    Assignment symbols_of(const std::vector<int>& indices) const {
        Assignment a;
        a.reserve(regs_.size());
        for (std::size_t i = 0; i < regs_.size(); ++i)
            a.push_back(regs_[i].symbol(indices[i]));
        return a;
    }

    const ComplexMatrix* find_block(const Assignment& assignment) const {
        require(assignment.size() == regs_.size(), errc::alphabet_mismatch,
                "assignment arity mismatch");
        std::vector<int> idx(regs_.size());
        for (std::size_t r = 0; r < regs_.size(); ++r)
            idx[r] = regs_[r].index_of_or_throw(assignment[r]);
        auto it = terms_.find(encode(idx));
        return it == terms_.end() ? nullptr : &it->second;
    }

    bool same_shape(const CqState& o) const {
        return eve_dim_ == o.eve_dim_ && regs_ == o.regs_;
    }

    // Largest entrywise difference over the union of assignments; absent terms
    // count as all-zero blocks.
    double max_entrywise_difference(const CqState& o) const {
        require(same_shape(o), errc::shape_mismatch,
                "states have different registers or Eve dimension");
        double d = 0;
        auto it = terms_.begin();
        auto jt = o.terms_.begin();
        while (it != terms_.end() || jt != o.terms_.end()) {
            if (jt == o.terms_.end() || (it != terms_.end() && it->first < jt->first)) {
                d = std::max(d, it->second.max_abs());
                ++it;
            } else if (it == terms_.end() || jt->first < it->first) {
                d = std::max(d, jt->second.max_abs());
                ++jt;
            } else {
                d = std::max(d, it->second.max_entry_difference(jt->second));
                ++it;
                ++jt;
            }
        }
        return d;
    }

    // Walks the union of both term maps in assignment order.
    static void for_each_pair(const CqState& a, const CqState& b,
                              const std::function<void(const ComplexMatrix*, const ComplexMatrix*)>& fn) {
        require(a.same_shape(b), errc::shape_mismatch,
                "states have different registers or Eve dimension");
        auto it = a.terms_.begin();
        auto jt = b.terms_.begin();
        while (it != a.terms_.end() || jt != b.terms_.end()) {
            if (jt == b.terms_.end() || (it != a.terms_.end() && it->first < jt->first)) {
                fn(&it->second, nullptr);
                ++it;
            } else if (it == a.terms_.end() || jt->first < it->first) {
                fn(nullptr, &jt->second);
                ++jt;
            } else {
                fn(&it->second, &jt->second);
                ++it;
                ++jt;
            }
        }
    }

private:
    static std::vector<std::uint64_t> compute_strides(const std::vector<ClassicalRegister>& regs) {
        std::vector<std::uint64_t> strides(regs.size(), 1);
        std::uint64_t product = 1;
        for (std::size_t i = regs.size(); i-- > 0;) {
            strides[i] = product;
            std::uint64_t size = static_cast<std::uint64_t>(regs[i].size());
            require(product <= (std::uint64_t{1} << 62) / size, errc::cap_exceeded,
                    "joint alphabet too large to index");
            product *= size;
        }
        return strides;
    }

    static CqState from_parts(std::vector<ClassicalRegister> regs, int eve_dim,
                              const StateTolerances& tol) {
        CqState s;
        s.regs_ = std::move(regs);
        s.eve_dim_ = eve_dim;
        s.strides_ = compute_strides(s.regs_);
        s.tol_ = tol;
        return s;
    }

    std::uint64_t encode(const std::vector<int>& idx) const {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < strides_.size(); ++i)
            key += static_cast<std::uint64_t>(idx[i]) * strides_[i];
        return key;
    }

    void decode(std::uint64_t key, std::vector<int>& idx) const {
        idx.resize(regs_.size());
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            idx[i] = static_cast<int>((key / strides_[i]) %
                                      static_cast<std::uint64_t>(regs_[i].size()));
        }
    }

    static void accumulate(std::map<std::uint64_t, ComplexMatrix>& terms, std::uint64_t key,
                           const ComplexMatrix& block) {
        auto [it, inserted] = terms.try_emplace(key, block);
        if (!inserted) it->second += block;
    }

    // Exactly-zero blocks carry no information and are dropped; equality
    // comparisons treat absent and all-zero blocks identically.
    void prune_zeros() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second.max_abs() == 0.0) it = terms_.erase(it);
            else ++it;
        }
    }

    std::vector<ClassicalRegister> regs_;
    std::vector<std::uint64_t> strides_;
    int eve_dim_ = 0;
    std::map<std::uint64_t, ComplexMatrix> terms_;
    StateTolerances tol_;
};

}  // namespace veriloop
