#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "veriloop/bits.hpp"
#include "veriloop/errors.hpp"

namespace veriloop {

// The distinguished abort symbol. It is a reserved symbol per register, kept
// disjoint from all bit-string values, so keys and abort outcomes can never
// collide.
inline constexpr std::string_view kAbortSymbol = "⊥";  // ⊥

// A named classical register with a finite ordered alphabet. Symbols are
// either bit-strings of a fixed length or symbolic values; the abort symbol
// may appear at most once.
class ClassicalRegister {
public:
    ClassicalRegister() = default;

    static ClassicalRegister make(std::string name, std::vector<std::string> alphabet) {
        require(!name.empty(), errc::invalid_argument, "register name must be non-empty");
        require(!alphabet.empty(), errc::invalid_argument,
                "register '" + name + "' needs a non-empty alphabet");
        ClassicalRegister r;
        r.name_ = std::move(name);
        r.alphabet_ = std::move(alphabet);
        int aborts = 0;
        for (std::size_t i = 0; i < r.alphabet_.size(); ++i) {
            const std::string& sym = r.alphabet_[i];
            auto [it, inserted] = r.index_.emplace(sym, static_cast<int>(i));
            require(inserted, errc::invalid_argument,
                    "register '" + r.name_ + "' has duplicate symbol '" + sym + "'");
            if (sym == kAbortSymbol) {
                ++aborts;
                r.abort_index_ = static_cast<int>(i);
            }
        }
        require(aborts <= 1, errc::invalid_argument,
                "register '" + r.name_ + "' lists the abort symbol more than once");
        return r;
    }

    // Register over all n-bit strings (canonical order 00..0, 00..1, ...),
    // optionally extended with the abort symbol at the end.
    static ClassicalRegister bits(std::string name, int n_bits, bool with_abort = false) {
        require(n_bits >= 1 && n_bits <= 20, errc::cap_exceeded,
                "bit register width must be in [1,20]");
        std::vector<std::string> alphabet;
        alphabet.reserve((std::size_t{1} << n_bits) + (with_abort ? 1 : 0));
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << n_bits); ++v)
            alphabet.push_back(bits_to_string(v, n_bits));
        if (with_abort) alphabet.emplace_back(kAbortSymbol);
        return make(std::move(name), std::move(alphabet));
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    int size() const noexcept { return static_cast<int>(alphabet_.size()); }

    bool has_abort() const noexcept { return abort_index_ >= 0; }
    int abort_index() const noexcept { return abort_index_; }

    // -1 if the symbol is not in the alphabet.
    int index_of(std::string_view symbol) const {
        auto it = index_.find(std::string(symbol));
        return it == index_.end() ? -1 : it->second;
    }

    int index_of_or_throw(std::string_view symbol) const {
        int i = index_of(symbol);
        if (i < 0)
            fail(errc::unknown_value,
                 "symbol '" + std::string(symbol) + "' not in alphabet of register '" + name_ + "'");
        return i;
    }

    const std::string& symbol(int index) const { return alphabet_.at(static_cast<std::size_t>(index)); }

    // Common width of the non-abort symbols if they are all bit-strings of
    // equal length; -1 otherwise.
    int bit_width() const {
        int w = -1;
        for (std::size_t i = 0; i < alphabet_.size(); ++i) {
            if (static_cast<int>(i) == abort_index_) continue;
            const std::string& s = alphabet_[i];
            if (!is_bit_string(s)) return -1;
            if (w < 0) w = static_cast<int>(s.size());
            else if (w != static_cast<int>(s.size())) return -1;
        }
        return w;
    }

    // True when the non-abort part of the alphabet is exactly {0,1}^w in
    // canonical order (as produced by bits()).
    bool is_full_bit_register() const {
        int w = bit_width();
        if (w < 0 || w > 20) return false;
        std::uint64_t expect = std::uint64_t{1} << w;
        std::uint64_t seen = 0;
        for (std::size_t i = 0; i < alphabet_.size(); ++i) {
            if (static_cast<int>(i) == abort_index_) continue;
            if (bits_from_string(alphabet_[i]) != seen) return false;
            ++seen;
        }
        return seen == expect;
    }

    bool operator==(const ClassicalRegister& o) const {
        return name_ == o.name_ && alphabet_ == o.alphabet_;
    }

private:
    std::string name_;
    std::vector<std::string> alphabet_;
    std::unordered_map<std::string, int> index_;
    int abort_index_ = -1;
};

}  // namespace veriloop
