#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "veriloop/bits.hpp"
#include "veriloop/errors.hpp"

namespace veriloop {

// Exhaustive family enumeration is capped at 2^20 members.
inline constexpr int kFamilySeedBitsCap = 20;

// Raw Toeplitz evaluation over bit-string values. With input position i and
// output position j counted from the most significant bit, the matrix is
//
//     T[j][i] = seed bit (j - i + n_in - 1)
//
// where seed bit k is bit k of the seed value (k = 0 is the rightmost
// character of the seed bit-string). This collapses to a shifted-mask parity:
// output position j equals parity((seed >> j) & input_value).
inline std::uint64_t toeplitz_apply_raw(std::uint64_t seed, std::uint64_t in, int n_out) noexcept {
    std::uint64_t out = 0;
    for (int j = 0; j < n_out; ++j)
        out |= static_cast<std::uint64_t>(parity64((seed >> j) & in)) << (n_out - 1 - j);
    return out;
}

// One member of the universal_2 Toeplitz hash family over GF(2): n_in input
// bits, n_out output bits, selected by n_in + n_out - 1 seed bits. Linear:
// apply(x xor y) = apply(x) xor apply(y).
struct ToeplitzHash {
    int n_in = 1;
    int n_out = 1;
    std::uint64_t seed = 0;

    static ToeplitzHash make(int n_in, int n_out, std::uint64_t seed) {
        require(n_in >= 1 && n_in <= 40, errc::out_of_range, "n_in must be in [1,40]");
        require(n_out >= 1 && n_out <= n_in, errc::out_of_range,
                "n_out must satisfy 1 <= n_out <= n_in");
        const int len = n_in + n_out - 1;
        require(seed < (std::uint64_t{1} << len), errc::out_of_range,
                "seed does not fit in " + std::to_string(len) + " bits");
        return ToeplitzHash{n_in, n_out, seed};
    }

    static ToeplitzHash from_hex(int n_in, int n_out, std::string_view hex) {
        return make(n_in, n_out, bits_from_hex(hex, n_in + n_out - 1));
    }

    int seed_bit_length() const noexcept { return n_in + n_out - 1; }

    std::uint64_t apply_value(std::uint64_t in) const {
        require(in < (std::uint64_t{1} << n_in), errc::length_mismatch,
                "input value does not fit in n_in bits");
        return toeplitz_apply_raw(seed, in, n_out);
    }

    std::string apply(std::string_view input_bits) const {
        require(static_cast<int>(input_bits.size()) == n_in, errc::length_mismatch,
                "input has " + std::to_string(input_bits.size()) + " bits, hash expects " +
                    std::to_string(n_in));
        return bits_to_string(apply_value(bits_from_string(input_bits)), n_out);
    }

    std::string seed_bit_string() const { return bits_to_string(seed, seed_bit_length()); }
    std::string seed_hex() const { return bits_to_hex(seed, seed_bit_length()); }
};

// The full family for fixed (n_in, n_out): all 2^(n_in+n_out-1) seeds with
// uniform weight.
class ToeplitzFamily {
public:
    ToeplitzFamily(int n_in, int n_out) : n_in_(n_in), n_out_(n_out) {
        require(n_in >= 1 && n_out >= 1 && n_out <= n_in, errc::out_of_range,
                "n_out must satisfy 1 <= n_out <= n_in");
        require(n_in + n_out - 1 <= kFamilySeedBitsCap, errc::family_too_large,
                "family has 2^" + std::to_string(n_in + n_out - 1) +
                    " members, cap is 2^" + std::to_string(kFamilySeedBitsCap));
    }

    int n_in() const noexcept { return n_in_; }
    int n_out() const noexcept { return n_out_; }
    std::uint64_t size() const noexcept { return std::uint64_t{1} << (n_in_ + n_out_ - 1); }
    ToeplitzHash member(std::uint64_t i) const { return ToeplitzHash::make(n_in_, n_out_, i); }

    class iterator {
    public:
        iterator(const ToeplitzFamily* f, std::uint64_t i) : f_(f), i_(i) {}
        ToeplitzHash operator*() const { return f_->member(i_); }
        iterator& operator++() {
            ++i_;
            return *this;
        }
        bool operator!=(const iterator& o) const { return i_ != o.i_; }

    private:
        const ToeplitzFamily* f_;
        std::uint64_t i_;
    };

    iterator begin() const { return iterator(this, 0); }
    iterator end() const { return iterator(this, size()); }

private:
    int n_in_;
    int n_out_;
};

inline ToeplitzFamily enumerate_family(int n_in, int n_out) { return ToeplitzFamily(n_in, n_out); }

// Exact fraction of family members mapping two distinct inputs to the same
// output. For the Toeplitz family this equals 2^-n_out for every a != b.
inline double collision_fraction(int n_in, int n_out, std::string_view a, std::string_view b) {
    require(static_cast<int>(a.size()) == n_in && static_cast<int>(b.size()) == n_in,
            errc::length_mismatch, "inputs must be n_in bits long");
    require(a != b, errc::equal_inputs, "collision fraction needs distinct inputs");
    const ToeplitzFamily family(n_in, n_out);
    const std::uint64_t va = bits_from_string(a);
    const std::uint64_t vb = bits_from_string(b);
    std::uint64_t collisions = 0;
    for (std::uint64_t s = 0; s < family.size(); ++s)
        if (toeplitz_apply_raw(s, va, n_out) == toeplitz_apply_raw(s, vb, n_out)) ++collisions;
    return static_cast<double>(collisions) / static_cast<double>(family.size());
}

// Smallest tag length t with 2^-t <= eps_cor, i.e. ceil(log2(1/eps_cor)).
// Computed by exact halving so dyadic eps_cor values land exactly.
inline int tag_length(double eps_cor) {
    require(eps_cor > 0.0 && eps_cor < 1.0, errc::out_of_range, "eps_cor must be in (0,1)");
    int t = 0;
    double p = 1.0;
    while (p > eps_cor) {
        p *= 0.5;
        ++t;
        require(t <= 1100, errc::out_of_range, "eps_cor too small");
    }
    return t;
}

}  // namespace veriloop
