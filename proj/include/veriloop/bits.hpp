#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "veriloop/errors.hpp"

namespace veriloop {

// Bit-strings are rendered most-significant-bit-first: the string "10" has
// value 2. This convention is fixed project-wide so hash values and register
// symbols are bit-exact across platforms.

inline int parity64(std::uint64_t x) noexcept { return std::popcount(x) & 1; }

inline std::string bits_to_string(std::uint64_t value, int width) {
    require(width >= 0 && width <= 63, errc::out_of_range, "bit width must be in [0,63]");
    std::string s(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i)
        if ((value >> (width - 1 - i)) & 1u) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

inline std::uint64_t bits_from_string(std::string_view s) {
    require(s.size() <= 63, errc::out_of_range, "bit-string longer than 63 bits");
    std::uint64_t v = 0;
    for (char c : s) {
        require(c == '0' || c == '1', errc::invalid_argument,
                "bit-string must contain only 0/1, got '" + std::string(s) + "'");
        v = (v << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

inline bool is_bit_string(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c != '0' && c != '1') return false;
    return true;
}

// Hex rendering of a bit-string of known length, most-significant bit first.
// A length-5 string "10110" renders as "16" (0b10110 = 0x16).
inline std::string bits_to_hex(std::uint64_t value, int bit_len) {
    require(bit_len >= 1 && bit_len <= 63, errc::out_of_range, "bit length must be in [1,63]");
    require(bit_len == 63 || value < (std::uint64_t{1} << bit_len), errc::out_of_range,
            "value does not fit in the declared bit length");
    int digits = (bit_len + 3) / 4;
    static const char* hexdig = "0123456789abcdef";
    std::string s(static_cast<std::size_t>(digits), '0');
    for (int i = 0; i < digits; ++i)
        s[static_cast<std::size_t>(digits - 1 - i)] = hexdig[(value >> (4 * i)) & 0xf];
    return s;
}

inline std::uint64_t bits_from_hex(std::string_view hex, int bit_len) {
    require(bit_len >= 1 && bit_len <= 63, errc::out_of_range, "bit length must be in [1,63]");
    require(!hex.empty() && hex.size() <= 16, errc::invalid_argument, "bad hex seed length");
    std::uint64_t v = 0;
    for (char c : hex) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else {
            fail(errc::invalid_argument, "bad hex digit in seed");
        }
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    require(bit_len == 63 || v < (std::uint64_t{1} << bit_len), errc::out_of_range,
            "hex seed exceeds the declared bit length");
    return v;
}

}  // namespace veriloop
