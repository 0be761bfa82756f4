#pragma once

#include <stdexcept>
#include <string>

namespace veriloop {

// Error codes mirror the failure modes of the public API. Every throwing
// operation documents which codes it can raise.
enum class errc {
    alphabet_mismatch,
    non_hermitian_block,
    negative_block,
    trace_exceeds_one,
    unknown_register,
    unknown_value,
    shape_mismatch,
    abort_symbol_present,
    non_diagonal_eve,
    no_convergence,
    length_mismatch,
    family_too_large,
    equal_inputs,
    out_of_range,
    key_length_nonpositive,
    no_disagreement_mass,
    mixed_abort_term,
    cap_exceeded,
    unknown_check,
    invalid_argument,
};

inline const char* errc_name(errc c) noexcept {
    switch (c) {
        case errc::alphabet_mismatch: return "AlphabetMismatch";
        case errc::non_hermitian_block: return "NonHermitianBlock";
        case errc::negative_block: return "NegativeBlock";
        case errc::trace_exceeds_one: return "TraceExceedsOne";
        case errc::unknown_register: return "UnknownRegister";
        case errc::unknown_value: return "UnknownValue";
        case errc::shape_mismatch: return "ShapeMismatch";
        case errc::abort_symbol_present: return "AbortSymbolPresent";
        case errc::non_diagonal_eve: return "NonDiagonalEve";
        case errc::no_convergence: return "NoConvergence";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::family_too_large: return "FamilyTooLarge";
        case errc::equal_inputs: return "EqualInputs";
        case errc::out_of_range: return "OutOfRange";
        case errc::key_length_nonpositive: return "KeyLengthNonpositive";
        case errc::no_disagreement_mass: return "NoDisagreementMass";
        case errc::mixed_abort_term: return "MixedAbortTerm";
        case errc::cap_exceeded: return "CapExceeded";
        case errc::unknown_check: return "UnknownCheck";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, errc code, const std::string& msg) {
    if (!ok) fail(code, msg);
}

}  // namespace veriloop
