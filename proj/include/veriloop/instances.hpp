#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "veriloop/cq_state.hpp"
#include "veriloop/rng.hpp"

namespace veriloop {

// Caps keeping every exhaustive suite desk-scale.
inline constexpr int kMaxInstanceBits = 8;
inline constexpr int kMaxInstanceEve = 16;

// A-B correlation profiles for randomized instances. adversarial_parity
// generalizes the loophole fixture: Bob's first reconciled bit is a fresh
// uniform bit z that Eve holds, the rest is a shifted copy of Alice's key,
// so the verification outcome correlates with the final key.
enum class Profile { independent, copied, noisy_copy, adversarial_parity };

inline const char* profile_name(Profile p) noexcept {
    switch (p) {
        case Profile::independent: return "independent";
        case Profile::copied: return "copied";
        case Profile::noisy_copy: return "noisy-copy";
        case Profile::adversarial_parity: return "adversarial-parity";
    }
    return "?";
}

inline Profile profile_from_name(std::string_view name) {
    if (name == "independent") return Profile::independent;
    if (name == "copied") return Profile::copied;
    if (name == "noisy-copy") return Profile::noisy_copy;
    if (name == "adversarial-parity") return Profile::adversarial_parity;
    fail(errc::invalid_argument, "unknown profile '" + std::string(name) + "'");
}

// Everything needed to regenerate one instance bit-for-bit.
struct InstanceSpec {
    int n_bits_a = 2;
    int n_bits_b = 2;
    int eve_alphabet = 2;
    Profile profile = Profile::independent;
    double noise = 0.0;  // flip probability for noisy-copy
    std::uint64_t master_seed = 1;
    std::uint64_t instance_index = 0;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["n_bits_a"] = n_bits_a;
        j["n_bits_b"] = n_bits_b;
        j["eve_alphabet"] = eve_alphabet;
        j["profile"] = profile_name(profile);
        j["noise"] = noise;
        j["master_seed"] = master_seed;
        j["instance_index"] = instance_index;
        return j;
    }
};

namespace detail {

inline constexpr std::uint64_t kInstanceSalt = 0x696e7374ull;  // "inst"
inline constexpr std::uint64_t kPipelineSalt = 0x70697065ull;  // "pipe"

// random point on the simplex over n outcomes (normalized exponentials)
inline std::vector<double> random_simplex(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    double total = 0;
    for (double& x : w) {
        x = -std::log(1.0 - rng.uniform());
        total += x;
    }
    for (double& x : w) x /= total;
    return w;
}

}  // namespace detail

// Generates the sub-normalized classical cq state described by the spec.
// Deterministic in (master_seed, instance_index); Eve blocks are diagonal
// (classical Eve) in every profile.
inline CqState random_instance(const InstanceSpec& spec) {
    require(spec.n_bits_a >= 1 && spec.n_bits_a <= kMaxInstanceBits && spec.n_bits_b >= 1 &&
                spec.n_bits_b <= kMaxInstanceBits,
            errc::cap_exceeded, "key length outside [1," + std::to_string(kMaxInstanceBits) + "]");
    require(spec.eve_alphabet >= 1 && spec.eve_alphabet <= kMaxInstanceEve, errc::cap_exceeded,
            "eve_alphabet outside [1," + std::to_string(kMaxInstanceEve) + "]");
    require(spec.noise >= 0.0 && spec.noise <= 1.0, errc::invalid_argument,
            "noise must be in [0,1]");

    Rng rng(spec.master_seed, spec.instance_index, detail::kInstanceSalt);
    // sub-normalization: condition on a public continue-event of weight s
    const double s = rng.bernoulli(0.5) ? 1.0 : rng.uniform(0.5, 1.0);

    const int na = spec.n_bits_a;
    const int nb = spec.n_bits_b;
    const int eve = spec.eve_alphabet;
    std::vector<ClassicalRegister> regs = {ClassicalRegister::bits("A", na),
                                           ClassicalRegister::bits("B", nb)};
    std::vector<std::pair<Assignment, ComplexMatrix>> terms;

    auto emit = [&](std::uint64_t a, std::uint64_t b, double w, Rng& r) {
        const std::vector<double> e = detail::random_simplex(r, static_cast<std::size_t>(eve));
        ComplexMatrix block(eve);
        for (int k = 0; k < eve; ++k) block.at(k, k) = w * e[static_cast<std::size_t>(k)];
        terms.push_back({{bits_to_string(a, na), bits_to_string(b, nb)}, block});
    };

    switch (spec.profile) {
        case Profile::independent: {
            const auto pa = detail::random_simplex(rng, std::size_t{1} << na);
            const auto pb = detail::random_simplex(rng, std::size_t{1} << nb);
            for (std::uint64_t a = 0; a < (std::uint64_t{1} << na); ++a)
                for (std::uint64_t b = 0; b < (std::uint64_t{1} << nb); ++b)
                    emit(a, b, s * pa[a] * pb[b], rng);
            break;
        }
        case Profile::copied:
        case Profile::noisy_copy: {
            require(na == nb, errc::invalid_argument,
                    "copied/noisy-copy profiles need n_bits_a == n_bits_b");
            const double p = spec.profile == Profile::copied ? 0.0 : spec.noise;
            const auto pa = detail::random_simplex(rng, std::size_t{1} << na);
            for (std::uint64_t a = 0; a < (std::uint64_t{1} << na); ++a)
                for (std::uint64_t b = 0; b < (std::uint64_t{1} << nb); ++b) {
                    const int d = std::popcount(a ^ b);
                    const double flip = std::pow(p, d) * std::pow(1.0 - p, na - d);
                    const double w = s * pa[a] * flip;
                    if (w == 0.0) continue;  // keeps copied == noisy-copy(0) draw-for-draw
                    emit(a, b, w, rng);
                }
            break;
        }
        case Profile::adversarial_parity: {
            require(na == nb && na >= 2, errc::cap_exceeded,
                    "adversarial-parity needs n_bits_a == n_bits_b >= 2");
            require(eve >= 2, errc::cap_exceeded, "adversarial-parity needs eve_alphabet >= 2");
            const std::uint64_t beta1 = rng.next() & 1;  // relabels Bob's first bit
            const std::uint64_t gamma = rng.next() & 1;  // relabels Eve's copy of z
            const double w = s / static_cast<double>(std::uint64_t{1} << (na + 1));
            for (std::uint64_t a = 0; a < (std::uint64_t{1} << na); ++a)
                for (std::uint64_t z = 0; z < 2; ++z) {
                    const std::uint64_t b = ((z ^ beta1) << (nb - 1)) | (a >> 1);
                    ComplexMatrix block(eve);
                    block.at(static_cast<int>(z ^ gamma), static_cast<int>(z ^ gamma)) = w;
                    terms.push_back({{bits_to_string(a, na), bits_to_string(b, nb)}, block});
                }
            break;
        }
    }
    return CqState::build(std::move(regs), eve, terms);
}

}  // namespace veriloop
