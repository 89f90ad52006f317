#ifndef SCWD_RNG_HPP
#define SCWD_RNG_HPP

#include <cstdint>

namespace scwd::rng {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so streams can be evaluated at any position in
// any order and parallel generation is reproducible by construction.
//
// word(seed, stream, counter) =
//   finalize(seed + 0x9E3779B97F4A7C15 * (counter + 1)
//                 + 0xD1B54A32D192ED03 * stream)
// where finalize is the SplitMix64 output permutation:
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27;  z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
inline std::uint64_t word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (counter + 1) +
                      0xD1B54A32D192ED03ull * stream;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Uniform draw in the open interval (0, 1): the top 53 bits, offset by half
// an ulp so neither endpoint can occur.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return (static_cast<double>(word(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF, rational approximation with maximum
// absolute error below 1.2e-9 over (0, 1).
double normal_inv_cdf(double p);

// Standard normal draw via inverse-CDF sampling (stream-position
// deterministic: exactly one word per draw).
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return normal_inv_cdf(uniform01(seed, stream, counter));
}

}  // namespace scwd::rng

#endif
