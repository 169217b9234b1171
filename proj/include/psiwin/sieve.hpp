#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace psiwin {

/// Largest argument for which Λ(n) is supported; n indexes a double exactly below this.
inline constexpr std::uint64_t kMaxSieveValue = std::uint64_t{1} << 53;

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 22;

/// All primes <= limit, with their natural logs precomputed.
struct BasePrimes {
    std::uint64_t limit = 0;
    std::vector<std::uint32_t> primes;
    std::vector<double> logs;  // logs[i] == std::log(primes[i])

    /// True when every composite below `hi` has a prime factor in `primes`.
    [[nodiscard]] bool covers(std::uint64_t hi) const;
};

/// Λ(n) for n in [lo, hi).
struct LambdaSegment {
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;
    std::vector<double> values;

    [[nodiscard]] double at(std::uint64_t n) const { return values[n - lo]; }
    [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// Throws ConfigError unless 2 <= limit <= 2^32.
BasePrimes base_primes(std::uint64_t limit);

/// Base primes sufficient to sieve every n < hi.
BasePrimes base_primes_for(std::uint64_t hi);

/// Segmented sieve for Λ on [lo, hi). Requires 1 <= lo < hi <= 2^53 and base.covers(hi).
LambdaSegment lambda_segment(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base);

/// Fills `out` (length hi - lo) in place; the allocation-free form of lambda_segment.
void fill_lambda(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base, std::span<double> out);

/// Chebyshev ψ(x) = Σ_{n<=x} Λ(n). The sum is carried out exactly and rounded once.
double psi(std::uint64_t x, const BasePrimes& base,
           std::uint64_t segment_size = kDefaultSegmentSize);

/// Λ(n) as an exact integer multiple of 2^-53. Every nonzero Λ is >= log 2 > 1/2,
/// so the scaling is lossless.
inline std::int64_t lambda_to_fixed(double v) {
    return static_cast<std::int64_t>(v * 9007199254740992.0);
}

inline constexpr double kFixedUnit = 1.0 / 9007199254740992.0;

}  // namespace psiwin
