#pragma once

#include <cstdint>
#include <vector>

namespace psiwin::singular {

/// Largest table the bulk evaluators will allocate (about 1.2 GB with the s(k) table).
inline constexpr std::uint64_t kMaxTableLimit = 100'000'000;

/// Smallest-prime-factor table for 2 <= n <= limit.
class SpfTable {
public:
    explicit SpfTable(std::uint64_t limit);

    [[nodiscard]] std::uint64_t limit() const { return limit_; }
    [[nodiscard]] std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }

    /// s(k) for 0 <= k <= limit (entry 0 unused), built multiplicatively.
    [[nodiscard]] std::vector<double> s_values() const;

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
};

/// s(k) = ∏_{p | k, p > 2} (p-1)/(p-2), by trial division. DomainError for k = 0.
double s_of_k(std::uint64_t k);
double s_of_k(std::uint64_t k, const SpfTable& table);

/// s(0..k_max) through a temporary SpfTable.
std::vector<double> s_table(std::uint64_t k_max);

/// Hardy–Littlewood 𝔖(k): 0 for odd k, c · s(k) for even k.
double singular_series(std::uint64_t k);

/// Σ_{k<=h} (h-k) 𝔖(k) against ½h² - ½h log h + A h.
struct SingularSum {
    std::uint64_t h = 0;
    double value = 0.0;
    double prediction = 0.0;
    double residual = 0.0;
};

/// h >= 2; ResourceError when h exceeds kMaxTableLimit.
SingularSum cesaro_sum(std::uint64_t h);
SingularSum cesaro_sum(std::uint64_t h, const std::vector<double>& s_values);

/// Σ_{k<=K} (K-k) s(k) against K²/c - K log K/(2c) + (K/2c)(1 - C0 - log 4π).
struct InnerCesaro {
    std::uint64_t K = 0;
    double value = 0.0;
    double prediction = 0.0;
    double residual = 0.0;
};

InnerCesaro inner_cesaro(std::uint64_t K);
InnerCesaro inner_cesaro(std::uint64_t K, const std::vector<double>& s_values);

/// (cesaro_sum(h).value, 2c · inner_cesaro(h/2).value); h even, h >= 2.
struct ReductionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};
ReductionCheck reduction_identity_check(std::uint64_t h);

/// (1/h) Σ_{k<=h} 𝔖(k).
double singular_mean(std::uint64_t h);

}  // namespace psiwin::singular
