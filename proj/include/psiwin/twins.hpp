#pragma once

#include <cstdint>
#include <vector>

#include "psiwin/sieve.hpp"

namespace psiwin::twins {

/// Σ_{n<=X} Λ(n)Λ(n+k) next to its Hardy–Littlewood prediction 𝔖(k) X.
struct TwinCorrelation {
    std::uint64_t x = 0;
    std::uint64_t k = 0;
    double raw = 0.0;
    double expected = 0.0;
    double error = 0.0;  // E(X, k) = raw - expected
};

struct PairSumOptions {
    std::uint64_t segment_size = kDefaultSegmentSize;
    unsigned workers = 1;
};

/// Σ_{n=1}^{X} Λ(n)Λ(n+k) for every k in [k_lo, k_hi], from one pass over the
/// Λ segments. Entry i of the result belongs to k = k_lo + i. Each sum is exact
/// over the rounded products, so results do not depend on segmentation or workers.
std::vector<double> lambda_pair_sums(std::uint64_t x, std::uint64_t k_lo, std::uint64_t k_hi,
                                     const PairSumOptions& options = {});

/// Single-offset form; X >= 1, k >= 1.
double lambda_pair_sum(std::uint64_t x, std::uint64_t k);

TwinCorrelation twin_error(std::uint64_t x, std::uint64_t k);

/// twin_error for k = 1 .. k_max from a single pass.
std::vector<TwinCorrelation> twin_errors(std::uint64_t x, std::uint64_t k_max,
                                         const PairSumOptions& options = {});

/// Work budget for weighted_error_sum, in units of X·h.
inline constexpr double kDefaultWorkBudget = 1e12;

struct WeightedErrorSum {
    std::uint64_t x = 0;
    std::uint64_t h = 0;
    double value = 0.0;           // 2 Σ_{k<=h} (h-k) E(X,k)
    double absolute = 0.0;        // 2 Σ_{k<=h} (h-k) |E(X,k)|
    double ratio_cancelling = 0.0;  // value / (h^{3/2} X^{1/2})
    double ratio_trivial = 0.0;     // value / (h^2 X^{1/2})
};

/// ResourceError when X·h exceeds `budget`.
WeightedErrorSum weighted_error_sum(std::uint64_t x, std::uint64_t h,
                                    double budget = kDefaultWorkBudget,
                                    const PairSumOptions& options = {});

/// Σ_{n<=X} Λ(n)^2.
double lambda_square_sum(std::uint64_t x);

/// X log X - X, the main term of lambda_square_sum.
double lambda_square_main_term(std::uint64_t x);

}  // namespace psiwin::twins
