#pragma once

#include <cstdint>

namespace psiwin::gaussian {

/// A deviation measured in standard deviations, with the number of
/// effectively independent samples it is compared against.
struct NormalTailQuery {
    double t = 0.0;
    std::uint64_t n = 1;
    double sigma = 1.0;

    void validate() const;  // throws ConfigError
};

/// Standard normal CDF Φ(t).
double phi(double t);

/// Upper tail Q(t) = 1 - Φ(t), accurate in the far tail.
double phi_upper(double t);

/// Φ^{-1}(p) for 0 < p < 1; DomainError otherwise.
double phi_inv(double p);

/// The t with Q(t) = q, for 0 < q < 1. Use this instead of phi_inv(1 - q)
/// when q is tiny.
double phi_inv_upper(double q);

/// Probability that the largest of n independent standard normals exceeds t:
/// 1 - Φ(t)^n, evaluated as -expm1(n log Φ(t)).
double max_exceed_prob(double t, std::uint64_t n);

/// The T with Φ(T/sigma)^n = 1/2.
double median_max(std::uint64_t n, double sigma);

/// x · P(|G| > threshold) for G ~ N(0, sigma^2): the expected measure of
/// {x in [0, X) : |G(x)| > threshold}.
double expected_exceedance(std::uint64_t x, double sigma, double threshold);

/// Normalized Gaussian moment: 0 for odd k, (k-1)!! for even k.
double normal_moment(int k);

}  // namespace psiwin::gaussian
