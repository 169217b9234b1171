#pragma once

// Slow, obviously-correct reference implementations for the tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "psiwin/exact_sum.hpp"

namespace oracle {

// Λ(n) by trial division.
inline double lambda(std::uint64_t n) {
    if (n < 2) return 0.0;
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0) return std::log(static_cast<double>(n));
    while (n % p == 0) n /= p;
    return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

inline std::vector<double> lambda_table(std::uint64_t n_max) {
    std::vector<double> t(n_max + 1);
    for (std::uint64_t n = 0; n <= n_max; ++n) t[n] = lambda(n);
    return t;
}

// D(n) = Σ_{m=n+1}^{n+h} Λ(m) - h, each window summed from scratch.
inline std::vector<double> window_deviations(std::uint64_t x, std::uint64_t h) {
    const auto lam = lambda_table(x + h);
    std::vector<double> d(x);
    for (std::uint64_t n = 0; n < x; ++n) {
        long double s = 0;
        for (std::uint64_t m = n + 1; m <= n + h; ++m) s += lam[m];
        d[n] = static_cast<double>(s - static_cast<long double>(h));
    }
    return d;
}

// (1/X) Σ D^k in long double.
inline std::vector<long double> raw_moments(const std::vector<double>& d, int k_max) {
    std::vector<long double> mu(static_cast<std::size_t>(k_max) + 1, 0.0L);
    for (double v : d) {
        long double p = 1.0L;
        for (int k = 0; k <= k_max; ++k) {
            mu[static_cast<std::size_t>(k)] += p;
            p *= v;
        }
    }
    for (auto& m : mu) m /= static_cast<long double>(d.size());
    return mu;
}

// Σ_{n=1}^{X} Λ(n)Λ(n+k) by a double loop; the rounded products are summed
// exactly, so the result is the correctly rounded sum.
inline double pair_sum(std::uint64_t x, std::uint64_t k) {
    psiwin::ExactSum s;
    for (std::uint64_t n = 1; n <= x; ++n) s += lambda(n) * lambda(n + k);
    return s.value();
}

// s(k) by factoring.
inline double s_of_k(std::uint64_t k) {
    double s = 1.0;
    while (k % 2 == 0) k /= 2;
    for (std::uint64_t p = 3; p * p <= k; p += 2) {
        if (k % p) continue;
        s *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
        while (k % p == 0) k /= p;
    }
    if (k > 1) s *= static_cast<double>(k - 1) / static_cast<double>(k - 2);
    return s;
}

// Upper normal tail in long double: series for erfc at small argument,
// Lentz continued fraction for larger.
inline long double normal_upper(long double t) {
    if (t < 0) return 1.0L - normal_upper(-t);
    const long double x = t / std::sqrt(2.0L);
    const long double pi = 3.141592653589793238462643383279502884L;
    if (x < 1.5L) {
        // erf(x) = 2/sqrt(pi) Σ (-1)^n x^{2n+1} / (n! (2n+1))
        long double term = x, sum = x;
        for (int n = 1; n < 200; ++n) {
            term *= -x * x / n;
            sum += term / (2 * n + 1);
        }
        return 0.5L * (1.0L - 2.0L / std::sqrt(pi) * sum);
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const long double tiny = 1e-300L;
    long double f = x, c = x, d = 0.0L;
    for (int n = 1; n < 500; ++n) {
        const long double a = n / 2.0L;
        d = x + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-19L) break;
    }
    return 0.5L * std::exp(-x * x) / (std::sqrt(pi) * f);
}

}  // namespace oracle
