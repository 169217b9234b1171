#include "psiwin/constants.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "psiwin/errors.hpp"
#include "psiwin/exact_sum.hpp"
#include "psiwin/sieve.hpp"
#include "psiwin/singular.hpp"

namespace psiwin::constants {

namespace {

std::shared_ptr<const BasePrimes> primes_upto(std::uint64_t limit) {
    static std::mutex mutex;
    static std::map<std::uint64_t, std::shared_ptr<const BasePrimes>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[limit];
    if (!slot) slot = std::make_shared<const BasePrimes>(base_primes(limit));
    return slot;
}

// Sum of log(factor(p)) over odd primes p <= limit.
template <class LogFactor>
double odd_prime_log_sum(const BasePrimes& primes, LogFactor&& log_factor) {
    ExactSum acc;
    for (std::size_t i = 1; i < primes.primes.size(); ++i) acc.add(log_factor(primes.primes[i]));
    return acc.value();
}

// Σ_{p<=limit} p^{-s}, all primes
double prime_power_sum(const BasePrimes& primes, double s) {
    ExactSum acc;
    for (auto p : primes.primes) acc.add(std::pow(static_cast<double>(p), -s));
    return acc.value();
}

int moebius(int n) {
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return 0;
        result = -result;
    }
    if (n > 1) result = -result;
    return result;
}

void check_limit(std::uint64_t prime_limit, const char* who) {
    if (prime_limit < 5) {
        throw ConfigError(std::string(who) + ": prime_limit must be at least 5");
    }
}

}  // namespace

EulerProduct twin_constant(std::uint64_t prime_limit, double max_log_error) {
    if (prime_limit < 10'000) {
        throw ConfigError("twin_constant: prime_limit must be >= 10^4, got " +
                          std::to_string(prime_limit));
    }
    const auto L = static_cast<double>(prime_limit);
    const double bound = 2.0 * (1.0 / L + 1.0 / (L * L));
    if (bound > max_log_error) {
        throw AccuracyError("twin_constant: truncation at " + std::to_string(prime_limit) +
                            " only certifies log error " + std::to_string(bound));
    }
    const auto primes = primes_upto(prime_limit);
    const double log_sum = odd_prime_log_sum(*primes, [](std::uint32_t p) {
        const double q = static_cast<double>(p) - 1.0;
        return std::log1p(-1.0 / (q * q));
    });
    return {2.0 * std::exp(log_sum), bound, prime_limit};
}

double twin_constant_refined(std::uint64_t prime_limit) {
    if (prime_limit < 10'000) {
        throw ConfigError("twin_constant_refined: prime_limit must be >= 10^4");
    }
    const auto primes = primes_upto(prime_limit);
    ExactSum log_sum;
    log_sum.add(odd_prime_log_sum(*primes, [](std::uint32_t p) {
        const double q = static_cast<double>(p) - 1.0;
        return std::log1p(-1.0 / (q * q));
    }));
    // -log(1 - 1/(p-1)^2) = p^-2 + 2 p^-3 + 3.5 p^-4 + O(p^-5)
    constexpr std::array<double, 3> coeff{1.0, 2.0, 3.5};
    for (int j = 2; j <= 4; ++j) {
        const double tail = prime_zeta(j) - prime_power_sum(*primes, j);
        log_sum.add(-coeff[j - 2] * tail);
    }
    return 2.0 * std::exp(log_sum.value());
}

double twin_constant_cached() {
    static const double c = twin_constant_refined(kDefaultPrimeLimit);
    return c;
}

double constant_A() { return (1.0 - kEulerGamma - kLog2Pi) / 2.0; }

double constant_B() { return -kEulerGamma - kLog2Pi; }

ConstantsTable make_table(std::uint64_t prime_limit) {
    ConstantsTable t;
    const auto c = twin_constant(prime_limit);
    t.c = c.value;
    t.truncation_bound = c.tail_bound;
    t.prime_limit = prime_limit;
    t.c_refined = twin_constant_refined(prime_limit);
    t.A = constant_A();
    t.B = constant_B();
    return t;
}

VariancePrediction predict_variances(std::uint64_t x, std::uint64_t h) {
    if (h < 1 || h >= x) {
        throw ConfigError("predict_second_moment: need 1 <= h < X");
    }
    const auto X = static_cast<double>(x);
    const auto H = static_cast<double>(h);
    VariancePrediction v;
    v.pair_correlation = H * std::log(X / H);
    v.refined = H * (std::log(X / H) + constant_B());
    v.cramer = H * std::log(X);
    v.regime_boundary = std::exp(-constant_B());
    v.meaningful = X / H > v.regime_boundary;
    return v;
}

double predict_second_moment(std::uint64_t x, std::uint64_t h) {
    return predict_variances(x, h).refined;
}

EulerProduct T_at(double s, std::uint64_t prime_limit) {
    if (!(s > 0.0)) throw DomainError("T_at: product diverges for s <= 0");
    check_limit(prime_limit, "T_at");
    const auto primes = primes_upto(prime_limit);
    const double log_sum = odd_prime_log_sum(*primes, [s](std::uint32_t p32) {
        const auto p = static_cast<double>(p32);
        return std::log1p(1.0 / ((p - 2.0) * std::pow(p, s)));
    });
    const auto L = static_cast<double>(prime_limit);
    return {std::exp(log_sum), (L / (L - 2.0)) * std::pow(L, -s) / s, prime_limit};
}

EulerProduct U_at(double s, std::uint64_t prime_limit) {
    if (!(s > -0.5)) throw DomainError("U_at: product diverges for s <= -1/2");
    check_limit(prime_limit, "U_at");
    const auto primes = primes_upto(prime_limit);
    const double log_sum = odd_prime_log_sum(*primes, [s](std::uint32_t p32) {
        const auto p = static_cast<double>(p32);
        const double u = (2.0 * std::pow(p, -(s + 1.0)) - std::pow(p, -(2.0 * s + 1.0))) / (p - 2.0);
        return std::log1p(u);
    });
    const auto L = static_cast<double>(prime_limit);
    const double bound = 2.0 * (L / (L - 2.0)) *
                         (2.0 * std::pow(L, -s - 1.0) / (s + 1.0) +
                          std::pow(L, -2.0 * s - 1.0) / (2.0 * s + 1.0));
    return {std::exp(log_sum), bound, prime_limit};
}

UFactorDerivative u_factor_derivative_at_zero(std::uint32_t p) {
    // factor(s) = 1 + Σ a_i p^{-(b_i s + 1)} / (p - 2), d/ds at 0 = Σ -a_i b_i · log p / ((p-2) p)
    struct Term {
        int numerator;
        int slope;
    };
    constexpr std::array<Term, 2> terms{{{2, 1}, {-1, 2}}};
    int coefficient = 0;
    for (const auto& t : terms) coefficient -= t.numerator * t.slope;
    const auto pd = static_cast<double>(p);
    return {coefficient, coefficient * std::log(pd) / ((pd - 2.0) * pd)};
}

double U_prime_at_zero(std::uint64_t prime_limit) {
    check_limit(prime_limit, "U_prime_at_zero");
    const auto primes = primes_upto(prime_limit);
    ExactSum log_derivative;
    for (std::size_t i = 1; i < primes->primes.size(); ++i) {
        const auto p = primes->primes[i];
        const auto pd = static_cast<double>(p);
        const double f0 = 1.0 + 1.0 / ((pd - 2.0) * pd);
        log_derivative.add(u_factor_derivative_at_zero(p).value / f0);
    }
    return U_at(0.0, prime_limit).value * log_derivative.value();
}

double zeta_minus_one(double s) {
    if (!(s > 1.0)) throw DomainError("zeta_real: implemented for real s > 1 only");
    constexpr int kTerms = 10;
    // B_{2j} / (2j)!
    constexpr std::array<double, kTerms> bernoulli_over_factorial{
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
        -3617.0 / 510.0 / 20922789888000.0,
        43867.0 / 798.0 / 6402373705728000.0,
        -174611.0 / 330.0 / 2432902008176640000.0,
    };
    constexpr int kCut = 12;
    const double n = kCut;
    double correction = 0.0;
    double rising = s;                   // s (s+1) ... (s+2j-2)
    double power = std::pow(n, -s - 1);  // N^{-s-2j+1}
    for (int j = 0; j < kTerms; ++j) {
        correction += bernoulli_over_factorial[j] * rising * power;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        power /= n * n;
    }
    double total = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s) + correction;
    for (int k = kCut - 1; k >= 2; --k) total += std::pow(static_cast<double>(k), -s);
    return total;
}

double zeta_real(double s) { return 1.0 + zeta_minus_one(s); }

double prime_zeta(double s) {
    if (!(s >= 2.0)) throw DomainError("prime_zeta: implemented for s >= 2");
    ExactSum acc;
    for (int n = 1; (n - 1) * s <= 64.0; ++n) {
        const int mu = moebius(n);
        if (mu == 0) continue;
        acc.add(mu * std::log1p(zeta_minus_one(n * s)) / n);
    }
    return acc.value();
}

DirichletCheck dirichlet_identity_check(double s, std::uint64_t k_terms,
                                        std::uint64_t prime_limit) {
    if (!(s >= 1.5)) throw DomainError("dirichlet_identity_check: requires s >= 1.5");
    if (k_terms < 10'000) throw ConfigError("dirichlet_identity_check: requires K >= 10^4");
    const auto s_values = singular::s_table(k_terms);
    ExactSum partial;
    for (std::uint64_t k = 1; k <= k_terms; ++k) {
        partial.add(s_values[k] * std::pow(static_cast<double>(k), -s));
    }
    DirichletCheck out;
    out.partial = partial.value();
    const auto K = static_cast<double>(k_terms);
    // mean value of s(k) is T(1) = 2/c
    out.tail = (2.0 / twin_constant_cached()) *
               (std::pow(K, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(K, -s));
    out.lhs = out.partial + out.tail;
    out.rhs = zeta_real(s) * T_at(s, prime_limit).value;
    return out;
}

}  // namespace psiwin::constants
