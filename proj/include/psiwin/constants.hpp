#pragma once

#include <cstdint>

namespace psiwin::constants {

inline constexpr double kEulerGamma = 0.5772156649015329;
inline constexpr double kLog2Pi = 1.8378770664093455;

inline constexpr std::uint64_t kDefaultPrimeLimit = 10'000'000;

/// A truncated Euler product over odd primes p <= prime_limit.
/// tail_bound bounds |log(full product) - log(value)|.
struct EulerProduct {
    double value = 0.0;
    double tail_bound = 0.0;
    std::uint64_t prime_limit = 0;
};

struct ConstantsTable {
    double c = 0.0;          // 2 ∏_{2<p<=L} (1 - 1/(p-1)^2), the raw partial product
    double c_refined = 0.0;  // the same with the p > L tail restored through prime zeta values
    double A = 0.0;
    double B = 0.0;
    double euler_gamma = kEulerGamma;
    double log_2pi = kLog2Pi;
    double truncation_bound = 0.0;  // on |log c_true - log c|
    std::uint64_t prime_limit = 0;
};

/// c = 2 ∏_{p>2} (1 - 1/(p-1)^2) truncated at prime_limit (>= 10^4).
/// The bound uses Σ_{p>L} 1/(p-1)^2 <= Σ_{m>=L} 1/m^2 and -log(1-y) <= 2y.
/// AccuracyError when the bound exceeds max_log_error.
EulerProduct twin_constant(std::uint64_t prime_limit,
                           double max_log_error = 1.0);

/// Twin constant with the truncated tail Σ_{p>L} log(1 - 1/(p-1)^2) replaced
/// by its prime-zeta expansion -P_L(2) - 2 P_L(3) - 3.5 P_L(4); the residual
/// error is O(L^-4) relative.
double twin_constant_refined(std::uint64_t prime_limit = kDefaultPrimeLimit);

/// twin_constant_refined at the default limit, computed once per process.
double twin_constant_cached();

double constant_A();  // (1 - C0 - log 2π) / 2
double constant_B();  // -C0 - log 2π = 2A - 1

ConstantsTable make_table(std::uint64_t prime_limit = kDefaultPrimeLimit);

/// Second-moment predictions for ψ(x+h) - ψ(x) - h, per unit of x.
struct VariancePrediction {
    double refined = 0.0;           // h (log(X/h) + B)
    double pair_correlation = 0.0;  // h log(X/h)
    double cramer = 0.0;            // h log X
    double regime_boundary = 0.0;   // X/h must exceed e^{-B} for `refined` to be positive
    bool meaningful = false;
};

/// h (log(X/h) + B); requires 1 <= h < X.
double predict_second_moment(std::uint64_t x, std::uint64_t h);
VariancePrediction predict_variances(std::uint64_t x, std::uint64_t h);

/// T(s) = ∏_{p>2} (1 + 1/((p-2) p^s)), s > 0.
EulerProduct T_at(double s, std::uint64_t prime_limit = kDefaultPrimeLimit);

/// U(s) = ∏_{p>2} (1 + 2/((p-2)p^{s+1}) - 1/((p-2)p^{2s+1})), s > -1/2.
EulerProduct U_at(double s, std::uint64_t prime_limit = kDefaultPrimeLimit);

/// Per-prime derivative of a U factor at s = 0, written as coefficient · log p / ((p-2) p).
/// The coefficient is an exact integer.
struct UFactorDerivative {
    int log_coefficient = 0;
    double value = 0.0;
};
UFactorDerivative u_factor_derivative_at_zero(std::uint32_t p);

/// U'(0) = U(0) Σ_p f_p'(0) / f_p(0).
double U_prime_at_zero(std::uint64_t prime_limit = kDefaultPrimeLimit);

/// ζ(s) - 1 for real s > 1, by Euler–Maclaurin. Full relative precision even for large s.
double zeta_minus_one(double s);

/// ζ(s) for real s > 1.
double zeta_real(double s);

/// Prime zeta P(s) = Σ_p p^{-s}, s >= 2, through Σ μ(n)/n log ζ(ns).
double prime_zeta(double s);

struct DirichletCheck {
    double lhs = 0.0;      // partial + tail
    double rhs = 0.0;      // ζ(s) T(s)
    double partial = 0.0;  // Σ_{k<=K} s(k) k^{-s}
    double tail = 0.0;     // (2/c) (K^{1-s}/(s-1) - K^{-s}/2)
};

/// Compares Σ s(k) k^{-s} against ζ(s) T(s); s >= 1.5, K >= 10^4.
DirichletCheck dirichlet_identity_check(double s, std::uint64_t k_terms,
                                        std::uint64_t prime_limit = kDefaultPrimeLimit);

}  // namespace psiwin::constants
