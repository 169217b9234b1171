#include "psiwin/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "psiwin/errors.hpp"

namespace psiwin::gaussian {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double density(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

}  // namespace

void NormalTailQuery::validate() const {
    if (n < 1) throw ConfigError("NormalTailQuery: n must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("NormalTailQuery: sigma must be positive");
    }
    if (!std::isfinite(t)) throw ConfigError("NormalTailQuery: t must be finite");
}

double phi(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }

double phi_upper(double t) { return 0.5 * std::erfc(t * kInvSqrt2); }

double phi_inv_upper(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("phi_inv: probability " + std::to_string(q) + " not in (0, 1)");
    }
    // Newton on log Q(t) - log q, kept inside a shrinking bracket.
    const double target = std::log(q);
    double lo = -40.0;
    double hi = 40.0;
    double t = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double tail = phi_upper(t);
        const double f = std::log(tail) - target;
        if (f == 0.0) return t;
        if (f > 0.0) {
            lo = t;  // tail too heavy: root is to the right
        } else {
            hi = t;
        }
        double next = t + f * tail / density(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) return next;
        t = next;
    }
    return t;
}

double phi_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("phi_inv: probability " + std::to_string(p) + " not in (0, 1)");
    }
    if (p < 0.5) return -phi_inv_upper(p);
    return phi_inv_upper(1.0 - p);
}

double max_exceed_prob(double t, std::uint64_t n) {
    if (n < 1) throw DomainError("max_exceed_prob: n must be >= 1");
    const double log_cdf = t > 0.0 ? std::log1p(-phi_upper(t)) : std::log(phi(t));
    return -std::expm1(static_cast<double>(n) * log_cdf);
}

double median_max(std::uint64_t n, double sigma) {
    NormalTailQuery{0.0, n, sigma}.validate();
    const double q = -std::expm1(-std::numbers::ln2 / static_cast<double>(n));
    return sigma * phi_inv_upper(q);
}

double expected_exceedance(std::uint64_t x, double sigma, double threshold) {
    if (!(sigma > 0.0)) throw DomainError("expected_exceedance: sigma must be positive");
    if (!(threshold >= 0.0)) throw DomainError("expected_exceedance: threshold must be >= 0");
    return static_cast<double>(x) * 2.0 * phi_upper(threshold / sigma);
}

double normal_moment(int k) {
    if (k < 0) throw DomainError("normal_moment: k must be >= 0");
    if (k % 2 == 1) return 0.0;
    double m = 1.0;
    for (int j = k - 1; j > 1; j -= 2) m *= j;
    return m;
}

}  // namespace psiwin::gaussian
