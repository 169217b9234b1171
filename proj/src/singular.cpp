#include "psiwin/singular.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "psiwin/constants.hpp"
#include "psiwin/errors.hpp"
#include "psiwin/exact_sum.hpp"

namespace psiwin::singular {

namespace {

void check_capacity(std::uint64_t n, std::uint64_t capacity, const char* who) {
    if (n > capacity) {
        throw ResourceError(std::string(who) + ": argument " + std::to_string(n) +
                            " exceeds the s(k) table capacity " + std::to_string(capacity) +
                            "; evaluate smaller sweeps or raise the memory budget");
    }
}

double prime_ratio(std::uint64_t p) {
    return static_cast<double>(p - 1) / static_cast<double>(p - 2);
}

}  // namespace

SpfTable::SpfTable(std::uint64_t limit) : limit_(limit) {
    check_capacity(limit, kMaxTableLimit, "SpfTable");
    spf_.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] != 0) continue;
        spf_[i] = static_cast<std::uint32_t>(i);
        if (i > limit / i) continue;
        for (std::uint64_t m = i * i; m <= limit; m += i) {
            if (spf_[m] == 0) spf_[m] = static_cast<std::uint32_t>(i);
        }
    }
}

std::vector<double> SpfTable::s_values() const {
    std::vector<double> s(limit_ + 1, 0.0);
    if (limit_ >= 1) s[1] = 1.0;
    for (std::uint64_t k = 2; k <= limit_; ++k) {
        const std::uint64_t p = spf_[k];
        const std::uint64_t m = k / p;
        // p already divides m, or p == 2: no new odd prime
        s[k] = (p == 2 || m % p == 0) ? s[m] : s[m] * prime_ratio(p);
    }
    return s;
}

double s_of_k(std::uint64_t k) {
    if (k == 0) throw DomainError("s_of_k: k must be >= 1");
    while (k % 2 == 0) k /= 2;
    double s = 1.0;
    for (std::uint64_t p = 3; p <= k / p; p += 2) {
        if (k % p != 0) continue;
        s *= prime_ratio(p);
        while (k % p == 0) k /= p;
    }
    if (k > 1) s *= prime_ratio(k);
    return s;
}

double s_of_k(std::uint64_t k, const SpfTable& table) {
    if (k == 0) throw DomainError("s_of_k: k must be >= 1");
    check_capacity(k, table.limit(), "s_of_k");
    double s = 1.0;
    while (k > 1) {
        const std::uint64_t p = table.spf(k);
        if (p > 2) s *= prime_ratio(p);
        while (k % p == 0) k /= p;
    }
    return s;
}

std::vector<double> s_table(std::uint64_t k_max) { return SpfTable(k_max).s_values(); }

double singular_series(std::uint64_t k) {
    if (k == 0) throw DomainError("singular_series: k must be >= 1");
    if (k % 2 == 1) return 0.0;
    return constants::twin_constant_cached() * s_of_k(k);
}

SingularSum cesaro_sum(std::uint64_t h) {
    if (h < 2) throw DomainError("cesaro_sum: h must be >= 2");
    check_capacity(h, kMaxTableLimit, "cesaro_sum");
    return cesaro_sum(h, s_table(h));
}

SingularSum cesaro_sum(std::uint64_t h, const std::vector<double>& s_values) {
    if (h < 2) throw DomainError("cesaro_sum: h must be >= 2");
    check_capacity(h, s_values.empty() ? 0 : s_values.size() - 1, "cesaro_sum");
    // odd k contribute nothing
    ExactSum acc;
    for (std::uint64_t k = 2; k < h; k += 2) {
        acc.add(static_cast<double>(h - k) * s_values[k]);
    }
    const auto H = static_cast<double>(h);
    SingularSum out;
    out.h = h;
    out.value = constants::twin_constant_cached() * acc.value();
    out.prediction = 0.5 * H * H - 0.5 * H * std::log(H) + constants::constant_A() * H;
    out.residual = out.value - out.prediction;
    return out;
}

InnerCesaro inner_cesaro(std::uint64_t K) {
    if (K < 1) throw DomainError("inner_cesaro: K must be >= 1");
    check_capacity(K, kMaxTableLimit, "inner_cesaro");
    return inner_cesaro(K, s_table(K));
}

InnerCesaro inner_cesaro(std::uint64_t K, const std::vector<double>& s_values) {
    if (K < 1) throw DomainError("inner_cesaro: K must be >= 1");
    check_capacity(K, s_values.empty() ? 0 : s_values.size() - 1, "inner_cesaro");
    ExactSum acc;
    for (std::uint64_t k = 1; k < K; ++k) acc.add(static_cast<double>(K - k) * s_values[k]);
    const double c = constants::twin_constant_cached();
    const auto k = static_cast<double>(K);
    const double log_4pi = std::numbers::ln2 + constants::kLog2Pi;
    InnerCesaro out;
    out.K = K;
    out.value = acc.value();
    out.prediction = k * k / c - k * std::log(k) / (2.0 * c) +
                     k / (2.0 * c) * (1.0 - constants::kEulerGamma - log_4pi);
    out.residual = out.value - out.prediction;
    return out;
}

ReductionCheck reduction_identity_check(std::uint64_t h) {
    if (h < 2 || h % 2 != 0) {
        throw DomainError("reduction_identity_check: h must be even and >= 2");
    }
    check_capacity(h, kMaxTableLimit, "reduction_identity_check");
    const auto s = s_table(h);
    ReductionCheck out;
    out.lhs = cesaro_sum(h, s).value;
    out.rhs = 2.0 * constants::twin_constant_cached() * inner_cesaro(h / 2, s).value;
    return out;
}

double singular_mean(std::uint64_t h) {
    if (h < 1) throw DomainError("singular_mean: h must be >= 1");
    const auto s = s_table(h);
    ExactSum acc;
    for (std::uint64_t k = 2; k <= h; k += 2) acc.add(s[k]);
    return constants::twin_constant_cached() * acc.value() / static_cast<double>(h);
}

}  // namespace psiwin::singular
