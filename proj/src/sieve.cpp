#include "psiwin/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psiwin/errors.hpp"

namespace psiwin {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

bool BasePrimes::covers(std::uint64_t hi) const {
    if (hi <= 4) return true;
    // every composite n < hi has a prime factor <= isqrt(hi - 1)
    return static_cast<unsigned __int128>(limit + 1) * (limit + 1) > hi - 1;
}

BasePrimes base_primes(std::uint64_t limit) {
    if (limit < 2 || limit > (std::uint64_t{1} << 32)) {
        throw ConfigError("base_primes: limit " + std::to_string(limit) +
                          " outside [2, 2^32]");
    }
    BasePrimes out;
    out.limit = limit;
    // odd-only bitmap: bit i stands for 2i+1
    const std::uint64_t odd_count = (limit + 1) / 2;
    std::vector<bool> composite(odd_count, false);
    for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
        if (composite[i]) continue;
        const std::uint64_t p = 2 * i + 1;
        for (std::uint64_t m = p * p; m <= limit; m += 2 * p) composite[m / 2] = true;
    }
    out.primes.push_back(2);
    for (std::uint64_t i = 1; i < odd_count; ++i) {
        if (!composite[i]) out.primes.push_back(static_cast<std::uint32_t>(2 * i + 1));
    }
    out.logs.reserve(out.primes.size());
    for (auto p : out.primes) out.logs.push_back(std::log(static_cast<double>(p)));
    return out;
}

BasePrimes base_primes_for(std::uint64_t hi) {
    return base_primes(std::max<std::uint64_t>(2, isqrt(hi > 0 ? hi - 1 : 0)));
}

void fill_lambda(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base,
                 std::span<double> out) {
    if (lo < 1 || hi <= lo) {
        throw PreconditionError("lambda_segment: need 1 <= lo < hi, got [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    if (hi > kMaxSieveValue) {
        throw PreconditionError("lambda_segment: hi exceeds 2^53");
    }
    if (!base.covers(hi)) {
        throw PreconditionError("lambda_segment: base primes up to " +
                                std::to_string(base.limit) + " cannot sieve below " +
                                std::to_string(hi));
    }
    const std::uint64_t len = hi - lo;
    if (out.size() != len) {
        throw PreconditionError("lambda_segment: output span has the wrong length");
    }

    std::vector<std::uint8_t> composite(len, 0);
    const std::uint64_t top = hi - 1;
    std::size_t used = 0;  // base primes with p*p <= top
    for (auto p32 : base.primes) {
        const std::uint64_t p = p32;
        if (p * p > top) break;
        ++used;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        for (std::uint64_t m = start; m < hi; m += p) composite[m - lo] = 1;
    }

    for (std::uint64_t i = 0; i < len; ++i) {
        const std::uint64_t n = lo + i;
        out[i] = (n >= 2 && !composite[i]) ? std::log(static_cast<double>(n)) : 0.0;
    }

    // prime powers p^a, a >= 2
    for (std::size_t j = 0; j < used; ++j) {
        const std::uint64_t p = base.primes[j];
        const double lp = base.logs[j];
        std::uint64_t q = p * p;
        while (true) {
            if (q >= lo) out[q - lo] = lp;
            if (q > top / p) break;
            q *= p;
        }
    }
}

LambdaSegment lambda_segment(std::uint64_t lo, std::uint64_t hi, const BasePrimes& base) {
    LambdaSegment seg;
    seg.lo = lo;
    seg.hi = hi;
    seg.values.resize(hi > lo ? hi - lo : 0);
    fill_lambda(lo, hi, base, seg.values);
    return seg;
}

double psi(std::uint64_t x, const BasePrimes& base, std::uint64_t segment_size) {
    if (x < 2) return 0.0;
    if (segment_size == 0) throw ConfigError("psi: segment_size must be positive");
    __int128 total = 0;
    std::vector<double> buf;
    for (std::uint64_t lo = 1; lo <= x; lo += segment_size) {
        const std::uint64_t hi = std::min(x + 1, lo + segment_size);
        buf.resize(hi - lo);
        fill_lambda(lo, hi, base, buf);
        for (double v : buf) total += lambda_to_fixed(v);
    }
    return static_cast<double>(total) * kFixedUnit;
}

}  // namespace psiwin
