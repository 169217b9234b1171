#include "psiwin/twins.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "psiwin/errors.hpp"
#include "psiwin/exact_sum.hpp"
#include "psiwin/singular.hpp"

namespace psiwin::twins {

namespace {

// Pair sums for n in [lo, hi) with offsets k_lo..k_hi.
std::vector<ExactSum> segment_pair_sums(std::uint64_t lo, std::uint64_t hi, std::uint64_t k_lo,
                                        std::uint64_t k_hi, const BasePrimes& base) {
    std::vector<ExactSum> sums(k_hi - k_lo + 1);
    std::vector<double> lambda(hi + k_hi - lo);
    fill_lambda(lo, hi + k_hi, base, lambda);

    std::vector<std::uint64_t> support;  // offsets i with Λ(lo + i) > 0
    for (std::uint64_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > 0.0) support.push_back(i);
    }
    const std::uint64_t len = hi - lo;
    auto partner = support.begin();
    for (auto it = support.begin(); it != support.end() && *it < len; ++it) {
        const std::uint64_t i = *it;
        while (partner != support.end() && *partner < i + k_lo) ++partner;
        for (auto j = partner; j != support.end() && *j <= i + k_hi; ++j) {
            sums[*j - i - k_lo].add(lambda[i] * lambda[*j]);
        }
    }
    return sums;
}

}  // namespace

std::vector<double> lambda_pair_sums(std::uint64_t x, std::uint64_t k_lo, std::uint64_t k_hi,
                                     const PairSumOptions& options) {
    if (k_lo < 1 || k_hi < k_lo) throw ConfigError("lambda_pair_sums: need 1 <= k_lo <= k_hi");
    if (options.segment_size == 0) throw ConfigError("lambda_pair_sums: segment_size is zero");
    if (x + k_hi + 1 > kMaxSieveValue) {
        throw ResourceError("lambda_pair_sums: X + k exceeds the sieve range 2^53");
    }
    const std::size_t width = k_hi - k_lo + 1;
    std::vector<ExactSum> total(width);
    if (x >= 1) {
        const BasePrimes base = base_primes_for(x + k_hi + 1);
        const std::uint64_t seg = options.segment_size;
        const std::uint64_t n_segments = (x + seg - 1) / seg;
        std::atomic<std::uint64_t> next{0};
        std::mutex mutex;
        std::exception_ptr error;
        auto worker = [&] {
            while (true) {
                const std::uint64_t s = next.fetch_add(1);
                if (s >= n_segments) return;
                try {
                    const std::uint64_t lo = 1 + s * seg;
                    const auto part =
                        segment_pair_sums(lo, std::min(x + 1, lo + seg), k_lo, k_hi, base);
                    // exact sums: merge order does not matter
                    std::lock_guard lock(mutex);
                    for (std::size_t i = 0; i < width; ++i) total[i].add(part[i]);
                } catch (...) {
                    std::lock_guard lock(mutex);
                    if (!error) error = std::current_exception();
                    next = n_segments;
                    return;
                }
            }
        };
        const auto n_threads = static_cast<unsigned>(
            std::min<std::uint64_t>(std::max(1u, options.workers), n_segments));
        if (n_threads <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        }
        if (error) std::rethrow_exception(error);
    }
    std::vector<double> out(width);
    for (std::size_t i = 0; i < width; ++i) out[i] = total[i].value();
    return out;
}

double lambda_pair_sum(std::uint64_t x, std::uint64_t k) {
    if (k < 1) throw ConfigError("lambda_pair_sum: k must be >= 1");
    return lambda_pair_sums(x, k, k).front();
}

TwinCorrelation twin_error(std::uint64_t x, std::uint64_t k) {
    TwinCorrelation t;
    t.x = x;
    t.k = k;
    t.raw = x == 0 ? 0.0 : lambda_pair_sum(x, k);
    t.expected = singular::singular_series(k) * static_cast<double>(x);
    t.error = t.raw - t.expected;
    return t;
}

std::vector<TwinCorrelation> twin_errors(std::uint64_t x, std::uint64_t k_max,
                                         const PairSumOptions& options) {
    if (k_max < 1) throw ConfigError("twin_errors: k_max must be >= 1");
    const auto raw = lambda_pair_sums(x, 1, k_max, options);
    const auto s = singular::s_table(k_max);
    const double c = singular::singular_series(2);
    std::vector<TwinCorrelation> out;
    out.reserve(k_max);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        TwinCorrelation t;
        t.x = x;
        t.k = k;
        t.raw = raw[k - 1];
        t.expected = k % 2 == 1 ? 0.0 : c * s[k] * static_cast<double>(x);
        t.error = t.raw - t.expected;
        out.push_back(t);
    }
    return out;
}

WeightedErrorSum weighted_error_sum(std::uint64_t x, std::uint64_t h, double budget,
                                    const PairSumOptions& options) {
    if (h < 1) throw ConfigError("weighted_error_sum: h must be >= 1");
    if (static_cast<double>(x) * static_cast<double>(h) > budget) {
        throw ResourceError("weighted_error_sum: X*h = " +
                            std::to_string(static_cast<double>(x) * static_cast<double>(h)) +
                            " exceeds the work budget " + std::to_string(budget));
    }
    WeightedErrorSum out;
    out.x = x;
    out.h = h;
    if (h >= 2) {
        // the k = h term has weight zero
        const auto errors = twin_errors(x, h - 1, options);
        ExactSum value;
        ExactSum absolute;
        for (const auto& e : errors) {
            const double w = 2.0 * static_cast<double>(h - e.k);
            value.add(w * e.error);
            absolute.add(w * std::abs(e.error));
        }
        out.value = value.value();
        out.absolute = absolute.value();
    }
    const auto H = static_cast<double>(h);
    const double root_x = std::sqrt(static_cast<double>(x));
    if (root_x > 0.0) {
        out.ratio_cancelling = out.value / (std::pow(H, 1.5) * root_x);
        out.ratio_trivial = out.value / (H * H * root_x);
    }
    return out;
}

double lambda_square_sum(std::uint64_t x) {
    if (x < 2) return 0.0;
    const BasePrimes base = base_primes_for(x + 1);
    ExactSum acc;
    std::vector<double> lambda;
    for (std::uint64_t lo = 1; lo <= x; lo += kDefaultSegmentSize) {
        const std::uint64_t hi = std::min(x + 1, lo + kDefaultSegmentSize);
        lambda.resize(hi - lo);
        fill_lambda(lo, hi, base, lambda);
        for (double v : lambda) {
            if (v > 0.0) acc.add(v * v);
        }
    }
    return acc.value();
}

double lambda_square_main_term(std::uint64_t x) {
    const auto X = static_cast<double>(x);
    return x == 0 ? 0.0 : X * std::log(X) - X;
}

}  // namespace psiwin::twins
