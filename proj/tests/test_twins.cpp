#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "psiwin/constants.hpp"
#include "psiwin/errors.hpp"
#include "psiwin/singular.hpp"
#include "psiwin/twins.hpp"

using namespace psiwin;
using namespace psiwin::twins;

TEST_CASE("lambda_pair_sum small examples") {
    CHECK(lambda_pair_sum(10, 2) == doctest::Approx(10.152580866478185).epsilon(1e-15));
    for (std::uint64_t k : {1ULL, 2ULL, 7ULL, 100ULL}) CHECK(lambda_pair_sum(1, k) == 0.0);
    CHECK_THROWS_AS(lambda_pair_sum(10, 0), ConfigError);
}

TEST_CASE("pair sums equal the double-loop oracle exactly") {
    for (std::uint64_t x : {1ULL, 2ULL, 17ULL, 100ULL, 500ULL, 1000ULL}) {
        for (std::uint64_t k = 1; k <= 20; ++k) {
            CAPTURE(x);
            CAPTURE(k);
            REQUIRE(lambda_pair_sum(x, k) == oracle::pair_sum(x, k));
        }
    }
    PairSumOptions tiny;
    tiny.segment_size = 7;
    tiny.workers = 3;
    const auto batch = lambda_pair_sums(1000, 1, 20, tiny);
    for (std::uint64_t k = 1; k <= 20; ++k) CHECK(batch[k - 1] == oracle::pair_sum(1000, k));
}

TEST_CASE("batched sums do not depend on segmentation, workers or the k window") {
    PairSumOptions a;
    a.segment_size = 1 << 20;
    PairSumOptions b;
    b.segment_size = 12345;
    b.workers = 4;
    const auto wide = lambda_pair_sums(2'000'000, 1, 64, a);
    const auto split = lambda_pair_sums(2'000'000, 1, 64, b);
    CHECK(wide == split);
    const auto middle = lambda_pair_sums(2'000'000, 30, 40, b);
    for (std::uint64_t k = 30; k <= 40; ++k) CHECK(middle[k - 30] == wide[k - 1]);
}

TEST_CASE("odd offsets only see prime-power adjacencies") {
    const double k1 = lambda_pair_sum(1'000'000, 1);
    CHECK(k1 > 0.0);
    CHECK(k1 < 1e-3 * 1e6);
    const auto t = twin_error(1'000'000, 3);
    CHECK(t.expected == 0.0);
    CHECK(t.error == t.raw);
    CHECK(t.raw >= 0.0);
}

TEST_CASE("twin_error") {
    CHECK(twin_error(0, 2).error == 0.0);
    const auto t = twin_error(10'000'000, 2);
    CHECK(t.expected == doctest::Approx(singular::singular_series(2) * 1e7).epsilon(1e-15));
    CHECK(t.error == t.raw - t.expected);
    // numpy sieve + math.fsum
    CHECK(t.raw == doctest::Approx(13271672.504409432).epsilon(1e-12));
    CHECK(std::abs(t.error) / std::sqrt(1e7) <= 10.0);

    double prev = 0.0;
    for (std::uint64_t x = 1000; x <= 1'000'000; x *= 10) {
        const double raw = twin_error(x, 6).raw;
        CHECK(raw >= prev);
        prev = raw;
    }
}

TEST_CASE("twin_errors batch agrees with single offsets") {
    const auto rows = twin_errors(100'000, 30);
    REQUIRE(rows.size() == 30);
    for (const auto& r : rows) {
        CHECK(r.x == 100'000);
        const auto one = twin_error(100'000, r.k);
        CHECK(r.raw == one.raw);
        CHECK(r.expected == doctest::Approx(one.expected).epsilon(1e-15));
    }
}

TEST_CASE("mean error is small next to sqrt(X) log X at X = 10^7") {
    const auto rows = twin_errors(10'000'000, 100);
    REQUIRE(rows.size() == 100);
    double mean = 0.0;
    for (const auto& r : rows) mean += r.error;
    mean /= 100.0;
    const double scale = std::sqrt(1e7) * std::log(1e7);
    MESSAGE("mean E(X,k) / (sqrt(X) log X) = " << mean / scale);
    CHECK(std::abs(mean) < scale);
}

TEST_CASE("weighted error sum") {
    const auto two = weighted_error_sum(100'000, 2);
    CHECK(two.value == doctest::Approx(2.0 * lambda_pair_sum(100'000, 1)).epsilon(1e-15));

    const auto w = weighted_error_sum(1'000'000, 100);
    CHECK(std::isfinite(w.value));
    CHECK(std::abs(w.value) < w.absolute);
    CHECK(w.ratio_cancelling == doctest::Approx(w.value / (1000.0 * 1000.0)).epsilon(1e-12));
    CHECK(w.ratio_trivial == doctest::Approx(w.value / (1e4 * 1e3)).epsilon(1e-12));

    CHECK_THROWS_AS(weighted_error_sum(10'000'000, 1000, 1e9), ResourceError);
    CHECK(weighted_error_sum(1000, 1).value == 0.0);
    CHECK_THROWS_AS(weighted_error_sum(1000, 0), ConfigError);
}

TEST_CASE("lambda squares") {
    const double l2 = std::log(2.0), l3 = std::log(3.0), l5 = std::log(5.0), l7 = std::log(7.0);
    CHECK(lambda_square_sum(10) ==
          doctest::Approx(3 * l2 * l2 + 2 * l3 * l3 + l5 * l5 + l7 * l7).epsilon(1e-15));
    CHECK(lambda_square_sum(1) == 0.0);
    CHECK(lambda_square_main_term(1) == -1.0);
    const double s = lambda_square_sum(100'000'000);
    CHECK(std::abs(s / lambda_square_main_term(100'000'000) - 1.0) <= 0.02);
}
