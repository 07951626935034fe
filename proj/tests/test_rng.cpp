#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mbm/rng.hpp"

using mbm::Rng;
using mbm::substream;

TEST_CASE("rng is deterministic per seed") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("next_unit stays in [0,1) with sane moments") {
    Rng r(7);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.next_unit();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.01);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.01);
}

TEST_CASE("substreams separate by path and by order") {
    const std::uint64_t s = 1234;
    CHECK(substream(s, {0}) != substream(s, {1}));
    CHECK(substream(s, {0, 1}) != substream(s, {1, 0}));
    CHECK(substream(s, {5}) != substream(s + 1, {5}));
    CHECK(substream(s, {5}) == substream(s, {5}));
}

TEST_CASE("exponential draws have unit mean") {
    Rng r(11);
    const int n = 50000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.next_exponential();
        REQUIRE(x >= 0.0);
        REQUIRE(std::isfinite(x));
        sum += x;
    }
    CHECK(std::abs(sum / n - 1.0) < 0.03);
}

TEST_CASE("poisson edge cases") {
    Rng r(3);
    CHECK(r.next_poisson(0.0) == 0);
    CHECK_THROWS(r.next_poisson(-1.0));
    CHECK_THROWS(r.next_poisson(std::nan("")));
}

TEST_CASE("poisson moments match at small and large mean") {
    for (const double mean : {5.0, 100.0}) {
        Rng r(17);
        const int n = 20000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(r.next_poisson(mean));
            sum += k;
            sumsq += k * k;
        }
        const double m = sum / n;
        const double var = sumsq / n - m * m;
        // 5 sigma on the sample mean, 10% relative on variance
        CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
        CHECK(std::abs(var - mean) < 0.10 * mean);
    }
}
