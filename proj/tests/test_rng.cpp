#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "icmg/rng.hpp"

using namespace icmg;

TEST_CASE("streams are pure functions of seed and stream id") {
    RngStream a(42, 0), b(42, 0);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RngStream c(42, 1);
    RngStream d(43, 0);
    int diff_c = 0, diff_d = 0;
    RngStream a2(42, 0);
    for (int i = 0; i < 64; ++i) {
        std::uint64_t base = a2.next_u64();
        if (c.next_u64() != base) ++diff_c;
        if (d.next_u64() != base) ++diff_d;
    }
    REQUIRE(diff_c > 60);
    REQUIRE(diff_d > 60);
}

TEST_CASE("uniform doubles live in the half-open unit interval") {
    RngStream rng(7, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(std::fabs(sum / 100000.0 - 0.5) < 0.005);

    for (int i = 0; i < 100000; ++i) {
        double u = rng.next_open_double();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("bounded draws are unbiased") {
    RngStream rng(11, 0);
    const std::uint64_t bound = 6;
    std::vector<int> counts(bound, 0);
    const int n = 600000;
    for (int i = 0; i < n; ++i) ++counts[rng.next_below(bound)];
    double expect = static_cast<double>(n) / bound;
    double chi2 = 0.0;
    for (int c : counts) {
        double d = c - expect;
        chi2 += d * d / expect;
    }
    // 5 degrees of freedom; 24.1 is far beyond the 0.999 quantile (20.5).
    REQUIRE(chi2 < 24.1);
    REQUIRE_THROWS_AS(rng.next_below(0), std::domain_error);
}

TEST_CASE("normal quantile matches reference values") {
    REQUIRE(std::fabs(standard_normal_quantile(0.5)) < 1e-15);
    REQUIRE(std::fabs(standard_normal_quantile(0.975) - 1.9599639845400545) < 1e-12);
    REQUIRE(std::fabs(standard_normal_quantile(0.95) - 1.6448536269514722) < 1e-12);
    REQUIRE(std::fabs(standard_normal_quantile(0.99) - 2.3263478740408408) < 1e-12);
    REQUIRE(std::fabs(standard_normal_quantile(0.999) - 3.090232306167813) < 1e-11);
    REQUIRE(std::fabs(standard_normal_quantile(0.8413447460685429) - 1.0) < 1e-12);
    REQUIRE(std::fabs(standard_normal_quantile(0.25) + standard_normal_quantile(0.75)) < 1e-13);
    REQUIRE_THROWS_AS(standard_normal_quantile(0.0), std::domain_error);
    REQUIRE_THROWS_AS(standard_normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal quantile round-trips through the CDF") {
    for (int i = 1; i < 2000; ++i) {
        double p = i / 2000.0;
        double x = standard_normal_quantile(p);
        REQUIRE(std::fabs(standard_normal_cdf(x) - p) < 2e-14);
    }
    for (double p : {1e-12, 1e-9, 1e-6, 1e-3, 1 - 1e-3, 1 - 1e-6, 1 - 1e-9}) {
        double x = standard_normal_quantile(p);
        REQUIRE(std::fabs(standard_normal_cdf(x) - p) < 1e-12);
    }
}

TEST_CASE("normal draws have the right first moments") {
    RngStream rng(123, 5);
    const int n = 400000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.next_normal();
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    REQUIRE(std::fabs(mean) < 0.01);
    REQUIRE(std::fabs(var - 1.0) < 0.02);
}
