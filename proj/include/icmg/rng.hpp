#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace icmg {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Inverse of the standard normal CDF.  Rational approximation (Acklam)
// refined with one Halley step against erfc, giving ~1e-15 relative error.
inline double standard_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("standard_normal_quantile: p must lie in (0,1)");

    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    static const double sqrt_two_pi = std::sqrt(8.0 * std::atan(1.0));
    double e = 0.5 * std::erfc(-x / 1.4142135623730951) - p;
    double u = e * sqrt_two_pi * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

inline double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

// Seedable, splittable pseudo-random stream: xoshiro256++ whose state is
// derived from (seed, stream_id) through SplitMix64.  The output sequence is
// a pure function of the pair, so shards can use stream_id = shard index and
// stay independent and reproducible.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id) {
        std::uint64_t z = seed ^ (stream_id * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
        std::uint64_t mix = detail::splitmix64(z);
        std::uint64_t sm = mix;
        for (auto& w : s_) w = detail::splitmix64(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t next_u64() {
        std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on the open interval (0,1); safe as a quantile-function input.
    double next_open_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) via Lemire's multiply-with-rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0)
            throw std::domain_error("RngStream::next_below: bound must be positive");
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal draw; consumes exactly one uniform (inverse CDF).
    double next_normal() {
        return standard_normal_quantile(next_open_double());
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t s_[4];
};

} // namespace icmg
