#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "edge_space.hpp"

namespace icmg {

struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    explicit DenseMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

struct SpectralStructure {
    double lambda_cycle;
    double lambda_cut;
    std::size_t dim_cycle;
    std::size_t dim_cut;
};

struct Frac {
    long long num;
    long long den;

    std::string str() const {
        long long n = num, d = den;
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (d == 1) return std::to_string(n);
        return std::to_string(n) + "/" + std::to_string(d);
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

namespace detail {

// Sign of the coordinate of edge (a,b), a < b, read outward from vertex s.
inline int outward_sign(int a, int b, int s) { return s == a ? +1 : (s == b ? -1 : 0); }

inline int shared_vertex(int a, int b, int c, int d) {
    if (a == c || a == d) return a;
    if (b == c || b == d) return b;
    return 0;
}

} // namespace detail

// Covariance of the normalized margin vector between two edge coordinates,
// times 3 (so the value is an exact integer: 3 on the diagonal, +-1 for edge
// pairs sharing a vertex, 0 for disjoint pairs).
inline long long sigma_entry_x3(std::size_t e, std::size_t f, CandidateCount ell) {
    if (e == f) return 3;
    auto [a, b] = pair_of_flat(e, ell);
    auto [c, d] = pair_of_flat(f, ell);
    int s = detail::shared_vertex(a, b, c, d);
    if (s == 0) return 0;
    return detail::outward_sign(a, b, s) * detail::outward_sign(c, d, s);
}

// Precision matrix (inverse covariance) times (ell+1)/3, again exact:
// ell-1 on the diagonal, -+1 for edge pairs sharing a vertex, 0 otherwise.
// The off-diagonal sign is opposite to the covariance's.
inline long long gamma_entry_scaled(std::size_t e, std::size_t f, CandidateCount ell) {
    if (e == f) return ell.value() - 1;
    return -sigma_entry_x3(e, f, ell);
}

inline Frac sigma_entry_frac(std::size_t e, std::size_t f, CandidateCount ell) {
    return {sigma_entry_x3(e, f, ell), 3};
}

inline Frac gamma_entry_frac(std::size_t e, std::size_t f, CandidateCount ell) {
    return {3 * gamma_entry_scaled(e, f, ell), ell.value() + 1};
}

inline double sigma_entry(std::size_t e, std::size_t f, CandidateCount ell) {
    return static_cast<double>(sigma_entry_x3(e, f, ell)) / 3.0;
}

inline double gamma_entry(std::size_t e, std::size_t f, CandidateCount ell) {
    return 3.0 * static_cast<double>(gamma_entry_scaled(e, f, ell)) / (ell.value() + 1);
}

inline DenseMatrix covariance(CandidateCount ell) {
    std::size_t m = edge_count(ell);
    DenseMatrix s(m);
    for (std::size_t e = 0; e < m; ++e)
        for (std::size_t f = 0; f < m; ++f)
            s.at(e, f) = sigma_entry(e, f, ell);
    return s;
}

inline DenseMatrix precision(CandidateCount ell) {
    std::size_t m = edge_count(ell);
    DenseMatrix g(m);
    for (std::size_t e = 0; e < m; ++e)
        for (std::size_t f = 0; f < m; ++f)
            g.at(e, f) = gamma_entry(e, f, ell);
    return g;
}

// The covariance has exactly two eigenspaces: the cycle space with eigenvalue
// 1/3 and the cut space with eigenvalue (ell+1)/3.
inline SpectralStructure eigenstructure(CandidateCount ell) {
    auto l = static_cast<std::size_t>(ell.value());
    return {1.0 / 3.0, (ell.value() + 1) / 3.0, (l - 1) * (l - 2) / 2, l - 1};
}

// The limit law of the normalized margin vector: N(0, Sigma) on edge space.
class CovarianceModel {
public:
    explicit CovarianceModel(CandidateCount ell)
        : ell_(ell.value()), spectral_(eigenstructure(ell)) {}

    int candidates() const { return ell_; }
    std::size_t dimension() const { return edge_count(CandidateCount(ell_)); }
    const SpectralStructure& spectral() const { return spectral_; }

    double log_det_sigma() const {
        return spectral_.dim_cycle * std::log(spectral_.lambda_cycle) +
               spectral_.dim_cut * std::log(spectral_.lambda_cut);
    }
    double det_sigma() const { return std::exp(log_det_sigma()); }

private:
    int ell_;
    SpectralStructure spectral_;
};

namespace detail {

// out = sqrt(lambda_cycle) * (w - P w) + sqrt(lambda_cut) * P w, where P is
// the cut projector.  The result has covariance Sigma when w is standard
// normal.  flow must have room for ell doubles.
inline void spectral_factor_apply_raw(int ell, const double* w, double* out, double* flow) {
    flows_raw(ell, w, flow);
    double sc = std::sqrt(1.0 / 3.0);
    double su = std::sqrt((ell + 1) / 3.0);
    std::size_t k = 0;
    for (int i = 1; i <= ell; ++i)
        for (int j = i + 1; j <= ell; ++j, ++k) {
            double z = (flow[i - 1] - flow[j - 1]) / ell;
            out[k] = sc * (w[k] - z) + su * z;
        }
}

} // namespace detail

// Matrix JSON with both exact rational entries and float renderings:
// {"rational":[["1","1/3",...],...],"values":[[...],...]}.
inline std::string matrix_json_body(CandidateCount ell, bool use_precision) {
    std::size_t m = edge_count(ell);
    std::string rat = "[", val = "[";
    for (std::size_t e = 0; e < m; ++e) {
        if (e) { rat += ","; val += ","; }
        rat += "[";
        val += "[";
        for (std::size_t f = 0; f < m; ++f) {
            if (f) { rat += ","; val += ","; }
            Frac fr = use_precision ? gamma_entry_frac(e, f, ell) : sigma_entry_frac(e, f, ell);
            rat += "\"" + fr.str() + "\"";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", fr.value());
            val += buf;
        }
        rat += "]";
        val += "]";
    }
    rat += "]";
    val += "]";
    return "{\"rational\":" + rat + ",\"values\":" + val + "}";
}

// Symmetric square root of the covariance applied to w.
inline EdgeVector spectral_factor_apply(const CovarianceModel& model, const EdgeVector& w) {
    int l = model.candidates();
    if (w.candidates() != l)
        throw std::invalid_argument("spectral_factor_apply: candidate count mismatch");
    EdgeVector out{CandidateCount(l)};
    std::vector<double> fl(static_cast<std::size_t>(l));
    detail::spectral_factor_apply_raw(l, w.coords().data(), &out[0], fl.data());
    return out;
}

// Density of N(0, Sigma) at x.  The quadratic form x' Gamma x decomposes as
// 3 |cycle part|^2 + 3/(ell+1) |cut part|^2.
inline double density(const CovarianceModel& model, const EdgeVector& x) {
    int l = model.candidates();
    if (x.candidates() != l)
        throw std::invalid_argument("density: candidate count mismatch");
    double total = norm_sq(x);
    double cut = norm_sq(project_cut(x));
    double cyc = total - cut;
    if (cyc < 0.0) cyc = 0.0;
    double q = 3.0 * cyc + 3.0 / (l + 1) * cut;
    double log_norm = 0.5 * (model.dimension() * std::log(8.0 * std::atan(1.0)) +
                             model.log_det_sigma());
    return std::exp(-0.5 * q - log_norm);
}

} // namespace icmg
