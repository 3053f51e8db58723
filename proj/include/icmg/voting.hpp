#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edge_space.hpp"
#include "ic_model.hpp"
#include "io.hpp"
#include "probability.hpp"
#include "sampling.hpp"
#include "shards.hpp"

namespace icmg {

namespace detail {

// M is the ell x ell signed margin matrix, row-major, M[a*ell+b] =
// margin(a+1, b+1).  Only strictly positive margins count as edges.

template <class V>
std::vector<int> minimax_core(int ell, const std::vector<V>& M) {
    std::vector<V> worst(static_cast<std::size_t>(ell), V(0));
    for (int c = 0; c < ell; ++c) {
        V w(0);
        for (int o = 0; o < ell; ++o) {
            V m = M[static_cast<std::size_t>(o) * ell + c];
            if (m > w) w = m;
        }
        worst[static_cast<std::size_t>(c)] = w;
    }
    V best = *std::min_element(worst.begin(), worst.end());
    std::vector<int> winners;
    for (int c = 0; c < ell; ++c)
        if (!(worst[static_cast<std::size_t>(c)] > best)) winners.push_back(c + 1);
    return winners;
}

// Widest-path strengths over positive-margin edges: S[a][b] = max over
// directed paths a -> b of the minimum margin along the path, 0 if none.
template <class V>
std::vector<V> widest_path_strengths(int ell, const std::vector<V>& M) {
    auto n = static_cast<std::size_t>(ell);
    std::vector<V> S(n * n, V(0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && M[a * n + b] > V(0)) S[a * n + b] = M[a * n + b];
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < n; ++a) {
            V sak = S[a * n + k];
            if (!(sak > V(0))) continue;
            for (std::size_t b = 0; b < n; ++b) {
                V through = std::min(sak, S[k * n + b]);
                if (through > S[a * n + b]) S[a * n + b] = through;
            }
        }
    return S;
}

template <class V>
std::vector<int> split_cycle_core(int ell, const std::vector<V>& M) {
    auto n = static_cast<std::size_t>(ell);
    std::vector<V> S = widest_path_strengths(ell, M);
    std::vector<int> winners;
    for (std::size_t a = 0; a < n; ++a) {
        bool defeated = false;
        for (std::size_t b = 0; b < n && !defeated; ++b) {
            if (b == a) continue;
            V m = M[b * n + a];
            if (m > V(0) && m > S[a * n + b]) defeated = true;
        }
        if (!defeated) winners.push_back(static_cast<int>(a) + 1);
    }
    return winners;
}

inline std::vector<long long> margin_matrix(const MarginGraph& g) {
    auto n = static_cast<std::size_t>(g.candidates());
    std::vector<long long> M(n * n, 0);
    for (int i = 1; i <= g.candidates(); ++i)
        for (int j = 1; j <= g.candidates(); ++j)
            if (i != j)
                M[static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1)] =
                    g.margin(i, j);
    return M;
}

inline std::vector<double> margin_matrix(const EdgeVector& x) {
    auto n = static_cast<std::size_t>(x.candidates());
    std::vector<double> M(n * n, 0.0);
    for (int i = 1; i <= x.candidates(); ++i)
        for (int j = 1; j <= x.candidates(); ++j)
            if (i != j)
                M[static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1)] =
                    x.get(i, j);
    return M;
}

} // namespace detail

// Candidates minimizing their worst pairwise defeat.
inline std::vector<int> minimax_winners(const MarginGraph& g) {
    return detail::minimax_core(g.candidates(), detail::margin_matrix(g));
}
inline std::vector<int> minimax_winners(const EdgeVector& x) {
    return detail::minimax_core(x.candidates(), detail::margin_matrix(x));
}

// Split Cycle: b defeats a when margin(b,a) > 0 and margin(b,a) exceeds the
// widest-path strength from a back to b; winners are the undefeated
// candidates (always at least one).
inline std::vector<int> split_cycle_winners(const MarginGraph& g) {
    return detail::split_cycle_core(g.candidates(), detail::margin_matrix(g));
}
inline std::vector<int> split_cycle_winners(const EdgeVector& x) {
    return detail::split_cycle_core(x.candidates(), detail::margin_matrix(x));
}

enum class VotingMethod { minimax, split_cycle };

inline std::string method_name(VotingMethod m) {
    return m == VotingMethod::minimax ? "minimax" : "splitcycle";
}

struct WinningSetDistribution {
    std::string method;
    int ell = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t shards = 1;
    std::vector<std::uint64_t> count_by_size; // index s-1 = sets of size s

    double fraction(int size) const {
        return static_cast<double>(count_by_size[static_cast<std::size_t>(size) - 1]) /
               static_cast<double>(samples);
    }
    double std_err(int size) const {
        double p = fraction(size);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    }
    std::uint64_t multiple_count() const {
        std::uint64_t total = 0;
        for (std::size_t s = 1; s < count_by_size.size(); ++s) total += count_by_size[s];
        return total;
    }
    double multiple_fraction() const {
        return static_cast<double>(multiple_count()) / static_cast<double>(samples);
    }
    double multiple_std_err() const {
        double p = multiple_fraction();
        return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    }

    std::string to_csv() const {
        std::string out = "method,ell,set_size,count,fraction,std_err\n";
        for (std::size_t s = 0; s < count_by_size.size(); ++s) {
            out += method + "," + std::to_string(ell) + "," + std::to_string(s + 1) + "," +
                   std::to_string(count_by_size[s]) + "," +
                   format_double(fraction(static_cast<int>(s) + 1)) + "," +
                   format_double(std_err(static_cast<int>(s) + 1)) + "\n";
        }
        out += method + "," + std::to_string(ell) + ",multiple_winners," +
               std::to_string(multiple_count()) + "," + format_double(multiple_fraction()) +
               "," + format_double(multiple_std_err()) + "\n";
        return out;
    }
};

// Distribution of winning-set sizes under the limit law.
inline WinningSetDistribution winning_set_distribution(const CovarianceModel& model,
                                                       VotingMethod method,
                                                       std::uint64_t samples,
                                                       std::uint64_t seed, unsigned shards) {
    auto l = static_cast<std::size_t>(model.candidates());
    std::vector<std::vector<std::uint64_t>> slot(shards);
    for_each_shard(samples, seed, shards, [&](unsigned s, RngStream& rng, std::uint64_t n) {
        std::vector<std::uint64_t> counts(l, 0);
        for (std::uint64_t i = 0; i < n; ++i) {
            EdgeVector x = sample_margin_clt(rng, model);
            auto w = method == VotingMethod::minimax ? minimax_winners(x)
                                                     : split_cycle_winners(x);
            ++counts[w.size() - 1];
        }
        slot[s] = std::move(counts);
    });

    WinningSetDistribution dist;
    dist.method = method_name(method);
    dist.ell = model.candidates();
    dist.samples = samples;
    dist.seed = seed;
    dist.shards = shards;
    dist.count_by_size.assign(l, 0);
    for (unsigned s = 0; s < shards; ++s)
        for (std::size_t k = 0; k < l; ++k) dist.count_by_size[k] += slot[s][k];
    return dist;
}

} // namespace icmg
