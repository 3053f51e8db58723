#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edge_space.hpp"
#include "sampling.hpp"

namespace icmg {

// Thrown when a margin vector has a tied (zero or equal-magnitude) entry
// where a strict comparison is required.
struct tie_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Orientation of every candidate pair: one bit per edge in flat order, set
// when the lex-smaller candidate beats the larger one.
class Tournament {
public:
    explicit Tournament(CandidateCount ell)
        : ell_(ell.value()), edges_(edge_count(ell)),
          w_((edges_ + 63) / 64, 0) {}

    int candidates() const { return ell_; }
    std::size_t edges() const { return edges_; }

    bool bit(std::size_t k) const { return (w_[k >> 6] >> (k & 63)) & 1; }
    void set_bit(std::size_t k, bool v) {
        std::uint64_t mask = 1ULL << (k & 63);
        if (v) w_[k >> 6] |= mask;
        else w_[k >> 6] &= ~mask;
    }

    bool beats(int i, int j) const {
        auto r = edge_index(i, j, CandidateCount(ell_));
        bool b = bit(r.flat);
        return r.sign > 0 ? b : !b;
    }

    std::vector<int> out_degrees() const {
        std::vector<int> deg(static_cast<std::size_t>(ell_), 0);
        std::size_t k = 0;
        for (int i = 1; i <= ell_; ++i)
            for (int j = i + 1; j <= ell_; ++j, ++k)
                ++deg[static_cast<std::size_t>(bit(k) ? i : j) - 1];
        return deg;
    }

    friend bool operator==(const Tournament& a, const Tournament& b) {
        return a.ell_ == b.ell_ && a.w_ == b.w_;
    }

private:
    int ell_;
    std::size_t edges_;
    std::vector<std::uint64_t> w_;
};

inline std::string bits_string(const Tournament& t) {
    std::string s(t.edges(), '0');
    for (std::size_t k = 0; k < t.edges(); ++k)
        if (t.bit(k)) s[k] = '1';
    return s;
}

inline Tournament tournament_from_bits(const std::string& bits, CandidateCount ell) {
    if (bits.size() != edge_count(ell))
        throw std::invalid_argument("tournament_from_bits: wrong bit count");
    Tournament t(ell);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] != '0' && bits[k] != '1')
            throw std::invalid_argument("tournament_from_bits: bits must be 0/1");
        t.set_bit(k, bits[k] == '1');
    }
    return t;
}

inline Tournament tournament_of(const EdgeVector& x) {
    Tournament t(CandidateCount(x.candidates()));
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] == 0.0) throw tie_error("tournament_of: tied pair (zero margin)");
        t.set_bit(k, x[k] > 0.0);
    }
    return t;
}

inline Tournament tournament_of(const MarginGraph& g) {
    Tournament t(CandidateCount(g.candidates()));
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g[k] == 0) throw tie_error("tournament_of: tied pair (zero margin)");
        t.set_bit(k, g[k] > 0);
    }
    return t;
}

// Out-degrees sorted descending.
inline std::vector<int> score_sequence(const Tournament& t) {
    auto deg = t.out_degrees();
    std::sort(deg.begin(), deg.end(), std::greater<>());
    return deg;
}

// Sum of squared out-degrees; maximal exactly on transitive tournaments.
inline long long linearity(const Tournament& t) {
    long long s = 0;
    for (int d : t.out_degrees()) s += static_cast<long long>(d) * d;
    return s;
}

// Reverse every edge.
inline Tournament dual(const Tournament& t) {
    Tournament d(CandidateCount(t.candidates()));
    for (std::size_t k = 0; k < t.edges(); ++k) d.set_bit(k, !t.bit(k));
    return d;
}

inline std::optional<int> condorcet_winner(const Tournament& t) {
    auto deg = t.out_degrees();
    for (std::size_t c = 0; c < deg.size(); ++c)
        if (deg[c] == t.candidates() - 1) return static_cast<int>(c) + 1;
    return std::nullopt;
}

inline std::optional<int> condorcet_loser(const Tournament& t) {
    auto deg = t.out_degrees();
    for (std::size_t c = 0; c < deg.size(); ++c)
        if (deg[c] == 0) return static_cast<int>(c) + 1;
    return std::nullopt;
}

// Strict-majority winner straight from margins; no tie handling needed.
template <class G>
std::optional<int> strict_condorcet_winner(const G& g) {
    int l = g.candidates();
    for (int c = 1; c <= l; ++c) {
        bool all = true;
        for (int d = 1; d <= l && all; ++d)
            if (d != c && !(g.margin(c, d) > 0)) all = false;
        if (all) return c;
    }
    return std::nullopt;
}

inline std::optional<int> strict_condorcet_winner(const EdgeVector& x) {
    int l = x.candidates();
    for (int c = 1; c <= l; ++c) {
        bool all = true;
        for (int d = 1; d <= l && all; ++d)
            if (d != c && !(x.get(c, d) > 0.0)) all = false;
        if (all) return c;
    }
    return std::nullopt;
}

// Tournament relabeled so that new candidate a plays the role old candidate
// sigma[a-1] played.
inline Tournament relabel(const Tournament& t, const std::vector<int>& sigma) {
    int l = t.candidates();
    if (sigma.size() != static_cast<std::size_t>(l))
        throw std::invalid_argument("relabel: permutation length mismatch");
    Tournament out{CandidateCount(l)};
    std::size_t k = 0;
    for (int a = 1; a <= l; ++a)
        for (int b = a + 1; b <= l; ++b, ++k)
            out.set_bit(k, t.beats(sigma[static_cast<std::size_t>(a) - 1],
                                   sigma[static_cast<std::size_t>(b) - 1]));
    return out;
}

// Lexicographically minimal bit string over all candidate relabelings.
// Brute force over ell! permutations; capped at 7 candidates.
inline std::string canonical_form(const Tournament& t) {
    int l = t.candidates();
    if (l > 7)
        throw std::domain_error("canonical_form: unsupported above 7 candidates");
    std::vector<int> sigma(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) sigma[static_cast<std::size_t>(i)] = i + 1;
    std::string best;
    do {
        std::string s(t.edges(), '0');
        std::size_t k = 0;
        for (int a = 1; a <= l; ++a)
            for (int b = a + 1; b <= l; ++b, ++k)
                if (t.beats(sigma[static_cast<std::size_t>(a) - 1],
                            sigma[static_cast<std::size_t>(b) - 1]))
                    s[k] = '1';
        if (best.empty() || s < best) best = std::move(s);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return best;
}

// An isomorphism class of tournaments.
struct TournamentType {
    std::string canonical;
    std::vector<int> score_seq;
    long long lin = 0;
    std::uint64_t labelings = 0;
};

// All isomorphism classes at ell <= 5, from an exhaustive sweep of labeled
// tournaments.  Ordered by descending linearity, then descending score
// sequence, then canonical form.
inline std::vector<TournamentType> enumerate_types(CandidateCount ell) {
    int l = ell.value();
    if (l > 5)
        throw std::domain_error("enumerate_types: unsupported above 5 candidates");
    std::size_t m = edge_count(ell);
    std::map<std::string, std::uint64_t> classes;
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
        Tournament t(ell);
        for (std::size_t k = 0; k < m; ++k) t.set_bit(k, (bits >> k) & 1);
        ++classes[canonical_form(t)];
    }
    std::vector<TournamentType> types;
    types.reserve(classes.size());
    for (const auto& [canon, count] : classes) {
        Tournament rep = tournament_from_bits(canon, ell);
        types.push_back({canon, score_sequence(rep), linearity(rep), count});
    }
    std::sort(types.begin(), types.end(), [](const TournamentType& a, const TournamentType& b) {
        if (a.lin != b.lin) return a.lin > b.lin;
        if (a.score_seq != b.score_seq) return a.score_seq > b.score_seq;
        return a.canonical < b.canonical;
    });
    return types;
}

// A tournament together with the strict ordering of its edges by margin
// size: edge_rank[k] = rank of edge k, rank 0 = smallest |margin|.
struct QualitativeMarginGraph {
    Tournament tournament;
    std::vector<int> edge_rank;

    friend bool operator==(const QualitativeMarginGraph& a, const QualitativeMarginGraph& b) {
        return a.tournament == b.tournament && a.edge_rank == b.edge_rank;
    }
};

struct QualitativeMarginGraphHash {
    std::size_t operator()(const QualitativeMarginGraph& q) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ULL;
        };
        for (std::size_t k = 0; k < q.tournament.edges(); ++k)
            mix(q.tournament.bit(k) ? 2 : 1);
        for (int r : q.edge_rank) mix(static_cast<std::uint64_t>(r) + 3);
        return static_cast<std::size_t>(h);
    }
};

namespace detail {

template <class Get>
QualitativeMarginGraph qualitative_of_impl(int l, std::size_t m, Get&& mag, const Tournament& t) {
    std::vector<std::size_t> order(m);
    for (std::size_t k = 0; k < m; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mag(a) < mag(b); });
    for (std::size_t r = 0; r + 1 < m; ++r)
        if (mag(order[r]) == mag(order[r + 1]))
            throw tie_error("qualitative_of: tied margin magnitudes");
    std::vector<int> rank(m);
    for (std::size_t r = 0; r < m; ++r) rank[order[r]] = static_cast<int>(r);
    (void)l;
    return {t, std::move(rank)};
}

} // namespace detail

inline QualitativeMarginGraph qualitative_of(const EdgeVector& x) {
    Tournament t = tournament_of(x);
    return detail::qualitative_of_impl(
        x.candidates(), x.size(), [&](std::size_t k) { return std::fabs(x[k]); }, t);
}

inline QualitativeMarginGraph qualitative_of(const MarginGraph& g) {
    Tournament t = tournament_of(g);
    return detail::qualitative_of_impl(
        g.candidates(), g.size(),
        [&](std::size_t k) { return g[k] < 0 ? -g[k] : g[k]; }, t);
}

inline std::string tournament_json(const Tournament& t) {
    std::string s = "{\"ell\":" + std::to_string(t.candidates());
    s += ",\"bits\":\"" + bits_string(t) + "\"";
    s += ",\"score_sequence\":[";
    auto seq = score_sequence(t);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(seq[i]);
    }
    s += "],\"linearity\":" + std::to_string(linearity(t));
    if (t.candidates() <= 7)
        s += ",\"canonical\":\"" + canonical_form(t) + "\"";
    else
        s += ",\"canonical\":null";
    s += "}";
    return s;
}

} // namespace icmg
