#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edge_space.hpp"
#include "ic_model.hpp"
#include "io.hpp"
#include "rng.hpp"

namespace icmg {

// A linear order on candidates, best first; entries are 1-based ordinals.
struct Ballot {
    std::vector<int> ranking;
};

struct Profile {
    int candidates = 0;
    std::vector<Ballot> ballots;
};

// Integer pairwise margins of a voter profile.  Coordinates follow the edge
// space convention; margin(i,j) = voters preferring i over j minus the
// reverse count, so every coordinate has the parity of the voter count.
class MarginGraph {
public:
    MarginGraph(CandidateCount ell, std::vector<long long> margins, long long voters)
        : ell_(ell.value()), m_(std::move(margins)), voters_(voters) {
        if (voters < 0) throw std::invalid_argument("MarginGraph: negative voter count");
        if (m_.size() != edge_count(ell))
            throw std::invalid_argument("MarginGraph: wrong coordinate count");
        for (long long v : m_) {
            if (v > voters || v < -voters)
                throw std::invalid_argument("MarginGraph: margin exceeds voter count");
            if (((v % 2) + 2) % 2 != voters % 2)
                throw std::invalid_argument("MarginGraph: margin parity differs from voter count");
        }
    }

    int candidates() const { return ell_; }
    long long voters() const { return voters_; }
    std::size_t size() const { return m_.size(); }

    long long margin(int i, int j) const {
        auto r = edge_index(i, j, CandidateCount(ell_));
        return r.sign * m_[r.flat];
    }
    long long operator[](std::size_t k) const { return m_[k]; }
    const std::vector<long long>& coords() const { return m_; }

    EdgeVector to_edge_vector() const {
        std::vector<double> x(m_.begin(), m_.end());
        return EdgeVector(CandidateCount(ell_), std::move(x));
    }

private:
    int ell_;
    std::vector<long long> m_;
    long long voters_;
};

// All ell! rankings in lexicographic order; the fixed enumeration used by
// ballot-index sampling and exact enumeration.
inline std::vector<std::vector<int>> all_rankings(CandidateCount ell) {
    std::vector<int> base(static_cast<std::size_t>(ell.value()));
    for (int i = 0; i < ell.value(); ++i) base[static_cast<std::size_t>(i)] = i + 1;
    std::vector<std::vector<int>> out;
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

// Uniform random linear order via an unbiased Fisher-Yates shuffle.
inline Ballot sample_ballot(RngStream& rng, CandidateCount ell) {
    int l = ell.value();
    Ballot b;
    b.ranking.resize(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) b.ranking[static_cast<std::size_t>(i)] = i + 1;
    for (int i = l - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(b.ranking[static_cast<std::size_t>(i)], b.ranking[j]);
    }
    return b;
}

namespace detail {

// position[c-1] = rank of candidate c in the ballot (0 = best).
inline void ballot_positions(const Ballot& b, int* pos) {
    for (std::size_t r = 0; r < b.ranking.size(); ++r)
        pos[b.ranking[r] - 1] = static_cast<int>(r);
}

inline void add_ballot_margins(int ell, const int* pos, long long* m, long long count = 1) {
    std::size_t k = 0;
    for (int i = 1; i <= ell; ++i)
        for (int j = i + 1; j <= ell; ++j, ++k)
            m[k] += pos[i - 1] < pos[j - 1] ? count : -count;
}

// Signed +-1 margin pattern of each ranking, in all_rankings order.
inline std::vector<std::vector<signed char>> ballot_patterns(CandidateCount ell) {
    auto rankings = all_rankings(ell);
    std::size_t m = edge_count(ell);
    std::vector<std::vector<signed char>> pats(rankings.size(),
                                               std::vector<signed char>(m));
    std::vector<int> pos(static_cast<std::size_t>(ell.value()));
    for (std::size_t t = 0; t < rankings.size(); ++t) {
        Ballot b{rankings[t]};
        ballot_positions(b, pos.data());
        std::size_t k = 0;
        for (int i = 1; i <= ell.value(); ++i)
            for (int j = i + 1; j <= ell.value(); ++j, ++k)
                pats[t][k] = pos[i - 1] < pos[j - 1] ? 1 : -1;
    }
    return pats;
}

} // namespace detail

inline MarginGraph margin_graph(const Profile& profile) {
    CandidateCount ell(profile.candidates);
    std::vector<long long> m(edge_count(ell), 0);
    std::vector<int> pos(static_cast<std::size_t>(profile.candidates));
    for (const Ballot& b : profile.ballots) {
        if (b.ranking.size() != static_cast<std::size_t>(profile.candidates))
            throw std::invalid_argument("margin_graph: ballot length mismatch");
        detail::ballot_positions(b, pos.data());
        detail::add_ballot_margins(profile.candidates, pos.data(), m.data());
    }
    return MarginGraph(ell, std::move(m), static_cast<long long>(profile.ballots.size()));
}

// Margin graph of `voters` independent uniform ballots, streamed without
// materializing the profile.  Voter count must be odd so no margin is zero.
// For ell <= 6 each voter costs one uniform draw (ballot index into the
// fixed ranking enumeration); larger ell shuffles per voter.
inline MarginGraph sample_margin_exact(RngStream& rng, CandidateCount ell, long long voters) {
    if (voters < 1 || voters % 2 == 0)
        throw std::invalid_argument("sample_margin_exact: voter count must be odd and positive");
    int l = ell.value();
    std::vector<long long> m(edge_count(ell), 0);

    if (l <= 6) {
        static const std::array<std::vector<std::vector<signed char>>, 7> tables = [] {
            std::array<std::vector<std::vector<signed char>>, 7> t;
            for (int e = 3; e <= 6; ++e)
                t[static_cast<std::size_t>(e)] = detail::ballot_patterns(CandidateCount(e));
            return t;
        }();
        const auto& pats = tables[static_cast<std::size_t>(l)];
        auto nfact = static_cast<std::uint64_t>(pats.size());
        for (long long v = 0; v < voters; ++v) {
            const auto& p = pats[rng.next_below(nfact)];
            for (std::size_t k = 0; k < m.size(); ++k) m[k] += p[k];
        }
    } else {
        std::vector<int> pos(static_cast<std::size_t>(l));
        for (long long v = 0; v < voters; ++v) {
            Ballot b = sample_ballot(rng, ell);
            detail::ballot_positions(b, pos.data());
            detail::add_ballot_margins(l, pos.data(), m.data());
        }
    }
    return MarginGraph(ell, std::move(m), voters);
}

// Draw from the limit law N(0, Sigma) directly: standard normals pushed
// through the spectral square root.  No voter count is involved; the output
// is already on the normalized scale.
inline EdgeVector sample_margin_clt(RngStream& rng, const CovarianceModel& model) {
    int l = model.candidates();
    std::size_t m = model.dimension();
    std::vector<double> w(m), out(m), fl(static_cast<std::size_t>(l));
    for (auto& v : w) v = rng.next_normal();
    detail::spectral_factor_apply_raw(l, w.data(), out.data(), fl.data());
    return EdgeVector(CandidateCount(l), std::move(out));
}

// One JSON line per margin vector: {"ell":..,"coords":[..],"voters":..}.
inline std::string margin_jsonl_line(const EdgeVector& x) {
    std::string s = "{\"ell\":" + std::to_string(x.candidates()) + ",\"coords\":[";
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k) s += ",";
        s += format_double(x[k]);
    }
    s += "],\"voters\":null}";
    return s;
}

inline std::string margin_jsonl_line(const MarginGraph& g) {
    std::string s = "{\"ell\":" + std::to_string(g.candidates()) + ",\"coords\":[";
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(g[k]);
    }
    s += "],\"voters\":" + std::to_string(g.voters()) + "}";
    return s;
}

} // namespace icmg
