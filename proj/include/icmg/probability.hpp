#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "edge_space.hpp"
#include "ic_model.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "shards.hpp"
#include "tournaments.hpp"

namespace icmg {

struct ProbEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t shards = 1;
};

namespace detail {

inline ProbEstimate wald(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed,
                         std::uint64_t shards) {
    double p = samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0;
    double se = samples ? std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) : 0.0;
    return {p, se, samples, seed, shards};
}

} // namespace detail

// Exact positive-orthant probability of a centered trivariate normal with
// the given correlations: 1/8 + (asin r12 + asin r13 + asin r23) / (4 pi).
inline double orthant_exact_3(double r12, double r13, double r23) {
    auto bad = [](double r) { return !(r >= -1.0 && r <= 1.0); };
    if (bad(r12) || bad(r13) || bad(r23))
        throw std::domain_error("orthant_exact_3: correlations must lie in [-1,1]");
    double det = 1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23;
    if (det < -1e-12)
        throw std::domain_error("orthant_exact_3: correlation matrix not positive semidefinite");
    double pi = 4.0 * std::atan(1.0);
    return 0.125 + (std::asin(r12) + std::asin(r13) + std::asin(r23)) / (4.0 * pi);
}

// Exact limit probability of a fixed 3-candidate tournament: the orthant of
// the trivariate normal picked out by its edge orientations.
inline double tournament_prob_exact_3(const Tournament& t) {
    if (t.candidates() != 3)
        throw std::domain_error("tournament_prob_exact_3: needs exactly 3 candidates");
    double s0 = t.bit(0) ? 1.0 : -1.0;
    double s1 = t.bit(1) ? 1.0 : -1.0;
    double s2 = t.bit(2) ? 1.0 : -1.0;
    return orthant_exact_3(s0 * s1 / 3.0, -s0 * s2 / 3.0, s1 * s2 / 3.0);
}

// Monte Carlo probability of an event under the limit law, single stream.
template <class Event>
ProbEstimate estimate_event(const CovarianceModel& model, std::uint64_t samples,
                            RngStream& rng, Event&& event) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i)
        if (event(sample_margin_clt(rng, model))) ++hits;
    return detail::wald(hits, samples, rng.seed(), 1);
}

// Sharded variant: shard s draws from stream (seed, s); counts are merged
// in shard order.
template <class Event>
ProbEstimate estimate_event(const CovarianceModel& model, std::uint64_t samples,
                            std::uint64_t seed, unsigned shards, Event&& event) {
    std::vector<std::uint64_t> hits(shards, 0);
    for_each_shard(samples, seed, shards, [&](unsigned s, RngStream& rng, std::uint64_t n) {
        std::uint64_t h = 0;
        for (std::uint64_t i = 0; i < n; ++i)
            if (event(sample_margin_clt(rng, model))) ++h;
        hits[s] = h;
    });
    std::uint64_t total = 0;
    for (std::uint64_t h : hits) total += h;
    return detail::wald(total, samples, seed, shards);
}

struct TypeProbRow {
    TournamentType type;
    std::uint64_t count = 0;
    ProbEstimate labeled;
    ProbEstimate type_prob;
};

struct TypeProbTable {
    int ell = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t shards = 1;
    std::uint64_t ties_skipped = 0;
    std::vector<TypeProbRow> rows;

    std::string to_csv() const {
        std::string out = "type_id,score_sequence,linearity,num_labelings,"
                          "labeled_prob,labeled_se,type_prob,type_se\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            std::string seq;
            for (std::size_t k = 0; k < r.type.score_seq.size(); ++k) {
                if (k) seq += ",";
                seq += std::to_string(r.type.score_seq[k]);
            }
            out += "T" + std::to_string(i + 1) + "," + csv_field(seq) + "," +
                   std::to_string(r.type.lin) + "," + std::to_string(r.type.labelings) + "," +
                   format_double(r.labeled.p_hat) + "," + format_double(r.labeled.std_err) + "," +
                   format_double(r.type_prob.p_hat) + "," + format_double(r.type_prob.std_err) +
                   "\n";
        }
        return out;
    }
};

// Monte Carlo distribution over tournament isomorphism classes under the
// limit law.  Rows inherit the enumeration order (descending linearity,
// then descending score sequence), so type ids are stable across seeds.
inline TypeProbTable estimate_type_table(const CovarianceModel& model, std::uint64_t samples,
                                         std::uint64_t seed, unsigned shards) {
    int l = model.candidates();
    if (l > 5)
        throw std::domain_error("estimate_type_table: unsupported above 5 candidates");
    CandidateCount ell(l);
    auto types = enumerate_types(ell);
    std::size_t m = edge_count(ell);

    std::unordered_map<std::string, std::uint32_t> row_of;
    for (std::uint32_t i = 0; i < types.size(); ++i) row_of[types[i].canonical] = i;
    std::vector<std::uint32_t> type_of(1u << m);
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
        Tournament t(ell);
        for (std::size_t k = 0; k < m; ++k) t.set_bit(k, (bits >> k) & 1);
        type_of[bits] = row_of.at(canonical_form(t));
    }

    std::vector<std::vector<std::uint64_t>> slot(shards);
    for_each_shard(samples, seed, shards, [&](unsigned s, RngStream& rng, std::uint64_t n) {
        std::vector<std::uint64_t> counts(types.size() + 1, 0);
        for (std::uint64_t i = 0; i < n; ++i) {
            EdgeVector x = sample_margin_clt(rng, model);
            std::uint32_t bits = 0;
            bool tie = false;
            for (std::size_t k = 0; k < m; ++k) {
                if (x[k] == 0.0) { tie = true; break; }
                if (x[k] > 0.0) bits |= 1u << k;
            }
            if (tie) ++counts[types.size()];
            else ++counts[type_of[bits]];
        }
        slot[s] = std::move(counts);
    });

    std::vector<std::uint64_t> counts(types.size() + 1, 0);
    for (unsigned s = 0; s < shards; ++s)
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += slot[s][i];

    TypeProbTable table;
    table.ell = l;
    table.samples = samples;
    table.seed = seed;
    table.shards = shards;
    table.ties_skipped = counts[types.size()];
    for (std::size_t i = 0; i < types.size(); ++i) {
        TypeProbRow row;
        row.type = types[i];
        row.count = counts[i];
        row.type_prob = detail::wald(counts[i], samples, seed, shards);
        row.labeled = row.type_prob;
        row.labeled.p_hat /= static_cast<double>(types[i].labelings);
        row.labeled.std_err /= static_cast<double>(types[i].labelings);
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// Exact probability of an event on the margin graph of `voters` i.i.d.
// uniform ballots, by enumerating ballot-count multisets with multinomial
// weights.  Feasible while (ell!)^voters <= 1e8.
template <class Event>
Rational exact_finite_prob(CandidateCount ell, long long voters, Event&& event) {
    if (voters < 1) throw std::invalid_argument("exact_finite_prob: need at least one voter");
    auto pats = detail::ballot_patterns(ell);
    auto m = static_cast<long long>(pats.size());

    long double budget = 1.0L;
    for (long long v = 0; v < voters; ++v) {
        budget *= static_cast<long double>(m);
        if (budget > 1e8L)
            throw std::domain_error("exact_finite_prob: unsupported size, (ell!)^voters exceeds 1e8");
    }

    std::vector<std::vector<std::uint64_t>> choose(
        static_cast<std::size_t>(voters) + 1,
        std::vector<std::uint64_t>(static_cast<std::size_t>(voters) + 1, 0));
    for (std::size_t i = 0; i <= static_cast<std::size_t>(voters); ++i) {
        choose[i][0] = 1;
        for (std::size_t k = 1; k <= i; ++k)
            choose[i][k] = choose[i - 1][k - 1] + (k <= i - 1 ? choose[i - 1][k] : 0);
    }

    std::size_t edges = edge_count(ell);
    std::vector<long long> marg(edges, 0);
    std::uint64_t hits = 0;

    auto add = [&](std::size_t type, long long k) {
        for (std::size_t e = 0; e < edges; ++e) marg[e] += k * pats[type][e];
    };

    auto rec = [&](auto&& self, std::size_t type, long long rem, std::uint64_t ways) -> void {
        if (type + 1 == pats.size()) {
            add(type, rem);
            MarginGraph g(ell, marg, voters);
            if (event(g)) hits += ways;
            add(type, -rem);
            return;
        }
        for (long long k = 0; k <= rem; ++k) {
            std::uint64_t w = ways * choose[static_cast<std::size_t>(rem)][static_cast<std::size_t>(k)];
            if (k) add(type, k);
            self(self, type + 1, rem - k, w);
            if (k) add(type, -k);
        }
    };
    rec(rec, 0, voters, 1);

    std::uint64_t den = 1;
    for (long long v = 0; v < voters; ++v) den *= static_cast<std::uint64_t>(m);
    return Rational(static_cast<long long>(hits), static_cast<long long>(den));
}

struct QualitativeCoverage {
    int ell = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t shards = 1;
    std::uint64_t ties_skipped = 0;
    std::unordered_map<QualitativeMarginGraph, std::uint64_t, QualitativeMarginGraphHash> counts;
};

// Histogram of qualitative margin graphs (tournament + edge strength order)
// under the limit law.
inline QualitativeCoverage qualitative_coverage(const CovarianceModel& model,
                                                std::uint64_t samples, std::uint64_t seed,
                                                unsigned shards) {
    using Map = std::unordered_map<QualitativeMarginGraph, std::uint64_t,
                                   QualitativeMarginGraphHash>;
    std::vector<Map> slot(shards);
    std::vector<std::uint64_t> ties(shards, 0);
    for_each_shard(samples, seed, shards, [&](unsigned s, RngStream& rng, std::uint64_t n) {
        Map local;
        for (std::uint64_t i = 0; i < n; ++i) {
            EdgeVector x = sample_margin_clt(rng, model);
            try {
                ++local[qualitative_of(x)];
            } catch (const tie_error&) {
                ++ties[s];
            }
        }
        slot[s] = std::move(local);
    });

    QualitativeCoverage cov;
    cov.ell = model.candidates();
    cov.samples = samples;
    cov.seed = seed;
    cov.shards = shards;
    for (unsigned s = 0; s < shards; ++s) {
        cov.ties_skipped += ties[s];
        for (const auto& [k, v] : slot[s]) cov.counts[k] += v;
    }
    return cov;
}

} // namespace icmg
