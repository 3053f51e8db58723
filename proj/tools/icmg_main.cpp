#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "icmg/icmg.hpp"

namespace {

using namespace icmg;

struct Options {
    int candidates = 3;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 42;
    unsigned shards = std::max(1u, std::thread::hardware_concurrency());
    long long voters = 0;
    std::string method = "splitcycle";
    std::string format = "csv";
    std::string output = "-";
};

int write_output(const std::string& path, const std::string& body) {
    if (path == "-" || path.empty()) {
        std::cout << body;
        return std::cout ? 0 : 2;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "icmg: error: cannot open output file: " << path << "\n";
        return 2;
    }
    out << body;
    out.flush();
    if (!out) {
        std::cerr << "icmg: error: failed writing output file: " << path << "\n";
        return 2;
    }
    return 0;
}

std::string meta_comment(const std::string& command, const Options& o, bool sampling,
                         bool with_voters = false, bool with_method = false) {
    std::string s = "# icmg version=";
    s += version;
    s += " command=" + command;
    s += " candidates=" + std::to_string(o.candidates);
    if (sampling) {
        s += " samples=" + std::to_string(o.samples);
        s += " seed=" + std::to_string(o.seed);
        s += " shards=" + std::to_string(o.shards);
    }
    if (with_voters) s += " voters=" + std::to_string(o.voters);
    if (with_method) s += " method=" + o.method;
    s += "\n";
    return s;
}

std::string meta_json(const std::string& command, const Options& o, bool sampling,
                      bool with_voters = false, bool with_method = false) {
    std::string s = "{\"version\":\"";
    s += version;
    s += "\",\"command\":\"" + json_escape(command) + "\"";
    s += ",\"candidates\":" + std::to_string(o.candidates);
    if (sampling) {
        s += ",\"samples\":" + std::to_string(o.samples);
        s += ",\"seed\":" + std::to_string(o.seed);
        s += ",\"shards\":" + std::to_string(o.shards);
    }
    if (with_voters) s += ",\"voters\":" + std::to_string(o.voters);
    if (with_method) s += ",\"method\":\"" + json_escape(o.method) + "\"";
    s += "}";
    return s;
}

std::string join_scores(const std::vector<int>& seq, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(seq[i]);
    }
    return s;
}

int run_covariance(const Options& o) {
    CandidateCount ell(o.candidates);
    std::string body = "{\"meta\":" + meta_json("covariance", o, false);
    body += ",\"dimension\":" + std::to_string(edge_count(ell));
    body += ",\"sigma\":" + matrix_json_body(ell, false);
    body += ",\"gamma\":" + matrix_json_body(ell, true);
    body += "}\n";
    return write_output(o.output, body);
}

int run_eigen(const Options& o) {
    CandidateCount ell(o.candidates);
    CovarianceModel model{ell};
    SpectralStructure sp = model.spectral();
    Frac cut{o.candidates + 1, 3};
    std::string body = "{\"meta\":" + meta_json("eigen", o, false);
    body += ",\"lambda_cycle\":{\"rational\":\"1/3\",\"value\":" +
            format_double(sp.lambda_cycle) + "}";
    body += ",\"lambda_cut\":{\"rational\":\"" + cut.str() +
            "\",\"value\":" + format_double(sp.lambda_cut) + "}";
    body += ",\"dim_cycle\":" + std::to_string(sp.dim_cycle);
    body += ",\"dim_cut\":" + std::to_string(sp.dim_cut);
    body += ",\"det_sigma\":" + format_double(model.det_sigma());
    body += ",\"log_det_sigma\":" + format_double(model.log_det_sigma());
    body += "}\n";
    return write_output(o.output, body);
}

int run_sample_margins(const Options& o, bool voters_set) {
    CandidateCount ell(o.candidates);
    std::vector<std::string> chunk(o.shards);
    if (voters_set) {
        for_each_shard(o.samples, o.seed, o.shards,
                       [&](unsigned s, RngStream& rng, std::uint64_t n) {
                           std::string buf;
                           for (std::uint64_t i = 0; i < n; ++i)
                               buf += margin_jsonl_line(sample_margin_exact(rng, ell, o.voters)) +
                                      "\n";
                           chunk[s] = std::move(buf);
                       });
    } else {
        CovarianceModel model{ell};
        for_each_shard(o.samples, o.seed, o.shards,
                       [&](unsigned s, RngStream& rng, std::uint64_t n) {
                           std::string buf;
                           for (std::uint64_t i = 0; i < n; ++i)
                               buf += margin_jsonl_line(sample_margin_clt(rng, model)) + "\n";
                           chunk[s] = std::move(buf);
                       });
    }
    std::string body =
        "{\"meta\":" + meta_json("sample-margins", o, true, voters_set, false) + "}\n";
    for (auto& c : chunk) body += c;
    return write_output(o.output, body);
}

int run_type_probs(const Options& o) {
    CovarianceModel model{CandidateCount(o.candidates)};
    TypeProbTable table = estimate_type_table(model, o.samples, o.seed, o.shards);
    std::string body;
    if (o.format == "csv") {
        body = meta_comment("type-probs", o, true);
        body += "# ties_skipped=" + std::to_string(table.ties_skipped) + "\n";
        body += table.to_csv();
    } else {
        body = "{\"meta\":" + meta_json("type-probs", o, true);
        body += ",\"ties_skipped\":" + std::to_string(table.ties_skipped);
        body += ",\"rows\":[";
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& r = table.rows[i];
            if (i) body += ",";
            body += "{\"type_id\":\"T" + std::to_string(i + 1) + "\"";
            body += ",\"canonical\":\"" + r.type.canonical + "\"";
            body += ",\"score_sequence\":[" + join_scores(r.type.score_seq) + "]";
            body += ",\"linearity\":" + std::to_string(r.type.lin);
            body += ",\"num_labelings\":" + std::to_string(r.type.labelings);
            body += ",\"count\":" + std::to_string(r.count);
            body += ",\"labeled_prob\":" + format_double(r.labeled.p_hat);
            body += ",\"labeled_se\":" + format_double(r.labeled.std_err);
            body += ",\"type_prob\":" + format_double(r.type_prob.p_hat);
            body += ",\"type_se\":" + format_double(r.type_prob.std_err);
            body += "}";
        }
        body += "]}\n";
    }
    return write_output(o.output, body);
}

int run_exact_orthant3(const Options& o) {
    CandidateCount ell(3);
    std::string body;
    std::vector<std::string> rows;
    for (int bits = 0; bits < 8; ++bits) {
        Tournament t(ell);
        for (int k = 0; k < 3; ++k) t.set_bit(static_cast<std::size_t>(k), (bits >> k) & 1);
        double p = tournament_prob_exact_3(t);
        if (o.format == "csv") {
            rows.push_back(bits_string(t) + "," + csv_field(join_scores(score_sequence(t))) +
                           "," + std::to_string(linearity(t)) + "," + format_double(p));
        } else {
            rows.push_back("{\"bits\":\"" + bits_string(t) + "\",\"score_sequence\":[" +
                           join_scores(score_sequence(t)) +
                           "],\"linearity\":" + std::to_string(linearity(t)) +
                           ",\"probability\":" + format_double(p) + "}");
        }
    }
    if (o.format == "csv") {
        body = meta_comment("exact-orthant3", o, false);
        body += "bits,score_sequence,linearity,probability\n";
        for (const auto& r : rows) body += r + "\n";
    } else {
        body = "{\"meta\":" + meta_json("exact-orthant3", o, false) + ",\"rows\":[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i) body += ",";
            body += rows[i];
        }
        body += "]}\n";
    }
    return write_output(o.output, body);
}

int run_exact_table1(const Options& o) {
    CandidateCount ell(o.candidates);
    Rational p = exact_finite_prob(ell, o.voters, [](const MarginGraph& g) {
        return strict_condorcet_winner(g).has_value();
    });
    char rounded[32];
    std::snprintf(rounded, sizeof rounded, "%.5f", p.value());
    std::string body;
    if (o.format == "csv") {
        body = meta_comment("exact-table1", o, false, true);
        body += "candidates,voters,numerator,denominator,probability,rounded\n";
        body += std::to_string(o.candidates) + "," + std::to_string(o.voters) + "," +
                std::to_string(p.num) + "," + std::to_string(p.den) + "," +
                format_double(p.value()) + "," + rounded + "\n";
    } else {
        body = "{\"meta\":" + meta_json("exact-table1", o, false, true);
        body += ",\"numerator\":" + std::to_string(p.num);
        body += ",\"denominator\":" + std::to_string(p.den);
        body += ",\"probability\":" + format_double(p.value());
        body += ",\"rounded\":\"" + std::string(rounded) + "\"}\n";
    }
    return write_output(o.output, body);
}

int run_winning_sets(const Options& o) {
    CovarianceModel model{CandidateCount(o.candidates)};
    VotingMethod m = o.method == "minimax" ? VotingMethod::minimax : VotingMethod::split_cycle;
    WinningSetDistribution dist =
        winning_set_distribution(model, m, o.samples, o.seed, o.shards);
    std::string body;
    if (o.format == "csv") {
        body = meta_comment("winning-sets", o, true, false, true);
        body += dist.to_csv();
    } else {
        body = "{\"meta\":" + meta_json("winning-sets", o, true, false, true);
        body += ",\"rows\":[";
        for (std::size_t s = 0; s < dist.count_by_size.size(); ++s) {
            if (s) body += ",";
            int size = static_cast<int>(s) + 1;
            body += "{\"set_size\":" + std::to_string(size);
            body += ",\"count\":" + std::to_string(dist.count_by_size[s]);
            body += ",\"fraction\":" + format_double(dist.fraction(size));
            body += ",\"std_err\":" + format_double(dist.std_err(size)) + "}";
        }
        body += "],\"multiple_winners\":{\"count\":" + std::to_string(dist.multiple_count());
        body += ",\"fraction\":" + format_double(dist.multiple_fraction());
        body += ",\"std_err\":" + format_double(dist.multiple_std_err()) + "}}\n";
    }
    return write_output(o.output, body);
}

int run_qualitative_coverage(const Options& o) {
    CovarianceModel model{CandidateCount(o.candidates)};
    QualitativeCoverage cov = qualitative_coverage(model, o.samples, o.seed, o.shards);

    struct Row {
        std::string bits;
        std::string ranks;
        std::uint64_t count;
    };
    std::vector<Row> rows;
    rows.reserve(cov.counts.size());
    for (const auto& [q, c] : cov.counts) {
        std::vector<int> r = q.edge_rank;
        rows.push_back({bits_string(q.tournament), join_scores(r), c});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.bits != b.bits) return a.bits < b.bits;
        return a.ranks < b.ranks;
    });

    auto frac_of = [&](std::uint64_t count) {
        return static_cast<double>(count) / static_cast<double>(cov.samples);
    };
    auto se_of = [&](double p) {
        return std::sqrt(p * (1.0 - p) / static_cast<double>(cov.samples));
    };

    std::string body;
    if (o.format == "csv") {
        body = meta_comment("qualitative-coverage", o, true);
        body += "# distinct=" + std::to_string(rows.size()) +
                " ties_skipped=" + std::to_string(cov.ties_skipped) + "\n";
        body += "bits,edge_rank,count,fraction,std_err\n";
        for (const auto& r : rows) {
            double frac = frac_of(r.count);
            body += r.bits + "," + csv_field(r.ranks) + "," + std::to_string(r.count) + "," +
                    format_double(frac) + "," + format_double(se_of(frac)) + "\n";
        }
    } else {
        body = "{\"meta\":" + meta_json("qualitative-coverage", o, true);
        body += ",\"distinct\":" + std::to_string(rows.size());
        body += ",\"ties_skipped\":" + std::to_string(cov.ties_skipped);
        body += ",\"rows\":[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i) body += ",";
            double frac = frac_of(rows[i].count);
            body += "{\"bits\":\"" + rows[i].bits + "\",\"edge_rank\":[" + rows[i].ranks +
                    "],\"count\":" + std::to_string(rows[i].count) +
                    ",\"fraction\":" + format_double(frac) +
                    ",\"std_err\":" + format_double(se_of(frac)) + "}";
        }
        body += "]}\n";
    }
    return write_output(o.output, body);
}

int run_levelset(const Options& o) {
    CandidateCount ell(o.candidates);
    CovarianceModel model{ell};
    int l = o.candidates;
    std::size_t m = edge_count(ell);

    std::vector<std::string> chunk(o.shards);
    for_each_shard(o.samples, o.seed, o.shards, [&](unsigned s, RngStream& rng, std::uint64_t n) {
        std::string buf;
        std::vector<double> u(m);
        for (std::uint64_t i = 0; i < n; ++i) {
            double q = 0.0;
            EdgeVector x(ell);
            do {
                for (auto& v : u) v = rng.next_normal();
                EdgeVector w(ell, std::vector<double>(u));
                double nsq = norm_sq(w);
                double cut = cut_norm_sq(w);
                q = 3.0 * (nsq - cut) + 3.0 / (l + 1) * cut;
                x = w;
            } while (!(q > 0.0));
            double scale = 1.0 / std::sqrt(q);
            for (std::size_t k = 0; k < m; ++k) {
                if (k) buf += ",";
                buf += format_double(scale * x[k]);
            }
            buf += "\n";
        }
        chunk[s] = std::move(buf);
    });

    std::string body = meta_comment("levelset", o, true);
    for (std::size_t k = 0; k < m; ++k) {
        auto [i, j] = pair_of_flat(k, ell);
        if (k) body += ",";
        body += "e" + std::to_string(i) + "_" + std::to_string(j);
    }
    body += "\n";
    for (auto& c : chunk) body += c;
    return write_output(o.output, body);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"margin graph sampling and analysis for impartial culture elections"};
    app.set_version_flag("--version", std::string("icmg ") + version);
    app.require_subcommand(1);

    Options o;
    bool voters_set = false;

    auto odd_voters = CLI::Validator(
        [](std::string& s) -> std::string {
            long long v = 0;
            try {
                v = std::stoll(s);
            } catch (...) {
                return "not an integer";
            }
            if (v < 1 || v % 2 == 0) return "voter count must be odd and positive";
            return {};
        },
        "ODD", "odd");

    auto add_candidates = [&](CLI::App* cmd, int lo, int hi) {
        cmd->add_option("--candidates", o.candidates, "number of candidates")
            ->check(CLI::Range(lo, hi))
            ->capture_default_str();
    };
    auto add_sampling = [&](CLI::App* cmd) {
        cmd->add_option("--samples", o.samples, "number of Monte Carlo samples")
            ->check(CLI::Range(std::uint64_t(1), std::uint64_t(1) << 40))
            ->capture_default_str();
        cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
        cmd->add_option("--shards", o.shards, "independent RNG shards")
            ->check(CLI::Range(1u, 4096u))
            ->capture_default_str();
    };
    auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--output", o.output, "output file, - for stdout")
            ->capture_default_str();
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    auto* cov = app.add_subcommand("covariance", "covariance and precision matrices as JSON");
    add_candidates(cov, 3, 64);
    add_output(cov);

    auto* eig = app.add_subcommand("eigen", "spectral structure as JSON");
    add_candidates(eig, 3, 64);
    add_output(eig);

    auto* sm = app.add_subcommand("sample-margins",
                                  "random margin vectors as JSON lines; --voters draws "
                                  "finite elections, otherwise the normal limit");
    add_candidates(sm, 3, 64);
    add_sampling(sm);
    sm->add_option("--voters", o.voters, "odd voter count for finite elections")
        ->check(odd_voters);
    add_output(sm);

    auto* tp = app.add_subcommand("type-probs",
                                  "tournament type probabilities under the limit law");
    add_candidates(tp, 3, 5);
    add_sampling(tp);
    add_format(tp);
    add_output(tp);

    auto* eo = app.add_subcommand("exact-orthant3",
                                  "exact three candidate tournament probabilities");
    add_format(eo);
    add_output(eo);

    auto* et = app.add_subcommand("exact-table1",
                                  "exact majority winner probability for small elections");
    add_candidates(et, 3, 8);
    et->add_option("--voters", o.voters, "odd voter count")
        ->required()
        ->check(odd_voters);
    add_format(et);
    add_output(et);

    auto* ws = app.add_subcommand("winning-sets", "winning set size distribution");
    add_candidates(ws, 3, 64);
    add_sampling(ws);
    ws->add_option("--method", o.method, "voting method")
        ->check(CLI::IsMember({"minimax", "splitcycle"}))
        ->capture_default_str();
    add_format(ws);
    add_output(ws);

    auto* qc = app.add_subcommand("qualitative-coverage",
                                  "qualitative margin graph histogram under the limit law");
    add_candidates(qc, 3, 8);
    add_sampling(qc);
    add_format(qc);
    add_output(qc);

    auto* ls = app.add_subcommand("levelset",
                                  "points on the unit level set of the precision form");
    add_candidates(ls, 3, 64);
    add_sampling(ls);
    add_output(ls);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    voters_set = sm->count("--voters") > 0;

    try {
        if (app.got_subcommand(cov)) return run_covariance(o);
        if (app.got_subcommand(eig)) return run_eigen(o);
        if (app.got_subcommand(sm)) return run_sample_margins(o, voters_set);
        if (app.got_subcommand(tp)) return run_type_probs(o);
        if (app.got_subcommand(eo)) return run_exact_orthant3(o);
        if (app.got_subcommand(et)) return run_exact_table1(o);
        if (app.got_subcommand(ws)) return run_winning_sets(o);
        if (app.got_subcommand(qc)) return run_qualitative_coverage(o);
        if (app.got_subcommand(ls)) return run_levelset(o);
    } catch (const std::exception& e) {
        std::cerr << "icmg: error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
