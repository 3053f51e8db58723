#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"

#include "icmg/icmg.hpp"

namespace {

using nlohmann::json;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const char* bin = std::getenv("ICMG_BIN");
    REQUIRE(bin != nullptr);
    std::string tag = std::to_string(::getpid()) + "_" + std::to_string(counter++);
    std::string out_path = "/tmp/icmg_cli_out_" + tag;
    std::string err_path = "/tmp/icmg_cli_err_" + tag;
    std::string cmd = std::string("\"") + bin + "\" " + args + " >" + out_path + " 2>" + err_path;
    int rc = std::system(cmd.c_str());
    CliResult r{-1, slurp(out_path), slurp(err_path)};
    if (WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    // Good enough for our own output: quoted fields contain only commas.
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

TEST_CASE("usage errors exit with code 1") {
    CliResult none = run_cli("");
    CHECK(none.code == 1);
    CHECK(!none.err.empty());

    CliResult bogus = run_cli("covariance --bogus 3");
    CHECK(bogus.code == 1);
    CHECK(bogus.err.find("--bogus") != std::string::npos);

    CliResult low = run_cli("covariance --candidates 2");
    CHECK(low.code == 1);
    CHECK(low.err.find("--candidates") != std::string::npos);

    CliResult high = run_cli("type-probs --candidates 6 --samples 10");
    CHECK(high.code == 1);

    CliResult even = run_cli("sample-margins --candidates 3 --samples 1 --voters 4");
    CHECK(even.code == 1);
    CHECK(even.err.find("odd") != std::string::npos);

    CliResult method = run_cli("winning-sets --candidates 3 --samples 10 --method foo");
    CHECK(method.code == 1);

    CliResult missing = run_cli("exact-table1 --candidates 3");
    CHECK(missing.code == 1);
    CHECK(missing.err.find("--voters") != std::string::npos);

    CliResult even_table = run_cli("exact-table1 --candidates 3 --voters 4");
    CHECK(even_table.code == 1);
    CHECK(even_table.err.find("odd") != std::string::npos);
}

TEST_CASE("help exits with code 0") {
    CliResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("covariance") != std::string::npos);
    CHECK(help.out.find("winning-sets") != std::string::npos);

    CliResult ver = run_cli("--version");
    CHECK(ver.code == 0);
    CHECK(ver.out.find("icmg 0.1.0") != std::string::npos);
}

TEST_CASE("runtime errors exit with code 2") {
    CliResult budget = run_cli("exact-table1 --candidates 5 --voters 9");
    CHECK(budget.code == 2);
    CHECK(budget.err.find("unsupported") != std::string::npos);

    CliResult path = run_cli("eigen --output /nonexistent_dir_9q/out.json");
    CHECK(path.code == 2);
    CHECK(path.err.find("cannot open") != std::string::npos);
}

TEST_CASE("covariance emits exact rationals alongside floats") {
    CliResult r = run_cli("covariance --candidates 3");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["meta"]["command"] == "covariance");
    CHECK(j["meta"]["candidates"] == 3);
    CHECK(j["dimension"] == 3);
    CHECK(j["sigma"]["rational"][0][0] == "1");
    CHECK(j["sigma"]["rational"][0][1] == "1/3");
    CHECK(j["sigma"]["rational"][0][2] == "-1/3");
    CHECK(j["sigma"]["values"][0][1].get<double>() == Catch::Approx(1.0 / 3.0));
    CHECK(j["gamma"]["rational"][0][0] == "3/2");
    CHECK(j["gamma"]["rational"][0][1] == "-3/4");
    CHECK(j["gamma"]["values"][2][2].get<double>() == Catch::Approx(1.5));

    // Sigma * Gamma == identity, reading back the float renderings.
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            double acc = 0.0;
            for (int m = 0; m < 3; ++m)
                acc += j["sigma"]["values"][i][m].get<double>() *
                       j["gamma"]["values"][m][k].get<double>();
            CHECK(acc == Catch::Approx(i == k ? 1.0 : 0.0).margin(1e-12));
        }
    }
}

TEST_CASE("eigen reports the two eigenvalue structure") {
    CliResult r = run_cli("eigen --candidates 5");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["lambda_cycle"]["rational"] == "1/3");
    CHECK(j["lambda_cycle"]["value"].get<double>() == Catch::Approx(1.0 / 3.0));
    CHECK(j["lambda_cut"]["rational"] == "2");
    CHECK(j["lambda_cut"]["value"].get<double>() == Catch::Approx(2.0));
    CHECK(j["dim_cycle"] == 6);
    CHECK(j["dim_cut"] == 4);
    double det = std::pow(1.0 / 3.0, 6) * 16.0;
    CHECK(j["det_sigma"].get<double>() == Catch::Approx(det));
    CHECK(j["log_det_sigma"].get<double>() == Catch::Approx(std::log(det)));
}

TEST_CASE("sample-margins emits one meta line and one line per sample") {
    CliResult r = run_cli("sample-margins --candidates 3 --samples 5 --seed 42 --shards 2");
    REQUIRE(r.code == 0);
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 6);
    json meta = json::parse(lines[0]);
    CHECK(meta["meta"]["command"] == "sample-margins");
    CHECK(meta["meta"]["shards"] == 2);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        json j = json::parse(lines[i]);
        CHECK(j["ell"] == 3);
        REQUIRE(j["coords"].is_array());
        CHECK(j["coords"].size() == 3);
        CHECK(j["voters"].is_null());
    }

    CliResult again = run_cli("sample-margins --candidates 3 --samples 5 --seed 42 --shards 2");
    REQUIRE(again.code == 0);
    CHECK(again.out == r.out);

    CliResult other = run_cli("sample-margins --candidates 3 --samples 5 --seed 43 --shards 2");
    REQUIRE(other.code == 0);
    CHECK(other.out != r.out);
}

TEST_CASE("sample-margins with voters draws integer margins of the right parity") {
    CliResult r = run_cli("sample-margins --candidates 4 --samples 8 --seed 7 --voters 25");
    REQUIRE(r.code == 0);
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 9);
    json meta = json::parse(lines[0]);
    CHECK(meta["meta"]["voters"] == 25);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        json j = json::parse(lines[i]);
        CHECK(j["voters"] == 25);
        REQUIRE(j["coords"].size() == 6);
        for (const auto& c : j["coords"]) {
            REQUIRE(c.is_number_integer());
            long long v = c.get<long long>();
            CHECK(std::llabs(v) <= 25);
            CHECK((v % 2 + 2) % 2 == 1);
        }
    }
}

TEST_CASE("exact-orthant3 rows sum to one") {
    CliResult r = run_cli("exact-orthant3");
    REQUIRE(r.code == 0);
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0].rfind("# icmg", 0) == 0);
    CHECK(lines[1] == "bits,score_sequence,linearity,probability");
    double total = 0.0;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto fields = split_csv(lines[i]);
        REQUIRE(fields.size() == 4);
        total += std::stod(fields[3]);
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-12));

    CliResult js = run_cli("exact-orthant3 --format json");
    REQUIRE(js.code == 0);
    json j = json::parse(js.out);
    REQUIRE(j["rows"].size() == 8);
    double jtotal = 0.0;
    for (const auto& row : j["rows"]) jtotal += row["probability"].get<double>();
    CHECK(jtotal == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("exact-table1 reports the exact rational") {
    CliResult r = run_cli("exact-table1 --candidates 3 --voters 3 --format json");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["numerator"] == 17);
    CHECK(j["denominator"] == 18);
    CHECK(j["rounded"] == "0.94444");

    CliResult csv = run_cli("exact-table1 --candidates 3 --voters 5");
    REQUIRE(csv.code == 0);
    auto lines = lines_of(csv.out);
    REQUIRE(lines.size() == 3);
    auto fields = split_csv(lines[2]);
    REQUIRE(fields.size() == 6);
    CHECK(fields[0] == "3");
    CHECK(fields[1] == "5");
    CHECK(fields[5] == "0.93056");
}

TEST_CASE("type-probs keeps labeled and type estimates consistent") {
    CliResult r = run_cli("type-probs --candidates 3 --samples 2000 --seed 7 --format json");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["score_sequence"] == json::array({2, 1, 0}));
    CHECK(j["rows"][1]["score_sequence"] == json::array({1, 1, 1}));
    std::uint64_t counted = j["ties_skipped"].get<std::uint64_t>();
    for (const auto& row : j["rows"]) {
        counted += row["count"].get<std::uint64_t>();
        double labeled = row["labeled_prob"].get<double>();
        double type = row["type_prob"].get<double>();
        double labelings = row["num_labelings"].get<double>();
        CHECK(labeled * labelings == Catch::Approx(type).margin(1e-12));
    }
    CHECK(counted == 2000);

    CliResult csv = run_cli("type-probs --candidates 3 --samples 2000 --seed 7");
    REQUIRE(csv.code == 0);
    auto lines = lines_of(csv.out);
    REQUIRE(lines.size() >= 5);
    CHECK(lines[1].rfind("# ties_skipped=", 0) == 0);
    CHECK(lines[2] ==
          "type_id,score_sequence,linearity,num_labelings,labeled_prob,labeled_se,type_prob,"
          "type_se");
    CHECK(lines[3].rfind("T1,", 0) == 0);
}

TEST_CASE("winning-sets reports the set size histogram") {
    CliResult r = run_cli("winning-sets --candidates 3 --samples 2000 --seed 5 --method minimax");
    REQUIRE(r.code == 0);
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() >= 3);
    CHECK(lines[1] == "method,ell,set_size,count,fraction,std_err");
    CHECK(lines.back().rfind("minimax,3,multiple_winners,", 0) == 0);
    auto first = split_csv(lines[2]);
    REQUIRE(first.size() == 6);
    CHECK(first[0] == "minimax");
    CHECK(first[2] == "1");
    CHECK(std::stoull(first[3]) == 2000);

    CliResult js =
        run_cli("winning-sets --candidates 4 --samples 2000 --seed 5 --method splitcycle "
                "--format json");
    REQUIRE(js.code == 0);
    json j = json::parse(js.out);
    CHECK(j["meta"]["method"] == "splitcycle");
    REQUIRE(j["rows"].size() == 4);
    std::uint64_t total = 0;
    for (const auto& row : j["rows"]) total += row["count"].get<std::uint64_t>();
    CHECK(total == 2000);
    CHECK(j["multiple_winners"]["count"].get<std::uint64_t>() ==
          total - j["rows"][0]["count"].get<std::uint64_t>());
}

TEST_CASE("qualitative-coverage lists classes by frequency") {
    CliResult r = run_cli("qualitative-coverage --candidates 3 --samples 3000 --seed 3");
    REQUIRE(r.code == 0);
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() > 4);
    CHECK(lines[1].rfind("# distinct=", 0) == 0);
    CHECK(lines[2] == "bits,edge_rank,count,fraction,std_err");
    std::uint64_t prev = UINT64_MAX;
    std::uint64_t total = 0;
    for (std::size_t i = 3; i < lines.size(); ++i) {
        auto fields = split_csv(lines[i]);
        REQUIRE(fields.size() == 5);
        std::uint64_t c = std::stoull(fields[2]);
        CHECK(c <= prev);
        prev = c;
        total += c;
        double frac = std::stod(fields[3]);
        double se = std::stod(fields[4]);
        CHECK(se == Catch::Approx(std::sqrt(frac * (1.0 - frac) / 3000.0)));
    }
    CHECK(total <= 3000);

    CliResult again = run_cli("qualitative-coverage --candidates 3 --samples 3000 --seed 3");
    REQUIRE(again.code == 0);
    CHECK(again.out == r.out);
}

TEST_CASE("levelset points satisfy the precision form") {
    CliResult r = run_cli("levelset --candidates 3 --samples 4 --seed 9");
    REQUIRE(r.code == 0);
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 6);
    CHECK(lines[1] == "e1_2,e1_3,e2_3");
    icmg::CandidateCount ell(3);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto fields = split_csv(lines[i]);
        REQUIRE(fields.size() == 3);
        std::vector<double> coords;
        for (const auto& f : fields) coords.push_back(std::stod(f));
        icmg::EdgeVector x(ell, coords);
        double nsq = icmg::norm_sq(x);
        double cut = icmg::cut_norm_sq(x);
        double q = 3.0 * (nsq - cut) + 0.75 * cut;
        CHECK(q == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("output flag writes the same bytes to a file") {
    static int counter = 0;
    std::string path = "/tmp/icmg_cli_file_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter++) + ".json";
    CliResult direct = run_cli("eigen --candidates 4");
    REQUIRE(direct.code == 0);
    CliResult filed = run_cli("eigen --candidates 4 --output " + path);
    REQUIRE(filed.code == 0);
    CHECK(filed.out.empty());
    CHECK(slurp(path) == direct.out);
    std::remove(path.c_str());
}
