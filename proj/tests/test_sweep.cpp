#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "g2g/errors.hpp"
#include "g2g/sweep.hpp"

using namespace g2g;
namespace fs = std::filesystem;

namespace {

// Self-cleaning file in the system temp dir; names are process-unique.
struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& content, const std::string& ext = ".yaml") {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("g2g_sweep_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++) + ext);
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
    std::string str() const { return path.string(); }
};

SweepConfig parse(const std::string& yaml) {
    TempFile f(yaml);
    return load_sweep_config(f.str());
}

bool rows_equal_mod_wall(const SweepRow& a, const SweepRow& b) {
    return a.algorithm == b.algorithm && a.p_psi == b.p_psi && a.p_dsep == b.p_dsep &&
           a.n == b.n && a.d == b.d && a.trial == b.trial && a.f1 == b.f1 &&
           a.precision == b.precision && a.recall == b.recall && a.perfect == b.perfect &&
           a.tests_run == b.tests_run;
}

// 200 rows of a standardized-ish linear chain a -> b -> c, deterministic noise
// from a tiny LCG so the fixture needs no files checked in.
std::string chain_csv_text() {
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    auto unit = [&] {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
    };
    std::ostringstream out;
    out << "a,b,c\n";
    for (int r = 0; r < 200; ++r) {
        const double a = unit() + unit() + unit();
        const double b = 1.7 * a + unit();
        const double c = 1.7 * b + unit();
        out << a << ',' << b << ',' << c << '\n';
    }
    return out.str();
}

const char* kChainTruth =
    "vars: a,b,c\n"
    "a b\n"
    "b c\n";

}  // namespace

TEST_CASE("sweep config parses every field") {
    const std::string yaml =
        "dataset:\n"
        "  type: synthetic\n"
        "  d: 8\n"
        "  er: 3\n"
        "  n: 250\n"
        "algorithms: [pc, pc-stable, gpc-guess]\n"
        "expert:\n"
        "  p_psi: [0.5, 0.75, 1.0]\n"
        "  p_dsep: [0.9]\n"
        "cit: channel\n"
        "alpha: 0.01\n"
        "beta: 0.1\n"
        "rpc_eta: 2\n"
        "trials: 7\n"
        "seed: 99\n"
        "output: out.csv\n";
    SweepConfig cfg = parse(yaml);
    CHECK(cfg.source == SweepConfig::Source::synthetic);
    CHECK(cfg.d == 8);
    CHECK(cfg.er_level == 3);
    CHECK(cfg.n == 250);
    CHECK(cfg.algorithms == std::vector<std::string>{"pc", "pc-stable", "gpc-guess"});
    CHECK(cfg.p_psi == std::vector<double>{0.5, 0.75, 1.0});
    CHECK(cfg.p_dsep == std::vector<double>{0.9});
    CHECK(cfg.cit == SweepConfig::Cit::channel);
    CHECK(cfg.alpha == 0.01);
    CHECK(cfg.beta == 0.1);
    CHECK(cfg.rpc_eta == 2);
    CHECK(cfg.trials == 7);
    CHECK(cfg.seed == 99);
    CHECK(cfg.seed_set);
    CHECK(cfg.output == "out.csv");
}

TEST_CASE("sweep config defaults") {
    SweepConfig cfg = parse(
        "dataset: {type: synthetic}\n"
        "algorithms: [pc]\n");
    CHECK(cfg.d == 10);
    CHECK(cfg.er_level == 1);
    CHECK(cfg.n == 100);
    CHECK(cfg.p_psi == std::vector<double>{0.5});
    CHECK(cfg.p_dsep.empty());
    CHECK(cfg.cit == SweepConfig::Cit::fisher_z);
    CHECK(cfg.alpha == 0.05);
    CHECK(cfg.beta == 0.2);
    CHECK(cfg.rpc_eta == 1);
    CHECK(cfg.trials == 30);
    CHECK_FALSE(cfg.seed_set);
}

TEST_CASE("sweep config rejects malformed input") {
    auto bad = [](const std::string& yaml) {
        CHECK_THROWS_AS(parse(yaml), ConfigError);
    };
    // typo'd keys fail loudly instead of being ignored
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\nbogus: 1\n");
    bad("dataset: {type: synthetic, dd: 4}\nalgorithms: [pc]\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\nexpert: {psi: [0.5]}\n");
    // dataset section
    bad("algorithms: [pc]\n");
    bad("dataset: {type: parquet}\nalgorithms: [pc]\n");
    bad("dataset: {type: synthetic, d: 1}\nalgorithms: [pc]\n");
    bad("dataset: {type: synthetic, n: 2}\nalgorithms: [pc]\n");
    bad("dataset: {type: csv}\nalgorithms: [pc]\n");  // no path
    bad("dataset: {type: csv, path: x.csv}\nalgorithms: [pc]\n");  // no truth
    bad("dataset: {type: csv, path: x.csv, truth: t.txt, kind: ordinal}\nalgorithms: [pc]\n");
    // algorithms
    bad("dataset: {type: synthetic}\n");
    bad("dataset: {type: synthetic}\nalgorithms: []\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc, ges]\n");
    // expert grids
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\nexpert: {p_psi: []}\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\nexpert: {p_psi: [1.5]}\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\nexpert: {p_dsep: [-0.1]}\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\n"
        "expert: {file: e.txt, p_psi: [0.5]}\n");
    // test choice vs data source
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\ncit: t-test\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\ncit: chi-square\n");
    bad("dataset: {type: csv, path: x.csv, truth: t.txt, kind: discrete}\n"
        "algorithms: [pc]\ncit: fisher-z\n");
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\ncit: channel\n"
        "alpha: 0.05\nbeta: 0.96\n");
    // trials
    bad("dataset: {type: synthetic}\nalgorithms: [pc]\ntrials: 0\n");
}

TEST_CASE("sweep config rejects an unreadable file") {
    CHECK_THROWS_AS(load_sweep_config("/nonexistent/g2g.yaml"), ConfigError);
}

TEST_CASE("run_sweep validates the assembled config") {
    SweepConfig cfg;
    cfg.cit = SweepConfig::Cit::oracle;
    cfg.d = 4;
    cfg.trials = 1;

    cfg.algorithms = {"pc", "not-an-algorithm"};
    CHECK_THROWS_AS(run_sweep(cfg, 1), ConfigError);

    cfg.algorithms = {"gpc-guess"};
    cfg.p_psi.clear();
    CHECK_THROWS_AS(run_sweep(cfg, 1), ConfigError);  // no grid, no expert file

    cfg.p_psi = {0.5};
    cfg.expert_file = "anything.txt";
    CHECK_THROWS_AS(run_sweep(cfg, 1), ConfigError);  // expert files need named csv vars
}

TEST_CASE("run_sweep emits trials x grid x algorithms rows plus aggregates") {
    SweepConfig cfg;
    cfg.cit = SweepConfig::Cit::oracle;
    cfg.d = 5;
    cfg.er_level = 1;
    cfg.algorithms = {"pc", "gpc-guess"};
    cfg.p_psi = {0.5, 1.0};
    cfg.trials = 4;
    cfg.seed = 7;

    SweepReport rep = run_sweep(cfg, 1);
    const std::size_t per_trial = 4 * 2 * 2;
    const std::size_t aggregates = 2 * 2 * 2;
    REQUIRE(rep.rows.size() == per_trial + aggregates);

    // per-trial rows first, in trial-major order; aggregates trail
    for (std::size_t i = 0; i < per_trial; ++i) {
        CHECK_FALSE(rep.rows[i].aggregate());
        CHECK(rep.rows[i].trial == std::to_string(i / 4));
    }
    for (std::size_t i = per_trial; i < rep.rows.size(); ++i)
        CHECK(rep.rows[i].aggregate());

    // aggregate pairs: mean then se for the same cell
    for (std::size_t i = per_trial; i < rep.rows.size(); i += 2) {
        CHECK(rep.rows[i].trial == "mean");
        CHECK(rep.rows[i + 1].trial == "se");
        CHECK(rep.rows[i].algorithm == rep.rows[i + 1].algorithm);
        CHECK(rep.rows[i].p_psi == rep.rows[i + 1].p_psi);
    }

    // spot-check one mean against the raw rows it summarizes
    const auto& mean = rep.rows[per_trial];
    double acc = 0;
    int hits = 0;
    for (std::size_t i = 0; i < per_trial; ++i) {
        const auto& r = rep.rows[i];
        if (r.algorithm == mean.algorithm && r.p_psi == mean.p_psi) {
            acc += r.f1;
            ++hits;
        }
    }
    CHECK(hits == 4);
    CHECK(mean.f1 == doctest::Approx(acc / 4).epsilon(1e-12));

    // oracle test + exact algorithms: every pc row recovers the skeleton
    for (std::size_t i = 0; i < per_trial; ++i)
        if (rep.rows[i].algorithm == "pc") {
            CHECK(rep.rows[i].f1 == 1.0);
            CHECK(rep.rows[i].perfect == 1.0);
        }
}

TEST_CASE("sweep results do not depend on jobs and replay bit-for-bit") {
    SweepConfig cfg;
    cfg.cit = SweepConfig::Cit::channel;
    cfg.d = 6;
    cfg.er_level = 2;
    cfg.algorithms = {"pc-stable", "gpc-guess", "rpc-approx"};
    cfg.p_psi = {0.5, 1.0};
    cfg.trials = 6;
    cfg.seed = 2024;

    SweepReport serial = run_sweep(cfg, 1);
    SweepReport threaded = run_sweep(cfg, 4);
    SweepReport replay = run_sweep(cfg, 1);

    REQUIRE(serial.rows.size() == threaded.rows.size());
    REQUIRE(serial.rows.size() == replay.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CAPTURE(i);
        CHECK(rows_equal_mod_wall(serial.rows[i], threaded.rows[i]));
        CHECK(rows_equal_mod_wall(serial.rows[i], replay.rows[i]));
    }
}

TEST_CASE("sweep csv output: pinned header, blank optionals, integer counts") {
    SweepConfig cfg;
    cfg.cit = SweepConfig::Cit::oracle;
    cfg.d = 4;
    cfg.algorithms = {"pc"};
    cfg.p_psi = {0.5};
    cfg.trials = 2;
    SweepReport rep = run_sweep(cfg, 1);

    std::ostringstream out;
    emit_csv(out, rep);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "algorithm,p_psi,p_dsep,n,d,trial,f1,precision,recall,perfect,tests_run,wall_ns");

    int data_lines = 0;
    while (std::getline(in, line)) {
        ++data_lines;
        CHECK(std::count(line.begin(), line.end(), ',') == 11);
        // pc takes no expert argument grid values beyond p_psi; p_dsep stays blank
        auto first = line.find(',');
        auto second = line.find(',', first + 1);
        auto third = line.find(',', second + 1);
        CHECK(third == second + 1);
    }
    CHECK(data_lines == 2 + 2);

    // counts print without a decimal point on per-trial rows
    std::istringstream again(out.str());
    std::getline(again, line);  // header
    std::getline(again, line);
    auto field = [&](int idx) {
        std::istringstream ls(line);
        std::string tok;
        for (int i = 0; i <= idx; ++i) std::getline(ls, tok, ',');
        return tok;
    };
    CHECK(field(10).find('.') == std::string::npos);
    CHECK(field(11).find('.') == std::string::npos);
}

TEST_CASE("sweep json rows round-trip") {
    SweepConfig cfg;
    cfg.cit = SweepConfig::Cit::oracle;
    cfg.d = 4;
    cfg.algorithms = {"pc", "gpc"};
    cfg.p_psi = {0.25};
    cfg.trials = 3;
    SweepReport rep = run_sweep(cfg, 1);

    auto rows = rows_from_json(emit_json(rep));
    REQUIRE(rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows_equal_mod_wall(rows[i], rep.rows[i]));
        CHECK(rows[i].wall_ns == rep.rows[i].wall_ns);
    }
}

TEST_CASE("emit_report writes both formats and rejects bad targets") {
    SweepConfig cfg;
    cfg.cit = SweepConfig::Cit::oracle;
    cfg.d = 3;
    cfg.algorithms = {"pc"};
    cfg.trials = 1;
    SweepReport rep = run_sweep(cfg, 1);

    TempFile csv_out("", ".csv");
    emit_report(rep, "csv", csv_out.str());
    std::ifstream in(csv_out.path);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header.rfind("algorithm,", 0) == 0);

    TempFile json_out("", ".json");
    emit_report(rep, "json", json_out.str());
    std::ifstream jin(json_out.path);
    std::stringstream buf;
    buf << jin.rdbuf();
    CHECK(rows_from_json(buf.str()).size() == rep.rows.size());

    CHECK_THROWS_AS(emit_report(rep, "xml", csv_out.str()), ConfigError);
    CHECK_THROWS_AS(emit_report(rep, "csv", "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("sweep over a csv dataset aligns truth by variable name") {
    TempFile data(chain_csv_text(), ".csv");
    // truth lists the variables in a different order than the csv header; a
    // data-driven test then only scores 1.0 if the columns were realigned
    // (an oracle run would be self-consistent under any relabeling)
    TempFile truth("vars: c,a,b\na b\nb c\n", ".txt");

    SweepConfig cfg;
    cfg.source = SweepConfig::Source::csv;
    cfg.csv_path = data.str();
    cfg.truth_path = truth.str();
    cfg.cit = SweepConfig::Cit::fisher_z;
    cfg.algorithms = {"pc-stable"};
    cfg.trials = 2;
    SweepReport rep = run_sweep(cfg, 1);
    for (const auto& r : rep.rows) {
        CHECK(r.d == 3);
        CHECK(r.n == 200);
        if (r.trial != "se") CHECK(r.f1 == 1.0);
    }

    // misread variable names must fail loudly, not silently misalign
    TempFile bad_truth("vars: a,b,z\na b\nb z\n", ".txt");
    cfg.truth_path = bad_truth.str();
    CHECK_THROWS_AS(run_sweep(cfg, 1), UnknownVariableName);
}

TEST_CASE("sweep csv subsampling feeds fisher-z the reduced sample") {
    TempFile data(chain_csv_text(), ".csv");
    TempFile truth(kChainTruth, ".txt");

    SweepConfig cfg;
    cfg.source = SweepConfig::Source::csv;
    cfg.csv_path = data.str();
    cfg.truth_path = truth.str();
    cfg.subsample_n = 80;
    cfg.cit = SweepConfig::Cit::fisher_z;
    cfg.algorithms = {"pc-stable"};
    cfg.trials = 3;
    cfg.seed = 5;
    SweepReport rep = run_sweep(cfg, 2);
    REQUIRE(rep.rows.size() == 3 + 2);
    for (const auto& r : rep.rows)
        if (!r.aggregate()) {
            CHECK(r.n == 80);
            CHECK(r.tests_run > 0);
        }
    // different trials draw different subsamples, so scores may differ but
    // the replay must not
    SweepReport again = run_sweep(cfg, 1);
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
        CHECK(rows_equal_mod_wall(rep.rows[i], again.rows[i]));
}

TEST_CASE("sweep expert file replaces the simulated guess") {
    TempFile data(chain_csv_text(), ".csv");
    TempFile truth(kChainTruth, ".txt");
    TempFile expert("EDGES: (a, b), (b, c)\n", ".txt");

    SweepConfig cfg;
    cfg.source = SweepConfig::Source::csv;
    cfg.csv_path = data.str();
    cfg.truth_path = truth.str();
    cfg.expert_file = expert.str();
    cfg.p_psi.clear();
    cfg.cit = SweepConfig::Cit::oracle;
    cfg.algorithms = {"gpc-guess", "pc-guess"};
    cfg.trials = 2;
    SweepReport rep = run_sweep(cfg, 1);

    REQUIRE(rep.rows.size() == 2 * 2 + 2 * 2);
    for (const auto& r : rep.rows) {
        CHECK_FALSE(r.p_psi.has_value());  // single grid point, no parameters
        CHECK_FALSE(r.p_dsep.has_value());
        if (r.trial != "se") CHECK(r.f1 == 1.0);  // oracle test, exact algorithms
    }
}
