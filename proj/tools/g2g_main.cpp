#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "g2g/citest.hpp"
#include "g2g/discovery.hpp"
#include "g2g/errors.hpp"
#include "g2g/expert.hpp"
#include "g2g/metrics.hpp"
#include "g2g/phi.hpp"
#include "g2g/sweep.hpp"

namespace {

using namespace g2g;

std::uint64_t env_seed_or(std::uint64_t fallback) {
    if (const char* s = std::getenv("G2G_SEED")) {
        try {
            return std::stoull(s);
        } catch (...) {
            throw ConfigError("G2G_SEED is not an integer");
        }
    }
    return fallback;
}

Dag fixture_graph(const std::string& name) {
    if (name == "chain4") return Dag(4, {{0, 1}, {1, 2}, {2, 3}});
    if (name == "collider4") return Dag(4, {{0, 2}, {1, 2}});
    if (name == "commoncause4") return Dag(4, {{0, 1}, {0, 2}, {0, 3}});
    throw ConfigError("unknown fixture graph '" + name + "'");
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw ConfigError("empty grid");
    return out;
}

std::vector<int> parse_ints(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

void write_audit_csv(std::ostream& out, const std::string& metric,
                     const std::vector<AuditPoint>& pts) {
    out << "p,metric,mean,ci_low,ci_high,trials,flag\n";
    for (const auto& pt : pts) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6g,%s,%.6g,%.6g,%.6g,%llu,%d\n", pt.p,
                      metric.c_str(), pt.mean, pt.ci_low, pt.ci_high,
                      static_cast<unsigned long long>(pt.trials), pt.violation ? 1 : 0);
        out << buf;
    }
}

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
              int jobs, const std::string& format, const std::string& output_flag) {
    SweepConfig cfg = load_sweep_config(config_path);
    if (seed_flag)
        cfg.seed = *seed_flag;
    else if (!cfg.seed_set)
        cfg.seed = env_seed_or(cfg.seed);
    SweepReport report = run_sweep(cfg, jobs);
    std::string out_path = !output_flag.empty() ? output_flag : cfg.output;
    if (out_path.empty()) {
        if (format == "csv")
            emit_csv(std::cout, report);
        else
            std::cout << emit_json(report) << "\n";
    } else {
        emit_report(report, format, out_path);
        std::cerr << "wrote " << report.rows.size() << " rows to " << out_path << "\n";
    }
    return 0;
}

int cmd_discover(const std::string& data_path, const std::string& algo,
                 const std::string& cit_name, const std::string& expert_path,
                 double alpha, int subsample_n, std::uint64_t seed, int rpc_eta,
                 const std::string& truth_path, const std::string& json_path) {
    const auto kind = cit_name == "chi-square" ? Dataset::Kind::discrete
                                               : Dataset::Kind::continuous;
    Dataset ds = load_csv(data_path, kind);
    Rng rng(Rng::derive(seed, 0));
    if (subsample_n > 0 && subsample_n < ds.n()) {
        Rng srng(Rng::derive(seed, 1));
        ds = subsample(ds, subsample_n, srng);
    }
    std::unique_ptr<CitEngine> cit;
    if (cit_name == "fisher-z")
        cit = std::make_unique<FisherZ>(ds, alpha);
    else if (cit_name == "chi-square")
        cit = std::make_unique<ChiSquare>(ds, alpha);
    else
        throw ConfigError("discover supports fisher-z or chi-square");

    const int d = ds.d();
    DiscoveryResult res;
    if (algo == "pc-guess" || algo == "gpc-guess") {
        ExpertPrediction pred{load_expert_skeleton(expert_path, ds.names), nullptr};
        res = algo == "pc-guess" ? pc_guess(*cit, d, pred, rng)
                                 : gpc_guess(*cit, d, pred, rng);
    } else if (algo == "pc" || algo == "pc-stable" || algo == "rpc-approx") {
        auto O = uniform_edge_order(Skeleton::complete(d), rng);
        UniformSubsetPolicy policy(rng);
        if (algo == "pc")
            res = pc_skeleton(*cit, d, O, policy);
        else if (algo == "pc-stable")
            res = pc_stable(*cit, d, O, policy);
        else
            res = rpc_approx(*cit, d, std::min(rpc_eta, d - 2), O, policy);
    } else if (algo == "gpc") {
        res = gpc_baseline(*cit, d, rng);
    } else {
        throw ConfigError("unknown algorithm '" + algo + "'");
    }

    std::cout << "recovered skeleton (" << res.skeleton.edge_count() << " edges, "
              << res.tests_run << " tests):\n";
    for (auto [a, b] : res.skeleton.edges())
        std::cout << "  " << ds.names[a] << " -- " << ds.names[b] << "\n";
    if (!truth_path.empty()) {
        auto truth = skeleton_from_edge_list(read_edge_list_file(truth_path));
        auto score = skeleton_f1(res.skeleton, truth);
        std::printf("f1=%.6g precision=%.6g recall=%.6g perfect=%d\n", score.f1,
                    score.precision, score.recall,
                    perfect_recovery(res.skeleton, truth) ? 1 : 0);
    }
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw IoError("cannot write " + json_path);
        out << to_json(res, ds.names) << "\n";
    }
    return 0;
}

int cmd_audit_monotonicity(const std::string& graph, int er_d, int er_level,
                           const std::string& algo_name, const std::string& grid_csv,
                           const std::string& mode, double alpha, double beta, int n,
                           std::uint64_t trials, std::uint64_t seed,
                           const std::string& output) {
    const GuidedAlgo algo =
        algo_name == "pc-guess" ? GuidedAlgo::pc_guess : GuidedAlgo::gpc_guess;
    const auto grid = parse_grid(grid_csv);
    std::vector<AuditPoint> pts;
    std::string metric;
    if (mode == "channel") {
        Dag truth = graph == "er" ? [&] {
            Rng r(Rng::derive(seed, 999));
            return sample_er_dag(er_d, er_level, r);
        }() : fixture_graph(graph);
        pts = monotonicity_audit_channel(truth, algo, grid, alpha, beta, trials, seed);
        metric = "perfect";
    } else if (mode == "data") {
        Dag truth = graph == "er" ? [&] {
            Rng r(Rng::derive(seed, 999));
            return sample_er_dag(er_d, er_level, r);
        }() : fixture_graph(graph);
        Rng wr(Rng::derive(seed, 998));
        WeightedDag wd = sample_weights(truth, wr);
        pts = monotonicity_audit_data(wd, algo, grid, n, alpha, trials, seed);
        metric = "f1";
    } else {
        throw ConfigError("mode must be channel or data");
    }
    bool any_violation = false;
    for (const auto& pt : pts) any_violation |= pt.violation;
    if (output.empty()) {
        write_audit_csv(std::cout, metric, pts);
    } else {
        std::ofstream out(output);
        if (!out) throw IoError("cannot write " + output);
        write_audit_csv(out, metric, pts);
    }
    return any_violation ? 1 : 0;
}

int cmd_audit_runtime(const std::string& graph, const std::string& edge_csv,
                      const std::string& pool_csv, int k, const std::string& grid_csv,
                      double alpha, double beta, std::uint64_t reps, std::uint64_t seed,
                      const std::string& output) {
    Dag truth = fixture_graph(graph);
    auto edge_v = parse_ints(edge_csv);
    if (edge_v.size() != 2) throw ConfigError("--edge needs 'i,j'");
    auto pool = parse_ints(pool_csv);
    auto grid = parse_grid(grid_csv);
    auto pts = runtime_audit(truth, {edge_v[0], edge_v[1]}, pool, k, grid, alpha, beta,
                             reps, seed);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) throw IoError("cannot write " + output);
        out = &file;
    }
    *out << "p,metric,mean,ci_low,ci_high,trials,flag\n";
    for (std::size_t g = 0; g < pts.size(); ++g) {
        // flag a mean that rose versus the previous grid point by > 2 pooled SE
        bool flag = false;
        if (g > 0) {
            const double pooled = std::sqrt(pts[g].se * pts[g].se +
                                            pts[g - 1].se * pts[g - 1].se);
            flag = pts[g].mean_tests > pts[g - 1].mean_tests + 2.0 * pooled;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6g,tests,%.6g,%.6g,%.6g,%llu,%d\n",
                      pts[g].p_dsep, pts[g].mean_tests,
                      pts[g].mean_tests - 1.96 * pts[g].se,
                      pts[g].mean_tests + 1.96 * pts[g].se,
                      static_cast<unsigned long long>(pts[g].reps), flag ? 1 : 0);
        *out << buf;
    }
    return 0;
}

int cmd_oracle_check(int d, int graphs, std::uint64_t seed) {
    const std::vector<double> p_grid = {0.0, 0.5, 1.0};
    const std::vector<std::string> algos = {"pc", "pc-stable", "rpc-approx", "pc-guess",
                                            "gpc-guess"};
    std::uint64_t runs = 0, failures = 0;
    for (int g = 0; g < graphs; ++g) {
        const std::uint64_t gs = Rng::derive(seed, g);
        Rng graph_rng(Rng::derive(gs, 0));
        Dag truth = sample_er_dag(d, g % 2 ? 3 : 1, graph_rng);
        Skeleton target = skeleton_of(truth);
        OracleCit cit(truth);
        for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
            for (std::size_t a = 0; a < algos.size(); ++a) {
                Rng rng(Rng::derive(gs, 100 + pi * 10 + a));
                DiscoveryResult res;
                if (algos[a] == "pc-guess" || algos[a] == "gpc-guess") {
                    Rng ex(Rng::derive(gs, 200 + pi));
                    ExpertPrediction pred{simulate_edge_expert(target, p_grid[pi], ex),
                                          nullptr};
                    res = algos[a] == "pc-guess" ? pc_guess(cit, d, pred, rng)
                                                 : gpc_guess(cit, d, pred, rng);
                } else {
                    auto O = uniform_edge_order(Skeleton::complete(d), rng);
                    UniformSubsetPolicy policy(rng);
                    if (algos[a] == "pc")
                        res = pc_skeleton(cit, d, O, policy);
                    else if (algos[a] == "pc-stable")
                        res = pc_stable(cit, d, O, policy);
                    else
                        res = rpc_approx(cit, d, d - 2, O, policy);
                }
                ++runs;
                if (!(res.skeleton == target)) {
                    ++failures;
                    std::cerr << "mismatch: graph " << g << " p=" << p_grid[pi]
                              << " algo=" << algos[a] << "\n";
                }
            }
        }
    }
    std::cout << "oracle-check: " << runs << " runs on " << graphs << " graphs (d=" << d
              << "), " << failures << " failures\n";
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guess2graph: expert-guided causal skeleton discovery"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a config file");
    std::string config_path, sweep_format = "csv", sweep_output;
    std::optional<std::uint64_t> seed_flag;
    int jobs = 0;
    sweep->add_option("--config", config_path, "YAML sweep config")->required();
    sweep->add_option("--seed", seed_flag, "master seed (overrides config)");
    sweep->add_option("--jobs", jobs, "worker cap (default: all cores)");
    sweep->add_option("--format", sweep_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--output", sweep_output, "output path (overrides config)");

    // discover
    auto* discover = app.add_subcommand("discover", "one skeleton discovery run on a csv");
    std::string data_path, algo, cit_name = "fisher-z", expert_path, truth_path, json_path;
    double alpha = 0.05;
    int subsample_n = 0, rpc_eta = 1;
    std::uint64_t dseed = 0;
    discover->add_option("--data", data_path, "csv with header row")->required();
    discover->add_option("--algo", algo, "pc|pc-stable|rpc-approx|pc-guess|gpc|gpc-guess")
        ->required();
    discover->add_option("--cit", cit_name, "fisher-z|chi-square")
        ->check(CLI::IsMember({"fisher-z", "chi-square"}));
    discover->add_option("--expert", expert_path, "expert skeleton file (guided algos)");
    discover->add_option("--alpha", alpha, "test level");
    discover->add_option("--subsample", subsample_n, "rows drawn without replacement");
    discover->add_option("--seed", dseed, "seed for orderings/subsampling");
    discover->add_option("--rpc-eta", rpc_eta, "level cap for rpc-approx");
    discover->add_option("--truth", truth_path, "edge-list file to score against");
    discover->add_option("--json", json_path, "write the full result as JSON");

    // audit-monotonicity
    auto* amon = app.add_subcommand("audit-monotonicity",
                                    "metric-vs-accuracy curve with paired seeds");
    std::string am_graph = "chain4", am_algo = "gpc-guess", am_grid = "0.5,0.75,1.0";
    std::string am_mode = "channel", am_output;
    int am_d = 10, am_er = 1, am_n = 100;
    double am_alpha = 0.05, am_beta = 0.2;
    std::uint64_t am_trials = 500, am_seed = 0;
    amon->add_option("--graph", am_graph, "chain4|collider4|commoncause4|er");
    amon->add_option("--d", am_d, "vertices (er graph)");
    amon->add_option("--er", am_er, "expected edges per vertex (er graph)");
    amon->add_option("--algo", am_algo, "pc-guess|gpc-guess")
        ->check(CLI::IsMember({"pc-guess", "gpc-guess"}));
    amon->add_option("--grid", am_grid, "comma-separated p_psi grid");
    amon->add_option("--mode", am_mode, "channel|data")
        ->check(CLI::IsMember({"channel", "data"}));
    amon->add_option("--alpha", am_alpha, "channel false-dependence rate / test level");
    amon->add_option("--beta", am_beta, "channel false-independence rate");
    amon->add_option("--n", am_n, "sample size (data mode)");
    amon->add_option("--trials", am_trials, "trials per grid point");
    amon->add_option("--seed", am_seed, "master seed");
    amon->add_option("--output", am_output, "csv path (default: stdout)");

    // audit-runtime
    auto* arun = app.add_subcommand("audit-runtime",
                                    "pruning-step test counts vs predictor accuracy");
    std::string ar_graph = "chain4", ar_edge = "0,2", ar_pool = "1,3";
    std::string ar_grid = "0.5,1.0", ar_output;
    int ar_k = 1;
    double ar_alpha = 0.05, ar_beta = 0.2;
    std::uint64_t ar_reps = 10000, ar_seed = 0;
    arun->add_option("--graph", ar_graph, "chain4|collider4|commoncause4");
    arun->add_option("--edge", ar_edge, "target edge 'i,j'");
    arun->add_option("--pool", ar_pool, "conditioning pool 'a,b,...'");
    arun->add_option("--k", ar_k, "conditioning set size");
    arun->add_option("--grid", ar_grid, "comma-separated p_dsep grid");
    arun->add_option("--alpha", ar_alpha, "channel false-dependence rate");
    arun->add_option("--beta", ar_beta, "channel false-independence rate");
    arun->add_option("--reps", ar_reps, "repetitions");
    arun->add_option("--seed", ar_seed, "master seed");
    arun->add_option("--output", ar_output, "csv path (default: stdout)");

    // oracle-check
    auto* ocheck = app.add_subcommand("oracle-check",
                                      "exact recovery on random DAGs with an oracle test");
    int oc_d = 6, oc_graphs = 50;
    std::uint64_t oc_seed = 0;
    ocheck->add_option("--d", oc_d, "vertices")->required();
    ocheck->add_option("--graphs", oc_graphs, "number of random DAGs")->required();
    ocheck->add_option("--seed", oc_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (sweep->parsed())
            return cmd_sweep(config_path, seed_flag, jobs, sweep_format, sweep_output);
        if (discover->parsed()) {
            if ((algo == "pc-guess" || algo == "gpc-guess") && expert_path.empty()) {
                std::cerr << "--expert is required for " << algo << "\n";
                return 2;
            }
            return cmd_discover(data_path, algo, cit_name, expert_path, alpha,
                                subsample_n, env_seed_or(dseed), rpc_eta, truth_path,
                                json_path);
        }
        if (amon->parsed())
            return cmd_audit_monotonicity(am_graph, am_d, am_er, am_algo, am_grid,
                                          am_mode, am_alpha, am_beta, am_n, am_trials,
                                          env_seed_or(am_seed), am_output);
        if (arun->parsed())
            return cmd_audit_runtime(ar_graph, ar_edge, ar_pool, ar_k, ar_grid, ar_alpha,
                                     ar_beta, ar_reps, env_seed_or(ar_seed), ar_output);
        if (ocheck->parsed()) return cmd_oracle_check(oc_d, oc_graphs, env_seed_or(oc_seed));
    } catch (const g2g::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
