#include "g2g/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>
#include <yaml-cpp/yaml.h>

#include "g2g/citest.hpp"
#include "g2g/discovery.hpp"
#include "g2g/errors.hpp"
#include "g2g/expert.hpp"
#include "g2g/metrics.hpp"

namespace g2g {

namespace {

const std::vector<std::string> kKnownAlgorithms = {"pc",       "pc-stable", "rpc-approx",
                                                   "pc-guess", "gpc",       "gpc-guess"};

bool known_algorithm(const std::string& a) {
    return std::find(kKnownAlgorithms.begin(), kKnownAlgorithms.end(), a) !=
           kKnownAlgorithms.end();
}

void reject_unknown_keys(const YAML::Node& node, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

}  // namespace

SweepConfig load_sweep_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    reject_unknown_keys(root,
                        {"dataset", "algorithms", "expert", "cit", "alpha", "beta",
                         "rpc_eta", "trials", "seed", "output"},
                        "config");
    SweepConfig cfg;

    const auto ds = root["dataset"];
    if (!ds) throw ConfigError("missing 'dataset' section");
    reject_unknown_keys(ds, {"type", "d", "er", "n", "path", "kind", "truth", "subsample"},
                        "dataset");
    const std::string type = ds["type"] ? ds["type"].as<std::string>() : "synthetic";
    if (type == "synthetic") {
        cfg.source = SweepConfig::Source::synthetic;
        if (ds["d"]) cfg.d = ds["d"].as<int>();
        if (ds["er"]) cfg.er_level = ds["er"].as<int>();
        if (ds["n"]) cfg.n = ds["n"].as<int>();
        if (cfg.d < 2 || cfg.er_level < 1 || cfg.n < 5)
            throw ConfigError("synthetic dataset needs d >= 2, er >= 1, n >= 5");
    } else if (type == "csv") {
        cfg.source = SweepConfig::Source::csv;
        if (!ds["path"]) throw ConfigError("csv dataset needs 'path'");
        cfg.csv_path = ds["path"].as<std::string>();
        const std::string kind = ds["kind"] ? ds["kind"].as<std::string>() : "continuous";
        if (kind == "continuous")
            cfg.csv_kind = Dataset::Kind::continuous;
        else if (kind == "discrete")
            cfg.csv_kind = Dataset::Kind::discrete;
        else
            throw ConfigError("dataset kind must be continuous or discrete");
        if (!ds["truth"]) throw ConfigError("csv dataset needs 'truth' (edge-list file)");
        cfg.truth_path = ds["truth"].as<std::string>();
        if (ds["subsample"]) cfg.subsample_n = ds["subsample"].as<int>();
    } else {
        throw ConfigError("dataset type must be synthetic or csv");
    }

    if (!root["algorithms"] || !root["algorithms"].IsSequence() ||
        root["algorithms"].size() == 0)
        throw ConfigError("need a non-empty 'algorithms' list");
    for (const auto& a : root["algorithms"]) {
        const std::string name = a.as<std::string>();
        if (!known_algorithm(name)) throw ConfigError("unknown algorithm '" + name + "'");
        cfg.algorithms.push_back(name);
    }

    if (root["expert"]) {
        const auto ex = root["expert"];
        reject_unknown_keys(ex, {"p_psi", "p_dsep", "file"}, "expert");
        if (ex["file"]) {
            cfg.expert_file = ex["file"].as<std::string>();
            if (ex["p_psi"] || ex["p_dsep"])
                throw ConfigError("expert file excludes p_psi/p_dsep grids");
            cfg.p_psi.clear();
        } else {
            if (ex["p_psi"]) {
                cfg.p_psi = ex["p_psi"].as<std::vector<double>>();
                if (cfg.p_psi.empty()) throw ConfigError("p_psi grid is empty");
            }
            if (ex["p_dsep"]) cfg.p_dsep = ex["p_dsep"].as<std::vector<double>>();
            for (double p : cfg.p_psi)
                if (p < 0 || p > 1) throw ConfigError("p_psi outside [0,1]");
            for (double p : cfg.p_dsep)
                if (p < 0 || p > 1) throw ConfigError("p_dsep outside [0,1]");
        }
    }

    if (root["cit"]) {
        const std::string cit = root["cit"].as<std::string>();
        if (cit == "fisher-z")
            cfg.cit = SweepConfig::Cit::fisher_z;
        else if (cit == "chi-square")
            cfg.cit = SweepConfig::Cit::chi_square;
        else if (cit == "oracle")
            cfg.cit = SweepConfig::Cit::oracle;
        else if (cit == "channel")
            cfg.cit = SweepConfig::Cit::channel;
        else
            throw ConfigError("cit must be fisher-z, chi-square, oracle or channel");
    }
    if (root["alpha"]) cfg.alpha = root["alpha"].as<double>();
    if (root["beta"]) cfg.beta = root["beta"].as<double>();
    if (root["rpc_eta"]) cfg.rpc_eta = root["rpc_eta"].as<int>();
    if (root["trials"]) cfg.trials = root["trials"].as<std::uint64_t>();
    if (cfg.trials == 0) throw ConfigError("trials must be positive");
    if (root["seed"]) {
        cfg.seed = root["seed"].as<std::uint64_t>();
        cfg.seed_set = true;
    }
    if (root["output"]) cfg.output = root["output"].as<std::string>();

    // source/test compatibility
    if (cfg.cit == SweepConfig::Cit::fisher_z &&
        (cfg.source == SweepConfig::Source::csv && cfg.csv_kind != Dataset::Kind::continuous))
        throw ConfigError("fisher-z needs continuous data");
    if (cfg.cit == SweepConfig::Cit::chi_square &&
        (cfg.source != SweepConfig::Source::csv || cfg.csv_kind != Dataset::Kind::discrete))
        throw ConfigError("chi-square needs a discrete csv dataset");
    if (cfg.cit == SweepConfig::Cit::channel && !(1.0 - cfg.alpha > cfg.beta))
        throw ConfigError("channel cit needs 1 - alpha > beta");
    return cfg;
}

namespace {

struct GridPoint {
    std::optional<double> p_psi;
    std::optional<double> p_dsep;
};

std::vector<GridPoint> expand_grid(const SweepConfig& cfg) {
    std::vector<GridPoint> grid;
    if (!cfg.expert_file.empty()) {
        grid.push_back({std::nullopt, std::nullopt});
        return grid;
    }
    for (double psi : cfg.p_psi) {
        if (cfg.p_dsep.empty())
            grid.push_back({psi, std::nullopt});
        else
            for (double pd : cfg.p_dsep) grid.push_back({psi, pd});
    }
    return grid;
}

// sub-stream tags within a trial
enum : std::uint64_t {
    kStreamDag = 10,
    kStreamWeights = 11,
    kStreamData = 12,
    kStreamPermute = 13,
    kStreamExpert = 14,
    kStreamDsep = 15,
    kStreamChannel = 16,
    kStreamAlgo = 1000,
};

struct TrialContext {
    Dataset data;      // empty for oracle/channel runs
    Dag truth{0, {}};
    Skeleton truth_skel{0};
    bool has_data = false;
};

// One scored algorithm run; engines and RNG streams are confined to the trial.
SweepRow run_one(const SweepConfig& cfg, const TrialContext& ctx, const GridPoint& gp,
                 const std::string& algo, std::uint64_t trial, std::size_t grid_idx,
                 std::size_t algo_idx, std::uint64_t trial_seed,
                 const Skeleton* file_expert) {
    const int d = ctx.truth.vertex_count();
    std::unique_ptr<CitEngine> cit;
    switch (cfg.cit) {
        case SweepConfig::Cit::fisher_z:
            cit = std::make_unique<FisherZ>(ctx.data, cfg.alpha);
            break;
        case SweepConfig::Cit::chi_square:
            cit = std::make_unique<ChiSquare>(ctx.data, cfg.alpha);
            break;
        case SweepConfig::Cit::oracle:
            cit = std::make_unique<OracleCit>(ctx.truth);
            break;
        case SweepConfig::Cit::channel:
            cit = std::make_unique<NoisyChannelCit>(
                ctx.truth, cfg.alpha, cfg.beta,
                Rng::derive(Rng::derive(trial_seed, kStreamChannel),
                            grid_idx * 100 + algo_idx));
            break;
    }

    Rng algo_rng(Rng::derive(trial_seed, kStreamAlgo + grid_idx * 100 + algo_idx));

    ExpertPrediction pred{Skeleton(d), nullptr};
    if (algo == "pc-guess" || algo == "gpc-guess") {
        if (file_expert) {
            pred.skeleton = *file_expert;
        } else {
            // same expert stream at every grid point: inversion coupling in p
            Rng expert_rng(Rng::derive(trial_seed, kStreamExpert));
            pred.skeleton = simulate_edge_expert(ctx.truth_skel, *gp.p_psi, expert_rng);
            if (gp.p_dsep)
                pred.dsep = std::make_shared<DsepPredictor>(
                    ctx.truth, *gp.p_dsep, Rng::derive(trial_seed, kStreamDsep));
        }
    }

    DiscoveryResult res;
    if (algo == "pc" || algo == "pc-stable" || algo == "rpc-approx") {
        auto O = uniform_edge_order(Skeleton::complete(d), algo_rng);
        UniformSubsetPolicy policy(algo_rng);
        if (algo == "pc")
            res = pc_skeleton(*cit, d, O, policy);
        else if (algo == "pc-stable")
            res = pc_stable(*cit, d, O, policy);
        else
            res = rpc_approx(*cit, d, std::min(cfg.rpc_eta, d - 2), O, policy);
    } else if (algo == "pc-guess") {
        res = pc_guess(*cit, d, pred, algo_rng);
    } else if (algo == "gpc-guess") {
        res = gpc_guess(*cit, d, pred, algo_rng);
    } else if (algo == "gpc") {
        res = gpc_baseline(*cit, d, algo_rng);
    } else {
        throw ConfigError("unknown algorithm '" + algo + "'");
    }

    SkeletonScore score = skeleton_f1(res.skeleton, ctx.truth_skel);
    SweepRow row;
    row.algorithm = algo;
    row.p_psi = gp.p_psi;
    row.p_dsep = gp.p_dsep;
    row.n = ctx.has_data ? ctx.data.n() : cfg.n;
    row.d = d;
    row.trial = std::to_string(trial);
    row.f1 = score.f1;
    row.precision = score.precision;
    row.recall = score.recall;
    row.perfect = perfect_recovery(res.skeleton, ctx.truth_skel) ? 1.0 : 0.0;
    row.tests_run = static_cast<double>(res.tests_run);
    row.wall_ns = static_cast<double>(res.wall_ns);
    return row;
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg, int jobs) {
    for (const auto& a : cfg.algorithms)
        if (!known_algorithm(a)) throw ConfigError("unknown algorithm '" + a + "'");
    if ((cfg.algorithms.end() !=
         std::find(cfg.algorithms.begin(), cfg.algorithms.end(), "pc-guess") ||
         cfg.algorithms.end() !=
             std::find(cfg.algorithms.begin(), cfg.algorithms.end(), "gpc-guess")) &&
        cfg.expert_file.empty() && cfg.p_psi.empty())
        throw ConfigError("guided algorithms need p_psi grid or an expert file");

    // shared read-only inputs
    Dataset base_csv;
    Dag csv_truth{0, {}};
    std::optional<Skeleton> file_expert;
    if (cfg.source == SweepConfig::Source::csv) {
        base_csv = load_csv(cfg.csv_path, cfg.csv_kind);
        auto truth_file = read_edge_list_file(cfg.truth_path);
        csv_truth = dag_from_edge_list(truth_file);
        if (csv_truth.vertex_count() != base_csv.d())
            throw DimensionMismatch("truth graph size != csv width");
        // align truth vertex order with csv columns by name
        if (csv_truth.labels() != base_csv.names) {
            std::vector<int> perm(csv_truth.vertex_count());
            for (int v = 0; v < csv_truth.vertex_count(); ++v) {
                auto it = std::find(base_csv.names.begin(), base_csv.names.end(),
                                    csv_truth.labels()[v]);
                if (it == base_csv.names.end())
                    throw UnknownVariableName("truth variable '" + csv_truth.labels()[v] +
                                              "' not in csv header");
                perm[v] = static_cast<int>(it - base_csv.names.begin());
            }
            csv_truth = relabel(csv_truth, perm);
        }
        if (!cfg.expert_file.empty())
            file_expert = load_expert_skeleton(cfg.expert_file, base_csv.names);
    } else if (!cfg.expert_file.empty()) {
        throw ConfigError("expert files pair with csv datasets (named variables)");
    }

    const auto grid = expand_grid(cfg);
    const std::uint64_t trials = cfg.trials;
    std::vector<std::vector<SweepRow>> per_trial(trials);

    auto worker_body = [&](std::uint64_t t) {
        const std::uint64_t ts = Rng::derive(cfg.seed, t);
        TrialContext ctx;
        if (cfg.source == SweepConfig::Source::synthetic) {
            Rng dag_rng(Rng::derive(ts, kStreamDag));
            Dag dag = sample_er_dag(cfg.d, cfg.er_level, dag_rng);
            if (cfg.cit == SweepConfig::Cit::fisher_z) {
                Rng w_rng(Rng::derive(ts, kStreamWeights));
                Rng data_rng(Rng::derive(ts, kStreamData));
                Rng perm_rng(Rng::derive(ts, kStreamPermute));
                WeightedDag wd = sample_weights(dag, w_rng);
                Dataset ds = standardize(sample_dataset(wd, cfg.n, data_rng));
                PermutedData pd = permute_variables(ds, dag, perm_rng);
                ctx.data = std::move(pd.data);
                ctx.truth = std::move(pd.truth);
                ctx.has_data = true;
            } else {
                Rng perm_rng(Rng::derive(ts, kStreamPermute));
                std::vector<int> perm(cfg.d);
                for (int v = 0; v < cfg.d; ++v) perm[v] = v;
                perm_rng.shuffle(perm);
                ctx.truth = relabel(dag, perm);
            }
        } else {
            ctx.truth = csv_truth;
            if (cfg.subsample_n > 0 && cfg.subsample_n < base_csv.n()) {
                Rng data_rng(Rng::derive(ts, kStreamData));
                ctx.data = subsample(base_csv, cfg.subsample_n, data_rng);
            } else {
                ctx.data = base_csv;
            }
            ctx.has_data = true;
        }
        ctx.truth_skel = skeleton_of(ctx.truth);

        auto& rows = per_trial[t];
        for (std::size_t g = 0; g < grid.size(); ++g)
            for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
                rows.push_back(run_one(cfg, ctx, grid[g], cfg.algorithms[a], t, g, a, ts,
                                       file_expert ? &*file_expert : nullptr));
    };

    int n_workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(trials)));
    if (n_workers == 1) {
        for (std::uint64_t t = 0; t < trials; ++t) worker_body(t);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const std::uint64_t t = next.fetch_add(1);
                    if (t >= trials) break;
                    worker_body(t);
                }
            });
        for (auto& th : pool) th.join();
    }

    SweepReport report;
    report.config = cfg;
    for (auto& rows : per_trial)
        for (auto& r : rows) report.rows.push_back(std::move(r));

    // aggregates: mean and SE per (algorithm, grid point), in emitted order
    for (std::size_t g = 0; g < grid.size(); ++g)
        for (const auto& algo : cfg.algorithms) {
            std::vector<const SweepRow*> group;
            for (const auto& r : report.rows)
                if (!r.aggregate() && r.algorithm == algo && r.p_psi == grid[g].p_psi &&
                    r.p_dsep == grid[g].p_dsep)
                    group.push_back(&r);
            if (group.empty()) continue;
            const double nt = static_cast<double>(group.size());
            auto stats = [&](auto getter) {
                double mean = 0;
                for (auto* r : group) mean += getter(*r);
                mean /= nt;
                double ss = 0;
                for (auto* r : group) ss += (getter(*r) - mean) * (getter(*r) - mean);
                const double se = group.size() > 1 ? std::sqrt(ss / (nt - 1) / nt) : 0.0;
                return std::make_pair(mean, se);
            };
            auto [f1m, f1s] = stats([](const SweepRow& r) { return r.f1; });
            auto [prm, prs] = stats([](const SweepRow& r) { return r.precision; });
            auto [rcm, rcs] = stats([](const SweepRow& r) { return r.recall; });
            auto [pfm, pfs] = stats([](const SweepRow& r) { return r.perfect; });
            auto [tsm, tss] = stats([](const SweepRow& r) { return r.tests_run; });
            auto [wlm, wls] = stats([](const SweepRow& r) { return r.wall_ns; });
            SweepRow mean = *group.front();
            mean.trial = "mean";
            mean.f1 = f1m; mean.precision = prm; mean.recall = rcm;
            mean.perfect = pfm; mean.tests_run = tsm; mean.wall_ns = wlm;
            SweepRow se = mean;
            se.trial = "se";
            se.f1 = f1s; se.precision = prs; se.recall = rcs;
            se.perfect = pfs; se.tests_run = tss; se.wall_ns = wls;
            report.rows.push_back(std::move(mean));
            report.rows.push_back(std::move(se));
        }
    return report;
}

namespace {

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_g6(*v) : std::string();
}

std::string fmt_count(double v, bool aggregate) {
    if (aggregate) return fmt_g6(v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
}

}  // namespace

void emit_csv(std::ostream& out, const SweepReport& report) {
    out << "algorithm,p_psi,p_dsep,n,d,trial,f1,precision,recall,perfect,tests_run,wall_ns\n";
    for (const auto& r : report.rows) {
        const bool agg = r.aggregate();
        out << r.algorithm << ',' << fmt_opt(r.p_psi) << ',' << fmt_opt(r.p_dsep) << ','
            << r.n << ',' << r.d << ',' << r.trial << ',' << fmt_g6(r.f1) << ','
            << fmt_g6(r.precision) << ',' << fmt_g6(r.recall) << ','
            << (agg ? fmt_g6(r.perfect) : fmt_count(r.perfect, false)) << ','
            << fmt_count(r.tests_run, agg) << ',' << fmt_count(r.wall_ns, agg) << '\n';
    }
}

std::string emit_json(const SweepReport& report) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json j;
        j["algorithm"] = r.algorithm;
        if (r.p_psi) j["p_psi"] = *r.p_psi; else j["p_psi"] = nullptr;
        if (r.p_dsep) j["p_dsep"] = *r.p_dsep; else j["p_dsep"] = nullptr;
        j["n"] = r.n;
        j["d"] = r.d;
        j["trial"] = r.trial;
        j["f1"] = r.f1;
        j["precision"] = r.precision;
        j["recall"] = r.recall;
        j["perfect"] = r.perfect;
        j["tests_run"] = r.tests_run;
        j["wall_ns"] = r.wall_ns;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::vector<SweepRow> rows_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    std::vector<SweepRow> rows;
    for (const auto& j : arr) {
        SweepRow r;
        r.algorithm = j.at("algorithm").get<std::string>();
        if (!j.at("p_psi").is_null()) r.p_psi = j.at("p_psi").get<double>();
        if (!j.at("p_dsep").is_null()) r.p_dsep = j.at("p_dsep").get<double>();
        r.n = j.at("n").get<int>();
        r.d = j.at("d").get<int>();
        r.trial = j.at("trial").get<std::string>();
        r.f1 = j.at("f1").get<double>();
        r.precision = j.at("precision").get<double>();
        r.recall = j.at("recall").get<double>();
        r.perfect = j.at("perfect").get<double>();
        r.tests_run = j.at("tests_run").get<double>();
        r.wall_ns = j.at("wall_ns").get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_report(const SweepReport& report, const std::string& format,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    if (format == "csv") {
        emit_csv(out, report);
    } else if (format == "json") {
        out << emit_json(report);
    } else {
        throw ConfigError("format must be csv or json");
    }
}

}  // namespace g2g
