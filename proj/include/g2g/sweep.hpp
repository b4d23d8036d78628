#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "g2g/dataset.hpp"

namespace g2g {

struct SweepConfig {
    enum class Source { synthetic, csv };
    enum class Cit { fisher_z, chi_square, oracle, channel };

    Source source = Source::synthetic;
    int d = 10;
    int er_level = 1;
    int n = 100;

    std::string csv_path;
    Dataset::Kind csv_kind = Dataset::Kind::continuous;
    std::string truth_path;
    int subsample_n = 0;  // 0 = all rows

    std::vector<std::string> algorithms;  // pc | pc-stable | rpc-approx | pc-guess | gpc | gpc-guess
    std::vector<double> p_psi{0.5};
    std::vector<double> p_dsep;  // empty = no conditioning-order hints
    std::string expert_file;     // overrides the simulated expert

    Cit cit = Cit::fisher_z;
    double alpha = 0.05;
    double beta = 0.2;
    int rpc_eta = 1;

    std::uint64_t trials = 30;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output;
};

/// YAML config file; unknown keys are rejected so typos fail loudly.
SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
    std::string algorithm;
    std::optional<double> p_psi;
    std::optional<double> p_dsep;
    int n = 0, d = 0;
    std::string trial;  // trial index, or "mean"/"se" on aggregate rows
    double f1 = 0, precision = 0, recall = 0, perfect = 0;
    double tests_run = 0;
    double wall_ns = 0;

    bool aggregate() const { return trial == "mean" || trial == "se"; }
};

struct SweepReport {
    SweepConfig config;
    std::vector<SweepRow> rows;  // per-trial rows in trial order, then aggregates
};

/// Paired Monte-Carlo sweep: within a trial every algorithm sees the same
/// data and the same expert draw; per-trial seeds are derived from the master
/// seed, so results do not depend on `jobs` (<=0 means all cores).
SweepReport run_sweep(const SweepConfig& cfg, int jobs = 0);

void emit_csv(std::ostream& out, const SweepReport& report);
std::string emit_json(const SweepReport& report);
/// format: "csv" or "json"
void emit_report(const SweepReport& report, const std::string& format,
                 const std::string& path);
/// Inverse of emit_json over the rows (config is not round-tripped).
std::vector<SweepRow> rows_from_json(const std::string& text);

}  // namespace g2g
