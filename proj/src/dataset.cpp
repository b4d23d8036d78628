#include "g2g/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "g2g/errors.hpp"

namespace g2g {

double WeightedDag::weight(int from, int to) const {
    const auto& ps = dag.parents(to);
    for (std::size_t k = 0; k < ps.size(); ++k)
        if (ps[k] == from) return weights[to][k];
    throw IndexOutOfRange("no such arc");
}

WeightedDag sample_weights(const Dag& g, Rng& rng) {
    WeightedDag wg{g, {}};
    wg.weights.resize(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
        wg.weights[v].reserve(g.parents(v).size());
        for (std::size_t k = 0; k < g.parents(v).size(); ++k) {
            double mag = rng.uniform_range(1.5, 2.5);
            wg.weights[v].push_back(rng.bernoulli(0.5) ? mag : -mag);
        }
    }
    return wg;
}

Dataset sample_dataset(const WeightedDag& wg, int n, Rng& rng) {
    if (n < 1) throw NTooLarge("need at least one row");
    const int d = wg.dag.vertex_count();
    Dataset ds;
    ds.kind = Dataset::Kind::continuous;
    ds.names = wg.dag.labels();
    ds.values.resize(n, d);
    // columns filled in topological order; noise drawn column-major so the
    // stream of rng draws is independent of the internal evaluation order
    for (int v : wg.dag.topological_order()) {
        Eigen::VectorXd col(n);
        for (int r = 0; r < n; ++r) col(r) = rng.normal();
        const auto& ps = wg.dag.parents(v);
        for (std::size_t k = 0; k < ps.size(); ++k)
            col += wg.weights[v][k] * ds.values.col(ps[k]);
        ds.values.col(v) = col;
    }
    return ds;
}

Dataset standardize(const Dataset& ds) {
    if (ds.n() < 2) throw ZeroVariance("standardize needs at least two rows");
    Dataset out = ds;
    for (int c = 0; c < ds.d(); ++c) {
        const double mean = ds.values.col(c).mean();
        const double var =
            (ds.values.col(c).array() - mean).square().sum() / (ds.n() - 1);
        if (var <= 0.0)
            throw ZeroVariance("column " + std::to_string(c) + " has zero variance");
        out.values.col(c) = (ds.values.col(c).array() - mean) / std::sqrt(var);
    }
    return out;
}

PermutedData permute_variables(const Dataset& ds, const Dag& truth, Rng& rng) {
    if (ds.d() != truth.vertex_count())
        throw DimensionMismatch("dataset width != graph size");
    const int d = ds.d();
    std::vector<int> perm(d);
    for (int v = 0; v < d; ++v) perm[v] = v;
    rng.shuffle(perm);

    PermutedData out;
    out.permutation = perm;
    out.truth = relabel(truth, perm);
    out.data.kind = ds.kind;
    out.data.values.resize(ds.n(), d);
    out.data.names.resize(d);
    for (int v = 0; v < d; ++v) {
        out.data.values.col(perm[v]) = ds.values.col(v);
        out.data.names[perm[v]] = ds.names.empty() ? ("x" + std::to_string(v)) : ds.names[v];
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ' || cell.back() == '\t'))
            cell.pop_back();
        std::size_t b = cell.find_first_not_of(" \t");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, Dataset::Kind kind) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw EmptyFile("empty csv: " + path);
    Dataset ds;
    ds.kind = kind;
    ds.names = split_csv_line(line);
    const std::size_t d = ds.names.size();
    if (d == 0) throw EmptyFile("csv header has no columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::map<std::string, int>> codes(d);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != d)
            throw RaggedRows("row " + std::to_string(lineno) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(d));
        std::vector<double> row(d);
        for (std::size_t c = 0; c < d; ++c) {
            if (kind == Dataset::Kind::continuous) {
                try {
                    std::size_t pos = 0;
                    row[c] = std::stod(cells[c], &pos);
                    if (pos != cells[c].size()) throw NonNumericCell("");
                } catch (...) {
                    throw NonNumericCell("row " + std::to_string(lineno) + " column " +
                                         std::to_string(c) + ": '" + cells[c] + "'");
                }
            } else {
                auto [it, fresh] =
                    codes[c].try_emplace(cells[c], static_cast<int>(codes[c].size()));
                (void)fresh;
                row[c] = it->second;
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyFile("csv has no data rows: " + path);
    if (kind == Dataset::Kind::discrete)
        for (std::size_t c = 0; c < d; ++c)
            if (codes[c].size() < 2)
                throw ZeroVariance("discrete column " + std::to_string(c) +
                                   " takes a single value");

    ds.values.resize(static_cast<int>(rows.size()), static_cast<int>(d));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < d; ++c) ds.values(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return ds;
}

Dataset subsample(const Dataset& ds, int n, Rng& rng) {
    if (n < 1 || n > ds.n())
        throw NTooLarge("subsample size " + std::to_string(n) + " outside [1, " +
                        std::to_string(ds.n()) + "]");
    std::vector<int> idx(ds.n());
    for (int r = 0; r < ds.n(); ++r) idx[r] = r;
    // partial Fisher-Yates: first n slots end up a uniform draw without replacement
    for (int k = 0; k < n; ++k) {
        int j = k + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(ds.n() - k)));
        std::swap(idx[k], idx[j]);
    }
    Dataset out;
    out.kind = ds.kind;
    out.names = ds.names;
    out.values.resize(n, ds.d());
    for (int r = 0; r < n; ++r) out.values.row(r) = ds.values.row(idx[r]);
    return out;
}

}  // namespace g2g
