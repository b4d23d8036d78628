#include "g2g/expert.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "g2g/errors.hpp"

namespace g2g {

DsepPredictor::DsepPredictor(Dag truth, double p_dsep, std::uint64_t seed)
    : truth_(std::move(truth)), p_(p_dsep), rng_(seed) {
    if (p_dsep < 0 || p_dsep > 1) throw ConfigError("p_dsep outside [0,1]");
}

bool DsepPredictor::predict(int i, int j, const std::vector<int>& cond) {
    auto key = std::make_tuple(std::min(i, j), std::max(i, j), cond);
    std::sort(std::get<2>(key).begin(), std::get<2>(key).end());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const bool truth = d_separated(truth_, i, j, cond);
    const bool answer = rng_.bernoulli(p_) ? truth : !truth;
    memo_.emplace(std::move(key), answer);
    return answer;
}

Skeleton simulate_edge_expert(const Skeleton& truth, double p_psi, Rng& rng) {
    if (p_psi < 0 || p_psi > 1) throw ConfigError("p_psi outside [0,1]");
    const int d = truth.vertex_count();
    Skeleton guess(d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const bool correct = rng.bernoulli(p_psi);
            if (truth.has_edge(i, j) == correct) guess.add_edge(i, j);
        }
    return guess;
}

EdgeOrder guided_edge_order(const Skeleton& working, const Skeleton& guess, Rng& rng) {
    if (working.vertex_count() != guess.vertex_count())
        throw DimensionMismatch("guess size != working skeleton size");
    EdgeOrder o;
    o.edges = working.edges();
    rng.shuffle(o.edges);
    auto mid = std::stable_partition(
        o.edges.begin(), o.edges.end(),
        [&](const std::pair<int, int>& e) { return !guess.has_edge(e.first, e.second); });
    o.boundary = static_cast<std::size_t>(mid - o.edges.begin());
    return o;
}

EdgeOrder uniform_edge_order(const Skeleton& working, Rng& rng) {
    EdgeOrder o;
    o.edges = working.edges();
    rng.shuffle(o.edges);
    o.boundary = 0;
    return o;
}

std::vector<std::vector<int>> k_subsets(const std::vector<int>& pool, int k) {
    std::vector<std::vector<int>> out;
    const int m = static_cast<int>(pool.size());
    if (k < 0 || k > m) return out;
    if (k == 0) {
        out.emplace_back();
        return out;
    }
    std::vector<int> pick(k);
    for (int t = 0; t < k; ++t) pick[t] = t;
    while (true) {
        std::vector<int> subset(k);
        for (int t = 0; t < k; ++t) subset[t] = pool[pick[t]];
        out.push_back(std::move(subset));
        int t = k - 1;
        while (t >= 0 && pick[t] == m - k + t) --t;
        if (t < 0) break;
        ++pick[t];
        for (int u = t + 1; u < k; ++u) pick[u] = pick[u - 1] + 1;
    }
    return out;
}

std::vector<std::vector<int>> UniformSubsetPolicy::arrange(int, int,
                                                           const std::vector<int>& pool,
                                                           int k) {
    auto subsets = k_subsets(pool, k);
    rng_->shuffle(subsets);
    return subsets;
}

std::vector<std::vector<int>> GuidedSubsetPolicy::arrange(int i, int j,
                                                          const std::vector<int>& pool,
                                                          int k) {
    auto subsets = k_subsets(pool, k);
    rng_->shuffle(subsets);
    std::stable_partition(subsets.begin(), subsets.end(),
                          [&](const std::vector<int>& w) { return pred_->predict(i, j, w); });
    return subsets;
}

Orderings extract_orderings(const ExpertPrediction& pred, const Skeleton& working,
                            Rng& rng) {
    Orderings out;
    out.order = guided_edge_order(working, pred.skeleton, rng);
    if (pred.dsep)
        out.policy = std::make_unique<GuidedSubsetPolicy>(*pred.dsep, rng);
    else
        out.policy = std::make_unique<UniformSubsetPolicy>(rng);
    return out;
}

namespace {

int name_index(const std::string& name, const std::vector<std::string>& names) {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return static_cast<int>(k);
    throw UnknownVariableName("unknown variable '" + name + "'");
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "EDGES: (a, b), (c, d)" — tolerant of whitespace, case-sensitive names
Skeleton parse_edges_decl(const std::string& text, const std::vector<std::string>& names) {
    Skeleton s(static_cast<int>(names.size()));
    auto colon = text.find(':');
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (true) {
        auto open = rest.find('(', pos);
        if (open == std::string::npos) break;
        auto close = rest.find(')', open);
        if (close == std::string::npos) throw ParseError("unbalanced '(' in EDGES list");
        std::string pair = rest.substr(open + 1, close - open - 1);
        auto comma = pair.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'a, b' inside parentheses");
        int u = name_index(strip(pair.substr(0, comma)), names);
        int v = name_index(strip(pair.substr(comma + 1)), names);
        if (u == v) throw SelfLoop("self loop in expert edges");
        s.add_edge(u, v);
        pos = close + 1;
    }
    return s;
}

}  // namespace

Skeleton load_expert_skeleton(const std::string& path,
                              const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    // skip comments/blanks to find the first payload line
    std::stringstream lines(text);
    std::string line, first;
    while (std::getline(lines, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (!line.empty()) { first = line; break; }
    }
    if (first.empty()) throw EmptyFile("expert file has no content: " + path);

    if (first.rfind("EDGES:", 0) == 0) {
        // the declaration may wrap across lines; parse the whole payload
        auto at = text.find("EDGES:");
        return parse_edges_decl(text.substr(at), names);
    }

    std::stringstream again(text);
    EdgeListFile f = read_edge_list(again);
    if (f.names.size() != names.size())
        throw DimensionMismatch("expert file declares a different variable count");
    // remap by name so header order need not match the dataset
    std::vector<int> to_local(f.names.size());
    for (std::size_t k = 0; k < f.names.size(); ++k)
        to_local[k] = name_index(f.names[k], names);
    Skeleton s(static_cast<int>(names.size()));
    for (auto [u, v] : f.directed) s.add_edge(to_local[u], to_local[v]);
    for (auto [u, v] : f.undirected) s.add_edge(to_local[u], to_local[v]);
    return s;
}

}  // namespace g2g
