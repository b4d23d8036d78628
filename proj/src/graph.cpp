#include "g2g/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "g2g/errors.hpp"

namespace g2g {

// --- Skeleton ----------------------------------------------------------------

Skeleton::Skeleton(int d) : d_(d), adj_(d, std::vector<char>(d, 0)) {
    if (d < 0) throw IndexOutOfRange("skeleton size must be nonnegative");
}

Skeleton Skeleton::complete(int d) {
    Skeleton s(d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) s.add_edge(i, j);
    return s;
}

void Skeleton::check(int i, int j) const {
    if (i < 0 || i >= d_ || j < 0 || j >= d_)
        throw IndexOutOfRange("vertex index out of range");
    if (i == j) throw SelfLoop("self loop");
}

bool Skeleton::has_edge(int i, int j) const {
    check(i, j);
    return adj_[i][j] != 0;
}

void Skeleton::add_edge(int i, int j) {
    check(i, j);
    if (!adj_[i][j]) {
        adj_[i][j] = adj_[j][i] = 1;
        ++n_edges_;
    }
}

void Skeleton::remove_edge(int i, int j) {
    check(i, j);
    if (adj_[i][j]) {
        adj_[i][j] = adj_[j][i] = 0;
        --n_edges_;
    }
}

std::vector<std::pair<int, int>> Skeleton::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(n_edges_);
    for (int i = 0; i < d_; ++i)
        for (int j = i + 1; j < d_; ++j)
            if (adj_[i][j]) out.emplace_back(i, j);
    return out;
}

std::vector<int> Skeleton::neighbors(int i) const {
    if (i < 0 || i >= d_) throw IndexOutOfRange("vertex index out of range");
    std::vector<int> out;
    for (int j = 0; j < d_; ++j)
        if (adj_[i][j]) out.push_back(j);
    return out;
}

std::vector<int> Skeleton::adjacency_excluding(int i, int j) const {
    check(i, j);
    std::vector<int> out;
    for (int v = 0; v < d_; ++v)
        if (v != j && adj_[i][v]) out.push_back(v);
    return out;
}

// --- Dag ---------------------------------------------------------------------

Dag::Dag(int d, const std::vector<std::pair<int, int>>& edges,
         std::vector<std::string> labels)
    : d_(d), parents_(d), children_(d), labels_(std::move(labels)) {
    if (d < 0) throw IndexOutOfRange("dag size must be nonnegative");
    if (labels_.empty()) {
        labels_.reserve(d);
        for (int v = 0; v < d; ++v) labels_.push_back("x" + std::to_string(v));
    }
    if (static_cast<int>(labels_.size()) != d)
        throw DimensionMismatch("label count != vertex count");

    for (auto [from, to] : edges) {
        if (from < 0 || from >= d || to < 0 || to >= d)
            throw IndexOutOfRange("edge endpoint out of range");
        if (from == to) throw SelfLoop("self loop");
        if (std::find(parents_[to].begin(), parents_[to].end(), from) != parents_[to].end())
            throw DuplicateEdge("duplicate edge");
        parents_[to].push_back(from);
        children_[from].push_back(to);
        ++n_edges_;
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());
    topological_order();  // throws CycleDetected if cyclic
}

bool Dag::has_edge(int from, int to) const {
    if (from < 0 || from >= d_ || to < 0 || to >= d_)
        throw IndexOutOfRange("vertex index out of range");
    return std::binary_search(parents_[to].begin(), parents_[to].end(), from);
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(n_edges_);
    for (int v = 0; v < d_; ++v)
        for (int p : parents_[v]) out.emplace_back(p, v);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Dag::topological_order() const {
    // Kahn's algorithm; min-index ready vertex first keeps the order unique.
    std::vector<int> indeg(d_);
    for (int v = 0; v < d_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::vector<int> order;
    order.reserve(d_);
    std::vector<char> placed(d_, 0);
    for (int step = 0; step < d_; ++step) {
        int pick = -1;
        for (int v = 0; v < d_; ++v)
            if (!placed[v] && indeg[v] == 0) { pick = v; break; }
        if (pick < 0) throw CycleDetected("graph contains a directed cycle");
        placed[pick] = 1;
        order.push_back(pick);
        for (int c : children_[pick]) --indeg[c];
    }
    return order;
}

Skeleton skeleton_of(const Dag& g) {
    Skeleton s(g.vertex_count());
    for (auto [from, to] : g.edges()) s.add_edge(from, to);
    return s;
}

// --- d-separation -------------------------------------------------------------

bool d_separated(const Dag& g, int i, int j, std::span<const int> cond) {
    const int d = g.vertex_count();
    if (i < 0 || i >= d || j < 0 || j >= d) throw IndexOutOfRange("vertex index out of range");
    if (i == j) throw SelfLoop("d-separation query needs distinct endpoints");

    std::vector<char> in_cond(d, 0);
    for (int w : cond) {
        if (w < 0 || w >= d) throw IndexOutOfRange("conditioning vertex out of range");
        if (w == i || w == j) throw IndexOutOfRange("conditioning set contains an endpoint");
        in_cond[w] = 1;
    }

    // ancestors of the conditioning set (inclusive) — colliders open iff here
    std::vector<char> anc_cond(d, 0);
    {
        std::deque<int> q;
        for (int w = 0; w < d; ++w)
            if (in_cond[w]) { anc_cond[w] = 1; q.push_back(w); }
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int p : g.parents(v))
                if (!anc_cond[p]) { anc_cond[p] = 1; q.push_back(p); }
        }
    }

    // BFS over (vertex, arrival direction) states; direction 0 = arrived via
    // an incoming arc (from a parent), 1 = via an outgoing arc (from a child).
    std::vector<std::array<char, 2>> seen(d, {0, 0});
    std::deque<std::pair<int, int>> q;
    // leaving the source along either arc type
    for (int c : g.children(i))
        if (!seen[c][0]) { seen[c][0] = 1; q.emplace_back(c, 0); }
    for (int p : g.parents(i))
        if (!seen[p][1]) { seen[p][1] = 1; q.emplace_back(p, 1); }

    while (!q.empty()) {
        auto [v, dir] = q.front();
        q.pop_front();
        if (v == j) return false;

        if (dir == 0) {
            // arrived at v from a parent: v is a chain/collider midpoint
            if (!in_cond[v]) {  // chain continues
                for (int c : g.children(v))
                    if (!seen[c][0]) { seen[c][0] = 1; q.emplace_back(c, 0); }
            }
            if (anc_cond[v]) {  // collider opens, trail turns back toward parents
                for (int p : g.parents(v))
                    if (!seen[p][1]) { seen[p][1] = 1; q.emplace_back(p, 1); }
            }
        } else {
            // arrived at v from a child: fork or chain through v
            if (!in_cond[v]) {
                for (int p : g.parents(v))
                    if (!seen[p][1]) { seen[p][1] = 1; q.emplace_back(p, 1); }
                for (int c : g.children(v))
                    if (!seen[c][0]) { seen[c][0] = 1; q.emplace_back(c, 0); }
            }
        }
    }
    return true;
}

// --- sampling ------------------------------------------------------------------

Dag sample_er_dag(int d, int er_level, Rng& rng) {
    if (d < 2) throw IndexOutOfRange("need at least two vertices");
    if (er_level < 1) throw IndexOutOfRange("er_level must be positive");
    const double p = std::min(1.0, 2.0 * er_level / (d - 1));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (rng.bernoulli(p)) edges.emplace_back(i, j);
    return Dag(d, edges);
}

Dag relabel(const Dag& g, const std::vector<int>& perm) {
    const int d = g.vertex_count();
    if (static_cast<int>(perm.size()) != d) throw DimensionMismatch("permutation size != d");
    std::vector<char> hit(d, 0);
    for (int v : perm) {
        if (v < 0 || v >= d || hit[v]) throw IndexOutOfRange("not a permutation");
        hit[v] = 1;
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [from, to] : g.edges()) edges.emplace_back(perm[from], perm[to]);
    std::vector<std::string> labels(d);
    for (int v = 0; v < d; ++v) labels[perm[v]] = g.labels()[v];
    return Dag(d, edges, std::move(labels));
}

// --- edge-list text format -------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int resolve_vertex(const std::string& tok, const std::vector<std::string>& names) {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == tok) return static_cast<int>(k);
    try {
        std::size_t pos = 0;
        int idx = std::stoi(tok, &pos);
        if (pos == tok.size() && idx >= 0 && idx < static_cast<int>(names.size())) return idx;
    } catch (...) {
    }
    throw UnknownVariableName("unknown vertex '" + tok + "'");
}

}  // namespace

EdgeListFile read_edge_list(std::istream& in) {
    EdgeListFile out;
    std::string line;
    bool have_header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (!have_header) {
            if (line.rfind("vars:", 0) != 0)
                throw ParseError("edge list must start with a 'vars:' header");
            std::stringstream ss(line.substr(5));
            std::string name;
            while (std::getline(ss, name, ',')) {
                name = strip(name);
                if (name.empty()) throw ParseError("empty variable name in header");
                out.names.push_back(name);
            }
            if (out.names.empty()) throw ParseError("no variable names in header");
            have_header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string a, mid, b;
        ss >> a >> mid;
        bool undirected = false;
        if (mid == "--") {
            undirected = true;
            ss >> b;
        } else {
            b = mid;
        }
        std::string extra;
        if (b.empty() || (ss >> extra))
            throw ParseError("malformed edge on line " + std::to_string(lineno));
        int u = resolve_vertex(a, out.names);
        int v = resolve_vertex(b, out.names);
        if (undirected)
            out.undirected.emplace_back(u, v);
        else
            out.directed.emplace_back(u, v);
    }
    if (!have_header) throw EmptyFile("edge list file had no header");
    return out;
}

EdgeListFile read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_edge_list(in);
}

Dag dag_from_edge_list(const EdgeListFile& f) {
    if (!f.undirected.empty())
        throw ParseError("undirected edge in a directed graph file");
    return Dag(static_cast<int>(f.names.size()), f.directed, f.names);
}

Skeleton skeleton_from_edge_list(const EdgeListFile& f) {
    Skeleton s(static_cast<int>(f.names.size()));
    for (auto [u, v] : f.directed) s.add_edge(u, v);
    for (auto [u, v] : f.undirected) s.add_edge(u, v);
    return s;
}

void write_edge_list(std::ostream& out, const Dag& g) {
    out << "vars:";
    for (int v = 0; v < g.vertex_count(); ++v)
        out << (v ? "," : " ") << g.labels()[v];
    out << "\n";
    for (auto [from, to] : g.edges()) out << from << " " << to << "\n";
}

void write_edge_list(std::ostream& out, const Skeleton& s,
                     const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != s.vertex_count())
        throw DimensionMismatch("name count != vertex count");
    out << "vars:";
    for (std::size_t v = 0; v < names.size(); ++v) out << (v ? "," : " ") << names[v];
    out << "\n";
    for (auto [i, j] : s.edges()) out << i << " -- " << j << "\n";
}

}  // namespace g2g
