#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "g2g/rng.hpp"

namespace g2g {

/// Undirected graph over vertices 0..d-1. Edges are stored normalized (i < j).
class Skeleton {
  public:
    explicit Skeleton(int d);
    static Skeleton complete(int d);

    int vertex_count() const { return d_; }
    std::size_t edge_count() const { return n_edges_; }
    bool has_edge(int i, int j) const;
    void add_edge(int i, int j);
    void remove_edge(int i, int j);

    /// All edges as (i, j) pairs with i < j, lexicographically sorted.
    std::vector<std::pair<int, int>> edges() const;
    std::vector<int> neighbors(int i) const;
    /// adj(C, x_i) \ {x_j}: neighbors of i with j excluded.
    std::vector<int> adjacency_excluding(int i, int j) const;

    bool operator==(const Skeleton& o) const { return d_ == o.d_ && adj_ == o.adj_; }
    bool operator!=(const Skeleton& o) const { return !(*this == o); }

  private:
    void check(int i, int j) const;

    int d_;
    std::size_t n_edges_ = 0;
    std::vector<std::vector<char>> adj_;
};

/// Immutable DAG over vertices 0..d-1, validated acyclic on construction.
class Dag {
  public:
    Dag(int d, const std::vector<std::pair<int, int>>& edges,
        std::vector<std::string> labels = {});

    int vertex_count() const { return d_; }
    std::size_t edge_count() const { return n_edges_; }
    bool has_edge(int from, int to) const;
    const std::vector<int>& parents(int v) const { return parents_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    const std::vector<std::string>& labels() const { return labels_; }

    /// All arcs as (parent, child), lexicographically sorted.
    std::vector<std::pair<int, int>> edges() const;
    /// Deterministic topological order (lowest index first among ready vertices).
    std::vector<int> topological_order() const;

    bool operator==(const Dag& o) const { return d_ == o.d_ && parents_ == o.parents_; }

  private:
    int d_;
    std::size_t n_edges_ = 0;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<std::string> labels_;
};

/// Undirected version of the DAG.
Skeleton skeleton_of(const Dag& g);

/// True iff x_i and x_j are d-separated by `cond` in g. Reachability
/// formulation: an active trail exists iff j is reachable from i respecting
/// chain/fork blocking at conditioned vertices and collider opening when the
/// collider or one of its descendants is conditioned on.
bool d_separated(const Dag& g, int i, int j, std::span<const int> cond);

/// Erdős–Rényi DAG: each pair i<j carries the arc i→j independently with
/// probability min(1, 2*er_level/(d-1)), so the expected arc count is
/// er_level*d. Orientation follows the vertex order; callers wanting an
/// exchangeable vertex order apply a random permutation afterwards.
Dag sample_er_dag(int d, int er_level, Rng& rng);

/// Relabel vertices: vertex v becomes perm[v].
Dag relabel(const Dag& g, const std::vector<int>& perm);

// --- edge-list text format -------------------------------------------------
// Header "vars: name0,name1,...", then one edge per line: "i j" (directed) or
// "i -- j" (undirected); '#' starts a comment. Tokens may be names or indices.

struct EdgeListFile {
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> directed;
    std::vector<std::pair<int, int>> undirected;
};

EdgeListFile read_edge_list(std::istream& in);
EdgeListFile read_edge_list_file(const std::string& path);
Dag dag_from_edge_list(const EdgeListFile& f);          // undirected lines rejected
Skeleton skeleton_from_edge_list(const EdgeListFile& f); // arc direction dropped

void write_edge_list(std::ostream& out, const Dag& g);
void write_edge_list(std::ostream& out, const Skeleton& s,
                     const std::vector<std::string>& names);

}  // namespace g2g
