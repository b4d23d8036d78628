#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "g2g/errors.hpp"
#include "g2g/graph.hpp"
#include "g2g/rng.hpp"
#include "test_support.hpp"

using namespace g2g;
using namespace testsupport;

TEST_CASE("skeleton basics") {
    Skeleton s(4);
    CHECK(s.vertex_count() == 4);
    CHECK(s.edge_count() == 0);
    s.add_edge(0, 1);
    s.add_edge(2, 1);
    CHECK(s.has_edge(1, 0));
    CHECK(s.has_edge(1, 2));
    CHECK_FALSE(s.has_edge(0, 2));
    CHECK(s.edge_count() == 2);
    CHECK(s.neighbors(1) == std::vector<int>{0, 2});
    CHECK(s.adjacency_excluding(1, 2) == std::vector<int>{0});
    s.remove_edge(1, 0);
    CHECK_FALSE(s.has_edge(0, 1));
    CHECK(s.edges() == std::vector<std::pair<int, int>>{{1, 2}});

    CHECK_THROWS_AS(s.add_edge(0, 0), SelfLoop);
    CHECK_THROWS_AS(s.add_edge(0, 4), IndexOutOfRange);
    CHECK_THROWS_AS(s.has_edge(-1, 2), IndexOutOfRange);
}

TEST_CASE("complete skeleton") {
    auto c = Skeleton::complete(5);
    CHECK(c.edge_count() == 10);
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) CHECK(c.has_edge(i, j));
}

TEST_CASE("dag construction and queries") {
    Dag g(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
    CHECK(g.vertex_count() == 4);
    CHECK(g.parents(2) == std::vector<int>{0, 1});
    CHECK(g.children(0) == std::vector<int>{1, 2});
    CHECK(g.parents(0).empty());
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK(g.edges() ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}, {2, 3}});
    CHECK(g.labels()[1] == "x1");

    auto topo = g.topological_order();
    std::vector<int> pos(4);
    for (int i = 0; i < 4; ++i) pos[topo[i]] = i;
    for (auto [a, b] : g.edges()) CHECK(pos[a] < pos[b]);
}

TEST_CASE("dag validation errors") {
    CHECK_THROWS_AS(Dag(3, {{0, 1}, {1, 2}, {2, 0}}), CycleDetected);
    CHECK_THROWS_AS(Dag(3, {{1, 1}}), SelfLoop);
    CHECK_THROWS_AS(Dag(3, {{0, 3}}), IndexOutOfRange);
    CHECK_THROWS_AS(Dag(3, {{0, 1}, {0, 1}}), DuplicateEdge);
    CHECK_THROWS_AS(Dag(2, {{0, 1}}, {"a"}), DimensionMismatch);
}

TEST_CASE("skeleton_of drops direction") {
    auto s = skeleton_of(chain4());
    CHECK(s.edge_count() == 3);
    CHECK(s.has_edge(0, 1));
    CHECK(s.has_edge(1, 2));
    CHECK(s.has_edge(2, 3));
}

TEST_CASE("d-separation on hand fixtures") {
    auto ch = chain4();
    CHECK_FALSE(d_separated(ch, 0, 3, {}));
    CHECK(d_separated(ch, 0, 3, std::vector<int>{1}));
    CHECK(d_separated(ch, 0, 3, std::vector<int>{2}));
    CHECK(d_separated(ch, 0, 2, std::vector<int>{1}));
    CHECK_FALSE(d_separated(ch, 0, 2, std::vector<int>{3}));

    auto co = collider4();  // 0 -> 2 <- 1, vertex 3 isolated
    CHECK(d_separated(co, 0, 1, {}));
    CHECK_FALSE(d_separated(co, 0, 1, std::vector<int>{2}));
    CHECK(d_separated(co, 0, 3, {}));

    Dag desc(4, {{0, 2}, {1, 2}, {2, 3}});  // collider with descendant
    CHECK(d_separated(desc, 0, 1, {}));
    CHECK_FALSE(d_separated(desc, 0, 1, std::vector<int>{3}));

    auto cc = commoncause4();
    CHECK_FALSE(d_separated(cc, 1, 2, {}));
    CHECK(d_separated(cc, 1, 2, std::vector<int>{0}));
    CHECK(d_separated(cc, 1, 3, std::vector<int>{0}));
}

TEST_CASE("d-separation argument validation") {
    auto ch = chain4();
    CHECK_THROWS_AS(d_separated(ch, 1, 1, {}), SelfLoop);
    CHECK_THROWS_AS(d_separated(ch, 0, 3, std::vector<int>{0}), IndexOutOfRange);
    CHECK_THROWS_AS(d_separated(ch, 0, 4, {}), IndexOutOfRange);
}

TEST_CASE("d-separation matches path enumeration on random dags") {
    Rng rng(Rng::derive(0xd5ef01, 7));
    for (int rep = 0; rep < 40; ++rep) {
        const int d = 3 + static_cast<int>(rng.bounded(4));  // 3..6
        auto g = sample_er_dag(d, rep % 2 ? 3 : 1, rng);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                std::vector<int> rest;
                for (int v = 0; v < d; ++v)
                    if (v != i && v != j) rest.push_back(v);
                const int m = static_cast<int>(rest.size());
                for (int mask = 0; mask < (1 << m); ++mask) {
                    std::vector<int> cond;
                    for (int b = 0; b < m; ++b)
                        if (mask & (1 << b)) cond.push_back(rest[b]);
                    CAPTURE(d);
                    CAPTURE(i);
                    CAPTURE(j);
                    CHECK(d_separated(g, i, j, cond) == dsep_paths(g, i, j, cond));
                }
            }
    }
}

TEST_CASE("er sampler density and degenerate cases") {
    Rng rng(42);
    // expected edges = C(d,2) * min(1, 2k/(d-1)) = d*k when uncapped
    long total = 0;
    const int draws = 500;
    for (int t = 0; t < draws; ++t) {
        auto g = sample_er_dag(20, 3, rng);
        total += static_cast<long>(g.edges().size());
        // parents listed only from lower indices: acyclic by construction
        for (auto [a, b] : g.edges()) CHECK(a < b);
    }
    const double mean = static_cast<double>(total) / draws;
    CHECK(mean > 54.0);  // 60 ± 6 over 500 draws is a > 7-sigma band
    CHECK(mean < 66.0);

    // p capped at 1: d=4, k=3 gives 2k/(d-1) = 2 -> complete graph
    auto g = sample_er_dag(4, 3, rng);
    CHECK(g.edges().size() == 6);

    CHECK_THROWS_AS(sample_er_dag(1, 1, rng), IndexOutOfRange);
    CHECK_THROWS_AS(sample_er_dag(5, 0, rng), IndexOutOfRange);
}

TEST_CASE("relabel permutes vertices and labels") {
    Dag g(3, {{0, 1}, {1, 2}}, {"a", "b", "c"});
    std::vector<int> perm{2, 0, 1};  // old i -> new perm[i]
    auto h = relabel(g, perm);
    CHECK(h.has_edge(2, 0));
    CHECK(h.has_edge(0, 1));
    CHECK(h.labels()[2] == "a");
    CHECK(h.labels()[0] == "b");
    CHECK(h.labels()[1] == "c");
    // d-separation statements carry over
    CHECK(d_separated(g, 0, 2, std::vector<int>{1}) ==
          d_separated(h, 2, 1, std::vector<int>{0}));

    CHECK_THROWS_AS(relabel(g, std::vector<int>{0, 0, 1}), IndexOutOfRange);
}

TEST_CASE("edge list round trip") {
    Dag g(4, {{0, 1}, {1, 2}, {2, 3}}, {"alpha", "beta", "gamma", "delta"});
    std::ostringstream out;
    write_edge_list(out, g);
    std::istringstream in(out.str());
    auto h = dag_from_edge_list(read_edge_list(in));
    CHECK(h.edges() == g.edges());
    CHECK(h.labels()[2] == "gamma");

    Skeleton s = skeleton_of(g);
    std::ostringstream out2;
    write_edge_list(out2, s, g.labels());
    std::istringstream in2(out2.str());
    auto s2 = skeleton_from_edge_list(read_edge_list(in2));
    CHECK(s2 == s);
}

TEST_CASE("edge list parsing details") {
    std::istringstream ok(
        "# comment line\n"
        "vars: a, b, c\n"
        "\n"
        "a b   # trailing comment\n"
        "1 c\n");
    auto parsed = read_edge_list(ok);
    auto g = dag_from_edge_list(parsed);
    CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

    std::istringstream undirected("vars: a, b\na -- b\n");
    CHECK_THROWS_AS(dag_from_edge_list(read_edge_list(undirected)), ParseError);
    std::istringstream undirected2("vars: a, b\na -- b\n");
    auto s = skeleton_from_edge_list(read_edge_list(undirected2));
    CHECK(s.has_edge(0, 1));

    std::istringstream unknown("vars: a, b\na zz\n");
    CHECK_THROWS_AS(read_edge_list(unknown), UnknownVariableName);

    std::istringstream noheader("a b\n");
    CHECK_THROWS_AS(read_edge_list(noheader), ParseError);

    std::istringstream empty("");
    CHECK_THROWS_AS(read_edge_list(empty), EmptyFile);

    CHECK_THROWS_AS(read_edge_list_file("/nonexistent/file.txt"), IoError);
}
