#include "g2g/discovery.hpp"

#include <algorithm>
#include <chrono>

#include <nlohmann/json.hpp>

#include "g2g/errors.hpp"

namespace g2g {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t ns_since(Clock::time_point t0) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

struct PruneScan {
    bool removed = false;
    std::uint64_t tests = 0;
    std::vector<int> witness;
};

// Test (i ⊥ j | W) over every size-k W ⊆ pool in policy order, stopping at
// the first independence.
PruneScan scan_subsets(int i, int j, const std::vector<int>& pool, int k,
                       SubsetPolicy& policy, CitEngine& cit) {
    PruneScan s;
    if (k > static_cast<int>(pool.size())) return s;
    for (const auto& w : policy.arrange(i, j, pool, k)) {
        ++s.tests;
        if (cit.test(i, j, w).independent) {
            s.removed = true;
            s.witness = w;
            return s;
        }
    }
    return s;
}

struct Side {
    int i, j;               // test e_{i,j}: subsets come from i's neighborhood
    std::vector<int> pool;  // adj(C, x_i) \ {x_j}
};

// Endpoint neighborhoods feeding the pruning step at size k. Both qualifying
// sides are scanned, lower endpoint first; pruning one side short-circuits
// the other. Missing either side breaks exactness: an edge can be separable
// only within the larger neighborhood at a size the smaller one still covers.
// The literal reading consults the lower-index side alone.
std::vector<Side> prune_sides(const Skeleton& C, int a, int b, int k, bool literal) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    std::vector<Side> sides;
    auto plo = C.adjacency_excluding(lo, hi);
    if (static_cast<int>(plo.size()) >= k) sides.push_back({lo, hi, std::move(plo)});
    if (literal) return sides;
    auto phi = C.adjacency_excluding(hi, lo);
    if (static_cast<int>(phi.size()) >= k) sides.push_back({hi, lo, std::move(phi)});
    return sides;
}

void ensure_level(DiscoveryResult& out, int k) {
    if (static_cast<int>(out.tests_per_level.size()) <= k)
        out.tests_per_level.resize(k + 1, 0);
}

}  // namespace

EdgePruneResult edge_prune(const Skeleton& C, int i, int j, int k,
                           SubsetPolicy& policy, CitEngine& cit) {
    if (!C.has_edge(i, j)) throw IndexOutOfRange("edge_prune: edge not in skeleton");
    EdgePruneResult r;
    r.skeleton = C;
    auto pool = C.adjacency_excluding(i, j);
    auto s = scan_subsets(i, j, pool, k, policy, cit);
    r.tests = s.tests;
    if (s.removed) {
        r.skeleton.remove_edge(i, j);
        r.witness = std::move(s.witness);
    }
    return r;
}

std::vector<std::uint64_t> edge_loop(Skeleton& C, const EdgeOrder& O, int k_min,
                                     int k_max, SubsetPolicy& policy, CitEngine& cit,
                                     DiscoveryResult& out, const PcOptions& opt) {
    std::vector<std::uint64_t> qualified;
    for (int k = k_min; k <= k_max; ++k) {
        ensure_level(out, k);
        std::uint64_t q = 0;
        for (auto [a, b] : O.edges) {
            if (!C.has_edge(a, b)) continue;
            auto sides = prune_sides(C, a, b, k, opt.literal_rule);
            if (sides.empty()) continue;
            ++q;
            for (const auto& side : sides) {
                auto s = scan_subsets(side.i, side.j, side.pool, k, policy, cit);
                out.tests_run += s.tests;
                out.tests_per_level[k] += s.tests;
                if (s.removed) {
                    C.remove_edge(a, b);
                    out.separating_sets[{std::min(a, b), std::max(a, b)}] =
                        std::move(s.witness);
                    break;
                }
            }
        }
        qualified.push_back(q);
    }
    return qualified;
}

DiscoveryResult pc_skeleton(CitEngine& cit, int d, const EdgeOrder& O,
                            SubsetPolicy& policy, const PcOptions& opt) {
    const auto t0 = Clock::now();
    DiscoveryResult out;
    Skeleton C = Skeleton::complete(d);
    for (int level = 0; level < d; ++level) {
        auto q = edge_loop(C, O, level, level, policy, cit, out, opt);
        if (q[0] == 0) break;
    }
    out.skeleton = std::move(C);
    out.wall_ns = ns_since(t0);
    return out;
}

DiscoveryResult pc_stable(CitEngine& cit, int d, const EdgeOrder& O,
                          SubsetPolicy& policy) {
    const auto t0 = Clock::now();
    DiscoveryResult out;
    Skeleton C = Skeleton::complete(d);
    for (int level = 0; level < d; ++level) {
        ensure_level(out, level);
        // pools frozen at level start; removals applied after the level
        std::vector<std::vector<int>> nbrs(d);
        for (int v = 0; v < d; ++v) nbrs[v] = C.neighbors(v);
        auto frozen_pool = [&](int i, int j) {
            std::vector<int> p;
            p.reserve(nbrs[i].size());
            for (int v : nbrs[i])
                if (v != j) p.push_back(v);
            return p;
        };

        std::uint64_t q = 0;
        std::vector<std::pair<int, int>> removals;
        for (auto [a, b] : O.edges) {
            if (!C.has_edge(a, b)) continue;
            const int lo = std::min(a, b), hi = std::max(a, b);
            std::vector<Side> sides;
            auto plo = frozen_pool(lo, hi);
            if (static_cast<int>(plo.size()) >= level)
                sides.push_back({lo, hi, std::move(plo)});
            auto phi = frozen_pool(hi, lo);
            if (static_cast<int>(phi.size()) >= level)
                sides.push_back({hi, lo, std::move(phi)});
            if (sides.empty()) continue;
            ++q;
            for (const auto& side : sides) {
                auto s = scan_subsets(side.i, side.j, side.pool, level, policy, cit);
                out.tests_run += s.tests;
                out.tests_per_level[level] += s.tests;
                if (s.removed) {
                    removals.emplace_back(a, b);
                    out.separating_sets[{lo, hi}] = std::move(s.witness);
                    break;
                }
            }
        }
        for (auto [a, b] : removals) C.remove_edge(a, b);
        if (q == 0) break;
    }
    out.skeleton = std::move(C);
    out.wall_ns = ns_since(t0);
    return out;
}

DiscoveryResult rpc_approx(CitEngine& cit, int d, int eta, const EdgeOrder& O,
                           SubsetPolicy& policy) {
    if (eta < 0 || eta > d - 2) throw ConfigError("eta outside [0, d-2]");
    const auto t0 = Clock::now();
    DiscoveryResult out;
    Skeleton C = Skeleton::complete(d);
    for (int level = 0; level <= eta; ++level) {
        ensure_level(out, level);
        for (auto [a, b] : O.edges) {
            if (!C.has_edge(a, b)) continue;
            // union of both neighborhoods, endpoints excluded
            auto pool = C.adjacency_excluding(a, b);
            for (int v : C.adjacency_excluding(b, a))
                if (!std::binary_search(pool.begin(), pool.end(), v)) pool.push_back(v);
            std::sort(pool.begin(), pool.end());
            if (static_cast<int>(pool.size()) < level) continue;
            auto s = scan_subsets(a, b, pool, level, policy, cit);
            out.tests_run += s.tests;
            out.tests_per_level[level] += s.tests;
            if (s.removed) {
                C.remove_edge(a, b);
                out.separating_sets[{std::min(a, b), std::max(a, b)}] =
                    std::move(s.witness);
            }
        }
    }
    out.skeleton = std::move(C);
    out.wall_ns = ns_since(t0);
    return out;
}

DiscoveryResult gpc_skeleton(CitEngine& cit, int d, const EdgeOrder& O,
                             SubsetPolicy& policy) {
    const auto t0 = Clock::now();
    DiscoveryResult out;
    Skeleton C = Skeleton::complete(d);
    edge_loop(C, O, 0, d - 1, policy, cit, out);
    out.skeleton = std::move(C);
    out.wall_ns = ns_since(t0);
    return out;
}

DiscoveryResult pc_guess(CitEngine& cit, int d, const ExpertPrediction& pred,
                         Rng& rng, const PcOptions& opt) {
    Skeleton complete = Skeleton::complete(d);
    auto ord = extract_orderings(pred, complete, rng);
    return pc_skeleton(cit, d, ord.order, *ord.policy, opt);
}

DiscoveryResult gpc_guess(CitEngine& cit, int d, const ExpertPrediction& pred,
                          Rng& rng) {
    Skeleton complete = Skeleton::complete(d);
    auto ord = extract_orderings(pred, complete, rng);
    return gpc_skeleton(cit, d, ord.order, *ord.policy);
}

DiscoveryResult gpc_baseline(CitEngine& cit, int d, Rng& rng) {
    Skeleton guess(d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (rng.bernoulli(0.5)) guess.add_edge(i, j);
    ExpertPrediction pred{std::move(guess), nullptr};
    return gpc_guess(cit, d, pred, rng);
}

std::string to_json(const DiscoveryResult& r, const std::vector<std::string>& names) {
    nlohmann::json j;
    j["edges"] = nlohmann::json::array();
    for (auto [a, b] : r.skeleton.edges()) {
        if (static_cast<int>(names.size()) == r.skeleton.vertex_count())
            j["edges"].push_back({names[a], names[b]});
        else
            j["edges"].push_back({a, b});
    }
    j["tests_run"] = r.tests_run;
    j["tests_per_level"] = r.tests_per_level;
    j["separating_sets"] = nlohmann::json::object();
    for (const auto& [e, w] : r.separating_sets)
        j["separating_sets"][std::to_string(e.first) + "-" + std::to_string(e.second)] = w;
    j["wall_ns"] = r.wall_ns;
    return j.dump(2);
}

}  // namespace g2g
