#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "g2g/citest.hpp"
#include "g2g/expert.hpp"
#include "g2g/graph.hpp"

namespace g2g {

struct DiscoveryResult {
    Skeleton skeleton{0};
    std::uint64_t tests_run = 0;
    std::vector<std::uint64_t> tests_per_level;  // indexed by conditioning-set size
    std::map<std::pair<int, int>, std::vector<int>> separating_sets;
    std::uint64_t wall_ns = 0;
};

std::string to_json(const DiscoveryResult& r, const std::vector<std::string>& names);

struct PcOptions {
    // Level rule reading. Default: an edge {a,b} qualifies at level l if either
    // endpoint has l non-{a,b} neighbors, and every qualifying side is pruned
    // in turn (lower endpoint first). literal_rule restricts both the check
    // and the pool to the lower-index endpoint, which costs exactness.
    bool literal_rule = false;
};

struct EdgePruneResult {
    Skeleton skeleton{0};
    std::uint64_t tests = 0;
    std::optional<std::vector<int>> witness;
};

/// One pruning step: test edge {i,j} against every size-k subset of
/// adj(C, x_i) \ {x_j} in policy order, removing the edge at the first
/// independence verdict. k larger than the pool is a no-op.
EdgePruneResult edge_prune(const Skeleton& C, int i, int j, int k,
                           SubsetPolicy& policy, CitEngine& cit);

/// Level loop: for k in [k_min, k_max], sweep O once, pruning each surviving
/// edge that qualifies at size k. Returns the number of edges that qualified
/// per k (the stopping signal for the iterative callers). Mutates C and the
/// accounting in `out`.
std::vector<std::uint64_t> edge_loop(Skeleton& C, const EdgeOrder& O, int k_min,
                                     int k_max, SubsetPolicy& policy, CitEngine& cit,
                                     DiscoveryResult& out, const PcOptions& opt = {});

/// Classic skeleton phase: levels 0,1,2,... over a fixed edge order, stopping
/// after the first level at which no edge qualified.
DiscoveryResult pc_skeleton(CitEngine& cit, int d, const EdgeOrder& O,
                            SubsetPolicy& policy, const PcOptions& opt = {});

/// Order-independent variant: adjacency pools are frozen at the start of each
/// level and removals are applied only after the level completes.
DiscoveryResult pc_stable(CitEngine& cit, int d, const EdgeOrder& O,
                          SubsetPolicy& policy);

/// Reduction-style approximation: levels 0..eta, conditioning subsets drawn
/// from adj(C,x_a) ∪ adj(C,x_b) minus the endpoints, no early stop.
DiscoveryResult rpc_approx(CitEngine& cit, int d, int eta, const EdgeOrder& O,
                           SubsetPolicy& policy);

/// Single level-loop pass over k = 0..d-1 where edge presence alone
/// qualifies; the guess enters only through O and the subset policy.
DiscoveryResult gpc_skeleton(CitEngine& cit, int d, const EdgeOrder& O,
                             SubsetPolicy& policy);

/// Expert-guided variants: orderings extracted from the prediction over the
/// complete graph, then the corresponding level loop.
DiscoveryResult pc_guess(CitEngine& cit, int d, const ExpertPrediction& pred,
                         Rng& rng, const PcOptions& opt = {});
DiscoveryResult gpc_guess(CitEngine& cit, int d, const ExpertPrediction& pred,
                          Rng& rng);

/// Unguided baseline: a fresh fair-coin skeleton guess (the p=1/2 channel
/// does not depend on the truth) and uniform subset order.
DiscoveryResult gpc_baseline(CitEngine& cit, int d, Rng& rng);

}  // namespace g2g
