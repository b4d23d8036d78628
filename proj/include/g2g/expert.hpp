#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "g2g/graph.hpp"
#include "g2g/rng.hpp"

namespace g2g {

/// Memoized noisy predictor of d-separation statements. Each distinct query
/// (unordered pair, conditioning set) is answered once — correctly with
/// probability p_dsep — and the answer is replayed on repeats, so one
/// prediction stays consistent across the whole run.
class DsepPredictor {
  public:
    DsepPredictor(Dag truth, double p_dsep, std::uint64_t seed);

    bool predict(int i, int j, const std::vector<int>& cond);
    double accuracy() const { return p_; }

  private:
    Dag truth_;
    double p_;
    Rng rng_;
    std::map<std::tuple<int, int, std::vector<int>>, bool> memo_;
};

/// What the expert hands the algorithm: a guessed skeleton, plus (optionally)
/// a d-separating-set predictor for conditioning-order hints.
struct ExpertPrediction {
    Skeleton skeleton;
    std::shared_ptr<DsepPredictor> dsep;  // null ⇒ uniform subset order

    std::optional<double> dsep_accuracy() const {
        if (dsep) return dsep->accuracy();
        return std::nullopt;
    }
};

/// Binary symmetric channel on each vertex pair: the guessed skeleton agrees
/// with the truth on a pair with probability p_psi, independently.
Skeleton simulate_edge_expert(const Skeleton& truth, double p_psi, Rng& rng);

/// Edge sequence fed to the level loop: a permutation of the working
/// skeleton's edges with all predicted-absent edges in front.
struct EdgeOrder {
    std::vector<std::pair<int, int>> edges;
    std::size_t boundary = 0;  // edges[0..boundary) are predicted absent
};

/// Uniform shuffle of C's edges followed by a stable partition on the
/// expert's guess; relative order inside each block stays uniform.
EdgeOrder guided_edge_order(const Skeleton& working, const Skeleton& guess, Rng& rng);

/// Uniform shuffle, no expert (boundary 0).
EdgeOrder uniform_edge_order(const Skeleton& working, Rng& rng);

/// Supplies the conditioning-subset order for one (edge, size) step.
class SubsetPolicy {
  public:
    virtual ~SubsetPolicy() = default;
    /// All size-k subsets of pool, in test order.
    virtual std::vector<std::vector<int>> arrange(int i, int j,
                                                  const std::vector<int>& pool,
                                                  int k) = 0;
};

/// Uniformly shuffled subsets.
class UniformSubsetPolicy : public SubsetPolicy {
  public:
    explicit UniformSubsetPolicy(Rng& rng) : rng_(&rng) {}
    std::vector<std::vector<int>> arrange(int i, int j, const std::vector<int>& pool,
                                          int k) override;

  private:
    Rng* rng_;
};

/// Uniform shuffle, then predicted-d-separating subsets moved to the front
/// (stable partition on the predictor's memoized answers).
class GuidedSubsetPolicy : public SubsetPolicy {
  public:
    GuidedSubsetPolicy(DsepPredictor& pred, Rng& rng) : pred_(&pred), rng_(&rng) {}
    std::vector<std::vector<int>> arrange(int i, int j, const std::vector<int>& pool,
                                          int k) override;

  private:
    DsepPredictor* pred_;
    Rng* rng_;
};

struct Orderings {
    EdgeOrder order;
    std::unique_ptr<SubsetPolicy> policy;
};

/// Turn one expert prediction into the edge order over `working` and the
/// subset policy the pruning steps will consult.
Orderings extract_orderings(const ExpertPrediction& pred, const Skeleton& working,
                            Rng& rng);

/// Parse an expert-guessed skeleton from a file. Accepts either the edge-list
/// format (see graph.hpp; arc direction is dropped) or a single
/// "EDGES: (name, name), (name, name), ..." declaration. Names must match
/// `names`; such files carry no d-separation hints.
Skeleton load_expert_skeleton(const std::string& path,
                              const std::vector<std::string>& names);

/// Exact size-k subsets of pool in lexicographic position order.
std::vector<std::vector<int>> k_subsets(const std::vector<int>& pool, int k);

}  // namespace g2g
