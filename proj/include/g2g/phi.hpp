#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "g2g/dataset.hpp"
#include "g2g/graph.hpp"

namespace g2g {

enum class GuidedAlgo { pc_guess, gpc_guess };

/// Perfect-recovery probability computed by exact enumeration over test
/// outcomes under the memoryless channel (d-separated queries answer
/// "independent" w.p. 1-alpha, connected ones w.p. beta). `order` fixes the
/// edge sequence; subset order within a step cannot change the recovered
/// skeleton's law, so it never enters. alpha/beta are unconstrained in [0,1]
/// here — this is a pure enumeration, not the production channel engine.
/// `mass` is the total probability over enumerated branches (must be 1).
/// Limited to d <= 4.
struct PhiExact {
    double phi = 0;
    double mass = 0;
};

PhiExact exact_phi_fixed_order(const Dag& truth, GuidedAlgo algo,
                               const std::vector<std::pair<int, int>>& order,
                               double alpha, double beta);

/// Expectation of the above over expert guesses at accuracy p_psi: enumerates
/// all 2^C(d,2) guessed skeletons with their channel weights and, for each,
/// all block-respecting edge orders (predicted-absent first, uniform within
/// blocks). Limited to d <= 4.
double exact_phi_expert(const Dag& truth, GuidedAlgo algo, double p_psi,
                        double alpha, double beta);

struct PhiEstimate {
    double estimate = 0;
    std::uint64_t trials = 0;
    double ci_low = 0, ci_high = 0;  // 95% normal-approximation interval
};

/// Monte-Carlo perfect-recovery rate with channel tests: fresh expert draw,
/// orderings, and channel coins each trial. Requires 1-alpha > beta.
PhiEstimate estimate_phi_channel(const Dag& truth, GuidedAlgo algo, double p_psi,
                                 double alpha, double beta, std::uint64_t trials,
                                 std::uint64_t master_seed);

/// Monte-Carlo perfect-recovery rate on finite samples: fixed weighted truth,
/// fresh dataset (standardized) and expert draw per trial, Fisher-Z at
/// `alpha`.
PhiEstimate estimate_phi_data(const WeightedDag& truth, GuidedAlgo algo,
                              double p_psi, int n, double alpha,
                              std::uint64_t trials, std::uint64_t master_seed);

struct AuditPoint {
    double p = 0;
    double mean = 0;
    double se = 0;
    double ci_low = 0, ci_high = 0;
    std::uint64_t trials = 0;
    bool violation = false;  // below the previous grid point by > 2 pooled SE
};

/// Metric-vs-accuracy curve with common random numbers: each trial reuses the
/// same sub-seeds at every grid point, and expert channels are coupled through
/// shared per-pair uniforms, so curves are paired. Channel mode scores
/// perfect recovery; data mode scores F1.
std::vector<AuditPoint> monotonicity_audit_channel(const Dag& truth, GuidedAlgo algo,
                                                   const std::vector<double>& p_grid,
                                                   double alpha, double beta,
                                                   std::uint64_t trials,
                                                   std::uint64_t master_seed);

std::vector<AuditPoint> monotonicity_audit_data(const WeightedDag& truth,
                                                GuidedAlgo algo,
                                                const std::vector<double>& p_grid,
                                                int n, double alpha,
                                                std::uint64_t trials,
                                                std::uint64_t master_seed);

struct RuntimePoint {
    double p_dsep = 0;
    double mean_tests = 0;
    double se = 0;
    std::uint64_t reps = 0;
};

/// Expected number of tests one guided pruning step spends on `edge` with the
/// given conditioning pool, as a function of the d-separation-predictor
/// accuracy. Channel coins and subset shuffles are shared across grid points
/// (paired comparison). Requires 1-alpha > beta.
std::vector<RuntimePoint> runtime_audit(const Dag& truth, std::pair<int, int> edge,
                                        const std::vector<int>& pool, int k,
                                        const std::vector<double>& p_grid,
                                        double alpha, double beta, std::uint64_t reps,
                                        std::uint64_t master_seed);

}  // namespace g2g
