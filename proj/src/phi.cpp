#include "g2g/phi.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>

#include "g2g/citest.hpp"
#include "g2g/discovery.hpp"
#include "g2g/errors.hpp"
#include "g2g/expert.hpp"
#include "g2g/metrics.hpp"

namespace g2g {

namespace {

// --- exact enumeration over channel outcomes ---------------------------------
//
// Deliberately independent of the discovery implementation: the level/side
// semantics are re-derived here from their definitions so the two routes can
// cross-check each other. Works on edge-presence bitmasks; a pruning step at
// size k removes its edge with probability
//   1 - prod_{W in [pool]^k} P(test says dependent | d-sep status of W),
// since channel invocations are mutually independent and subset order cannot
// change whether *some* subset fires.

struct PairIndex {
    int d = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> at;

    explicit PairIndex(int d_) : d(d_), at(d_, std::vector<int>(d_, -1)) {
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                at[i][j] = at[j][i] = static_cast<int>(pairs.size());
                pairs.emplace_back(i, j);
            }
    }
};

class Enumerator {
  public:
    Enumerator(const Dag& truth, GuidedAlgo algo, double alpha, double beta)
        : truth_(truth), algo_(algo), alpha_(alpha), beta_(beta), px_(truth.vertex_count()) {
        if (truth.vertex_count() > 4) throw TooLarge("exact enumeration limited to d <= 4");
        if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1)
            throw ConfigError("alpha/beta outside [0,1]");
        target_ = 0;
        for (auto [a, b] : truth.edges()) target_ |= 1u << px_.at[a][b];
    }

    // order = permutation of all pair indices
    PhiExact run(const std::vector<int>& order) {
        order_ = &order;
        memo_.clear();
        const std::uint32_t full = (1u << px_.pairs.size()) - 1;
        auto [phi, mass] = visit(0, 0, full, false);
        return {phi, mass};
    }

    const PairIndex& pairs() const { return px_; }

  private:
    std::vector<int> neighborhood(std::uint32_t mask, int v, int excl) const {
        std::vector<int> out;
        for (int u = 0; u < px_.d; ++u)
            if (u != v && u != excl && (mask >> px_.at[v][u]) & 1u) out.push_back(u);
        return out;
    }

    bool dsep(int pair_idx, const std::vector<int>& w) {
        std::uint32_t wmask = 0;
        for (int v : w) wmask |= 1u << v;
        auto key = std::make_pair(pair_idx, wmask);
        auto it = dsep_memo_.find(key);
        if (it != dsep_memo_.end()) return it->second;
        auto [a, b] = px_.pairs[pair_idx];
        bool s = d_separated(truth_, a, b, w);
        dsep_memo_.emplace(key, s);
        return s;
    }

    // One pruning step scans every qualifying endpoint neighborhood (lower
    // endpoint first); survival needs every performed test to say dependent,
    // so the keep probability is the product over both scans — short-circuit
    // or not. `any_side` reports whether the edge qualified at all.
    double step_keep_probability(std::uint32_t mask, int e, int k, bool& any_side) {
        auto [a, b] = px_.pairs[e];
        const int lo = std::min(a, b), hi = std::max(a, b);
        double keep = 1.0;
        any_side = false;
        for (auto [i, j] : {std::pair{lo, hi}, std::pair{hi, lo}}) {
            auto pool = neighborhood(mask, i, j);
            if (static_cast<int>(pool.size()) < k) continue;
            any_side = true;
            for (const auto& w : k_subsets(pool, k))
                keep *= dsep(e, w) ? alpha_ : (1.0 - beta_);
        }
        return keep;
    }

    // (phi, mass) from state: stage k, position in order, surviving edges,
    // whether any edge has qualified during this stage
    std::pair<double, double> visit(int k, int pos, std::uint32_t mask, bool qualified) {
        const int P = static_cast<int>(px_.pairs.size());
        if (pos == P) {
            const bool last = k + 1 >= px_.d;
            const bool stop = last || (algo_ == GuidedAlgo::pc_guess && !qualified);
            if (stop) return {mask == target_ ? 1.0 : 0.0, 1.0};
            return visit(k + 1, 0, mask, false);
        }
        auto key = std::make_tuple(k, pos, mask, qualified);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        const int e = (*order_)[pos];
        std::pair<double, double> res;
        bool any_side = false;
        double keep = 1.0;
        if ((mask >> e) & 1u) keep = step_keep_probability(mask, e, k, any_side);
        if (!((mask >> e) & 1u) || !any_side) {
            res = visit(k, pos + 1, mask, qualified);
        } else {
            const double q = 1.0 - keep;
            auto kept = visit(k, pos + 1, mask, true);
            if (q == 0.0) {
                res = kept;
            } else {
                auto removed = visit(k, pos + 1, mask & ~(1u << e), true);
                res = {(1 - q) * kept.first + q * removed.first,
                       (1 - q) * kept.second + q * removed.second};
            }
        }
        memo_.emplace(key, res);
        return res;
    }

    const Dag& truth_;
    GuidedAlgo algo_;
    double alpha_, beta_;
    PairIndex px_;
    std::uint32_t target_ = 0;
    const std::vector<int>* order_ = nullptr;
    std::map<std::tuple<int, int, std::uint32_t, bool>, std::pair<double, double>> memo_;
    std::map<std::pair<int, std::uint32_t>, bool> dsep_memo_;
};

std::vector<int> order_to_indices(const PairIndex& px,
                                  const std::vector<std::pair<int, int>>& order) {
    const int P = static_cast<int>(px.pairs.size());
    if (static_cast<int>(order.size()) != P)
        throw DimensionMismatch("order must list every vertex pair exactly once");
    std::vector<char> seen(P, 0);
    std::vector<int> idx;
    idx.reserve(P);
    for (auto [a, b] : order) {
        if (a < 0 || b < 0 || a >= px.d || b >= px.d || a == b)
            throw IndexOutOfRange("bad pair in order");
        int e = px.at[a][b];
        if (seen[e]) throw DuplicateEdge("pair repeated in order");
        seen[e] = 1;
        idx.push_back(e);
    }
    return idx;
}

double mean_ci_half(double mean, std::uint64_t n) {
    return 1.96 * std::sqrt(std::max(0.0, mean * (1.0 - mean)) / static_cast<double>(n));
}

}  // namespace

PhiExact exact_phi_fixed_order(const Dag& truth, GuidedAlgo algo,
                               const std::vector<std::pair<int, int>>& order,
                               double alpha, double beta) {
    Enumerator en(truth, algo, alpha, beta);
    return en.run(order_to_indices(en.pairs(), order));
}

double exact_phi_expert(const Dag& truth, GuidedAlgo algo, double p_psi,
                        double alpha, double beta) {
    if (p_psi < 0 || p_psi > 1) throw ConfigError("p_psi outside [0,1]");
    Enumerator en(truth, algo, alpha, beta);
    const int P = static_cast<int>(en.pairs().pairs.size());
    std::uint32_t target = 0;
    for (auto [a, b] : truth.edges()) target |= 1u << en.pairs().at[a][b];

    std::map<std::vector<int>, double> phi_by_order;  // shared across guesses
    double total = 0.0;
    for (std::uint32_t guess = 0; guess < (1u << P); ++guess) {
        const int agree =
            P - std::popcount((guess ^ target) & ((1u << P) - 1));
        const double w = std::pow(p_psi, agree) * std::pow(1.0 - p_psi, P - agree);
        if (w == 0.0) continue;

        std::vector<int> absent, present;
        for (int e = 0; e < P; ++e)
            ((guess >> e) & 1u ? present : absent).push_back(e);

        double sum = 0.0;
        std::uint64_t count = 0;
        std::vector<int> pa = absent;
        do {
            std::vector<int> pp = present;
            do {
                std::vector<int> order = pa;
                order.insert(order.end(), pp.begin(), pp.end());
                auto it = phi_by_order.find(order);
                double phi;
                if (it != phi_by_order.end()) {
                    phi = it->second;
                } else {
                    phi = en.run(order).phi;
                    phi_by_order.emplace(order, phi);
                }
                sum += phi;
                ++count;
            } while (std::next_permutation(pp.begin(), pp.end()));
        } while (std::next_permutation(pa.begin(), pa.end()));
        total += w * (sum / static_cast<double>(count));
    }
    return total;
}

PhiEstimate estimate_phi_channel(const Dag& truth, GuidedAlgo algo, double p_psi,
                                 double alpha, double beta, std::uint64_t trials,
                                 std::uint64_t master_seed) {
    if (trials == 0) throw ConfigError("need at least one trial");
    const Skeleton target = skeleton_of(truth);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t ts = Rng::derive(master_seed, t);
        Rng expert_rng(Rng::derive(ts, 1));
        Rng algo_rng(Rng::derive(ts, 2));
        NoisyChannelCit cit(truth, alpha, beta, Rng::derive(ts, 3));
        ExpertPrediction pred{simulate_edge_expert(target, p_psi, expert_rng), nullptr};
        DiscoveryResult r = algo == GuidedAlgo::pc_guess
                                ? pc_guess(cit, truth.vertex_count(), pred, algo_rng)
                                : gpc_guess(cit, truth.vertex_count(), pred, algo_rng);
        hits += r.skeleton == target;
    }
    PhiEstimate e;
    e.trials = trials;
    e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    const double h = mean_ci_half(e.estimate, trials);
    e.ci_low = e.estimate - h;
    e.ci_high = e.estimate + h;
    return e;
}

PhiEstimate estimate_phi_data(const WeightedDag& truth, GuidedAlgo algo,
                              double p_psi, int n, double alpha,
                              std::uint64_t trials, std::uint64_t master_seed) {
    if (trials == 0) throw ConfigError("need at least one trial");
    const Skeleton target = skeleton_of(truth.dag);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t ts = Rng::derive(master_seed, t);
        Rng data_rng(Rng::derive(ts, 0));
        Rng expert_rng(Rng::derive(ts, 1));
        Rng algo_rng(Rng::derive(ts, 2));
        Dataset ds = standardize(sample_dataset(truth, n, data_rng));
        FisherZ cit(ds, alpha);
        ExpertPrediction pred{simulate_edge_expert(target, p_psi, expert_rng), nullptr};
        DiscoveryResult r = algo == GuidedAlgo::pc_guess
                                ? pc_guess(cit, truth.dag.vertex_count(), pred, algo_rng)
                                : gpc_guess(cit, truth.dag.vertex_count(), pred, algo_rng);
        hits += r.skeleton == target;
    }
    PhiEstimate e;
    e.trials = trials;
    e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    const double h = mean_ci_half(e.estimate, trials);
    e.ci_low = e.estimate - h;
    e.ci_high = e.estimate + h;
    return e;
}

namespace {

std::vector<AuditPoint> summarize_grid(const std::vector<double>& grid,
                                       const std::vector<std::vector<double>>& scores) {
    std::vector<AuditPoint> out;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        AuditPoint pt;
        pt.p = grid[g];
        pt.trials = scores[g].size();
        double sum = 0;
        for (double v : scores[g]) sum += v;
        pt.mean = sum / static_cast<double>(pt.trials);
        double ss = 0;
        for (double v : scores[g]) ss += (v - pt.mean) * (v - pt.mean);
        const double var = pt.trials > 1 ? ss / static_cast<double>(pt.trials - 1) : 0.0;
        pt.se = std::sqrt(var / static_cast<double>(pt.trials));
        pt.ci_low = pt.mean - 1.96 * pt.se;
        pt.ci_high = pt.mean + 1.96 * pt.se;
        if (g > 0) {
            const double pooled =
                std::sqrt(pt.se * pt.se + out[g - 1].se * out[g - 1].se);
            pt.violation = pt.mean < out[g - 1].mean - 2.0 * pooled;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace

std::vector<AuditPoint> monotonicity_audit_channel(const Dag& truth, GuidedAlgo algo,
                                                   const std::vector<double>& p_grid,
                                                   double alpha, double beta,
                                                   std::uint64_t trials,
                                                   std::uint64_t master_seed) {
    const Skeleton target = skeleton_of(truth);
    std::vector<std::vector<double>> scores(p_grid.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        // identical sub-seeds at every grid point: common random numbers
        const std::uint64_t ts = Rng::derive(master_seed, t);
        for (std::size_t g = 0; g < p_grid.size(); ++g) {
            Rng expert_rng(Rng::derive(ts, 1));
            Rng algo_rng(Rng::derive(ts, 2));
            NoisyChannelCit cit(truth, alpha, beta, Rng::derive(ts, 3));
            ExpertPrediction pred{simulate_edge_expert(target, p_grid[g], expert_rng),
                                  nullptr};
            DiscoveryResult r =
                algo == GuidedAlgo::pc_guess
                    ? pc_guess(cit, truth.vertex_count(), pred, algo_rng)
                    : gpc_guess(cit, truth.vertex_count(), pred, algo_rng);
            scores[g].push_back(r.skeleton == target ? 1.0 : 0.0);
        }
    }
    return summarize_grid(p_grid, scores);
}

std::vector<AuditPoint> monotonicity_audit_data(const WeightedDag& truth,
                                                GuidedAlgo algo,
                                                const std::vector<double>& p_grid,
                                                int n, double alpha,
                                                std::uint64_t trials,
                                                std::uint64_t master_seed) {
    const Skeleton target = skeleton_of(truth.dag);
    std::vector<std::vector<double>> scores(p_grid.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t ts = Rng::derive(master_seed, t);
        Rng data_rng(Rng::derive(ts, 0));
        Dataset ds = standardize(sample_dataset(truth, n, data_rng));
        for (std::size_t g = 0; g < p_grid.size(); ++g) {
            Rng expert_rng(Rng::derive(ts, 1));
            Rng algo_rng(Rng::derive(ts, 2));
            FisherZ cit(ds, alpha);
            ExpertPrediction pred{simulate_edge_expert(target, p_grid[g], expert_rng),
                                  nullptr};
            DiscoveryResult r =
                algo == GuidedAlgo::pc_guess
                    ? pc_guess(cit, truth.dag.vertex_count(), pred, algo_rng)
                    : gpc_guess(cit, truth.dag.vertex_count(), pred, algo_rng);
            scores[g].push_back(skeleton_f1(r.skeleton, target).f1);
        }
    }
    return summarize_grid(p_grid, scores);
}

std::vector<RuntimePoint> runtime_audit(const Dag& truth, std::pair<int, int> edge,
                                        const std::vector<int>& pool, int k,
                                        const std::vector<double>& p_grid,
                                        double alpha, double beta, std::uint64_t reps,
                                        std::uint64_t master_seed) {
    if (!(1.0 - alpha > beta)) throw SpecificityViolated("audit needs 1 - alpha > beta");
    for (int v : pool)
        if (v == edge.first || v == edge.second)
            throw IndexOutOfRange("pool contains an endpoint");

    const auto subsets = k_subsets(pool, k);
    const int m = static_cast<int>(subsets.size());
    if (m == 0) throw ConfigError("k exceeds the pool size");
    std::vector<char> status(m);
    for (int s = 0; s < m; ++s)
        status[s] = d_separated(truth, edge.first, edge.second, subsets[s]);

    std::vector<std::vector<double>> counts(p_grid.size());
    std::vector<int> base(m);
    std::vector<double> u_pred(m), u_test(m);
    for (std::uint64_t r = 0; r < reps; ++r) {
        const std::uint64_t rs = Rng::derive(master_seed, r);
        Rng shuffle_rng(Rng::derive(rs, 1));
        Rng pred_rng(Rng::derive(rs, 2));
        Rng test_rng(Rng::derive(rs, 3));
        for (int s = 0; s < m; ++s) base[s] = s;
        shuffle_rng.shuffle(base);
        // one uniform per subset, shared across the grid: inversion coupling
        for (int s = 0; s < m; ++s) u_pred[s] = pred_rng.uniform();
        for (int s = 0; s < m; ++s) u_test[s] = test_rng.uniform();

        for (std::size_t g = 0; g < p_grid.size(); ++g) {
            std::vector<int> order = base;
            std::stable_partition(order.begin(), order.end(), [&](int s) {
                const bool correct = u_pred[s] < p_grid[g];
                return correct ? static_cast<bool>(status[s]) : !status[s];
            });
            int tests = m;
            for (int pos = 0; pos < m; ++pos) {
                const int s = order[pos];
                const bool indep = status[s] ? !(u_test[s] < alpha) : (u_test[s] < beta);
                if (indep) {
                    tests = pos + 1;
                    break;
                }
            }
            counts[g].push_back(static_cast<double>(tests));
        }
    }

    std::vector<RuntimePoint> out;
    for (std::size_t g = 0; g < p_grid.size(); ++g) {
        RuntimePoint pt;
        pt.p_dsep = p_grid[g];
        pt.reps = counts[g].size();
        double sum = 0;
        for (double v : counts[g]) sum += v;
        pt.mean_tests = sum / static_cast<double>(pt.reps);
        double ss = 0;
        for (double v : counts[g]) ss += (v - pt.mean_tests) * (v - pt.mean_tests);
        const double var = pt.reps > 1 ? ss / static_cast<double>(pt.reps - 1) : 0.0;
        pt.se = std::sqrt(var / static_cast<double>(pt.reps));
        out.push_back(pt);
    }
    return out;
}

}  // namespace g2g
