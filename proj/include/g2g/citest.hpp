#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "g2g/dataset.hpp"
#include "g2g/graph.hpp"
#include "g2g/rng.hpp"

namespace g2g {

struct CitOutcome {
    bool independent = false;
    std::optional<double> p_value;
    std::optional<double> statistic;
};

/// One conditional-independence decision procedure. Engines are re-entrant
/// over immutable inputs; the invocation tally is atomic so concurrent
/// callers may share an engine.
class CitEngine {
  public:
    virtual ~CitEngine() = default;

    CitOutcome test(int i, int j, std::span<const int> cond) {
        tests_run_.fetch_add(1, std::memory_order_relaxed);
        return run(i, j, cond);
    }

    std::uint64_t tests_run() const { return tests_run_.load(std::memory_order_relaxed); }
    void reset_counter() { tests_run_.store(0, std::memory_order_relaxed); }

  private:
    virtual CitOutcome run(int i, int j, std::span<const int> cond) = 0;
    std::atomic<std::uint64_t> tests_run_{0};
};

/// Partial-correlation z-test for Gaussian data:
///   Z = 0.5 * sqrt(n - |S| - 3) * log((1+rho)/(1-rho)),
/// rho from the inverse of the correlation submatrix over {i,j} ∪ S.
/// Independent iff the two-sided normal p-value exceeds alpha.
class FisherZ : public CitEngine {
  public:
    FisherZ(const Dataset& ds, double alpha);
    double alpha() const { return alpha_; }

  private:
    CitOutcome run(int i, int j, std::span<const int> cond) override;

    Eigen::MatrixXd corr_;
    std::vector<char> degenerate_;
    int n_;
    double alpha_;
};

/// Pearson chi-square of i vs j within every stratum of the conditioning
/// columns; statistics and (r-1)(c-1) dof add across strata, with degenerate
/// strata contributing nothing. Zero total dof counts as independence.
class ChiSquare : public CitEngine {
  public:
    ChiSquare(const Dataset& ds, double alpha);
    double alpha() const { return alpha_; }

  private:
    CitOutcome run(int i, int j, std::span<const int> cond) override;

    Eigen::MatrixXi values_;
    std::vector<int> cardinality_;
    double alpha_;
};

/// Ground-truth oracle: independent iff d-separated in the given DAG.
class OracleCit : public CitEngine {
  public:
    explicit OracleCit(Dag truth) : truth_(std::move(truth)) {}

  private:
    CitOutcome run(int i, int j, std::span<const int> cond) override;
    Dag truth_;
};

/// Memoryless noisy channel over the oracle: a d-separated query answers
/// "independent" with probability 1-alpha, a connected one with probability
/// beta. Requires 1-alpha > beta.
class NoisyChannelCit : public CitEngine {
  public:
    NoisyChannelCit(Dag truth, double alpha, double beta, std::uint64_t seed);

  private:
    CitOutcome run(int i, int j, std::span<const int> cond) override;

    Dag truth_;
    double alpha_, beta_;
    Rng rng_;
};

}  // namespace g2g
