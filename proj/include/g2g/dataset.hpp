#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "g2g/graph.hpp"
#include "g2g/rng.hpp"

namespace g2g {

/// DAG with one weight per arc, aligned with Dag::parents(v).
struct WeightedDag {
    Dag dag;
    std::vector<std::vector<double>> weights;

    double weight(int from, int to) const;
};

/// Edge weights drawn uniformly from [-2.5,-1.5] ∪ [1.5,2.5] (sign fair).
WeightedDag sample_weights(const Dag& g, Rng& rng);

struct Dataset {
    enum class Kind { continuous, discrete };

    Eigen::MatrixXd values;  // n×d; discrete data stores small nonnegative codes
    Kind kind = Kind::continuous;
    std::vector<std::string> names;

    int n() const { return static_cast<int>(values.rows()); }
    int d() const { return static_cast<int>(values.cols()); }
};

/// n i.i.d. rows of the linear-Gaussian structural model
/// x_v = sum_{p in parents(v)} w_pv x_p + eps_v,  eps_v ~ N(0,1).
Dataset sample_dataset(const WeightedDag& wg, int n, Rng& rng);

/// Column z-scores with the (n-1)-denominator standard deviation.
Dataset standardize(const Dataset& ds);

struct PermutedData {
    Dataset data;
    Dag truth{0, {}};
    std::vector<int> permutation;  // old index -> new index
};

/// Apply one uniform random relabeling to columns and truth graph alike.
PermutedData permute_variables(const Dataset& ds, const Dag& truth, Rng& rng);

/// Comma-separated file with a header row. Continuous: cells parse as double.
/// Discrete: distinct cell strings are coded per column in first-appearance
/// order; every column must take at least two values.
Dataset load_csv(const std::string& path, Dataset::Kind kind);

/// n rows drawn uniformly without replacement, in draw order.
Dataset subsample(const Dataset& ds, int n, Rng& rng);

}  // namespace g2g
