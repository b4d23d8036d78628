#include "g2g/citest.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "g2g/errors.hpp"

namespace g2g {

namespace {

void check_query(int d, int i, int j, std::span<const int> cond) {
    if (i < 0 || i >= d || j < 0 || j >= d || i == j)
        throw IndexOutOfRange("bad variable pair in test query");
    for (int w : cond)
        if (w < 0 || w >= d || w == i || w == j)
            throw IndexOutOfRange("conditioning set overlaps the tested pair");
}

}  // namespace

// --- FisherZ -----------------------------------------------------------------

FisherZ::FisherZ(const Dataset& ds, double alpha) : n_(ds.n()), alpha_(alpha) {
    if (ds.kind != Dataset::Kind::continuous)
        throw NoData("fisher-z needs continuous data");
    if (ds.n() < 2) throw SampleTooSmall("fisher-z needs at least two rows");
    const int d = ds.d();
    degenerate_.assign(d, 0);
    Eigen::MatrixXd centered = ds.values.rowwise() - ds.values.colwise().mean();
    Eigen::VectorXd sd(d);
    for (int c = 0; c < d; ++c) {
        sd(c) = std::sqrt(centered.col(c).squaredNorm() / (n_ - 1));
        if (!(sd(c) > 0.0)) degenerate_[c] = 1;
    }
    corr_.resize(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (degenerate_[a] || degenerate_[b]) {
                corr_(a, b) = std::numeric_limits<double>::quiet_NaN();
            } else {
                corr_(a, b) =
                    centered.col(a).dot(centered.col(b)) / ((n_ - 1) * sd(a) * sd(b));
            }
        }
}

CitOutcome FisherZ::run(int i, int j, std::span<const int> cond) {
    check_query(static_cast<int>(corr_.rows()), i, j, cond);
    const int m = static_cast<int>(cond.size());
    if (n_ - m - 3 < 1)
        throw SampleTooSmall("fisher-z needs n > |cond| + 3");
    if (degenerate_[i] || degenerate_[j])
        throw DegenerateColumn("constant column in fisher-z query");
    for (int w : cond)
        if (degenerate_[w]) throw DegenerateColumn("constant column in fisher-z query");

    // correlation submatrix over (i, j, cond...)
    const int k = m + 2;
    std::vector<int> sel(k);
    sel[0] = i;
    sel[1] = j;
    for (int t = 0; t < m; ++t) sel[t + 2] = cond[t];
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = corr_(sel[a], sel[b]);

    // eigendecomposition gives the inverse and the condition number in one pass
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    const auto& ev = es.eigenvalues();
    const double emax = std::abs(ev(k - 1));
    const double emin = ev.cwiseAbs().minCoeff();
    if (!(emin > 0.0) || emax / emin > 1e12)
        throw SingularCorrelation("correlation submatrix numerically singular");
    Eigen::MatrixXd prec = es.eigenvectors() *
                           ev.cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();

    double rho = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
    const double cap = 1.0 - 1e-12;
    rho = std::clamp(rho, -cap, cap);

    const double z = 0.5 * std::sqrt(static_cast<double>(n_ - m - 3)) *
                     std::log((1.0 + rho) / (1.0 - rho));
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return {p > alpha_, p, z};
}

// --- ChiSquare ---------------------------------------------------------------

ChiSquare::ChiSquare(const Dataset& ds, double alpha) : alpha_(alpha) {
    if (ds.kind != Dataset::Kind::discrete)
        throw NoData("chi-square needs discrete data");
    if (ds.n() < 1) throw NoData("empty dataset");
    values_.resize(ds.n(), ds.d());
    cardinality_.assign(ds.d(), 0);
    for (int r = 0; r < ds.n(); ++r)
        for (int c = 0; c < ds.d(); ++c) {
            double v = ds.values(r, c);
            int iv = static_cast<int>(std::llround(v));
            if (iv < 0 || std::abs(v - iv) > 1e-9)
                throw NonNumericCell("discrete cell is not a nonnegative integer");
            values_(r, c) = iv;
            cardinality_[c] = std::max(cardinality_[c], iv + 1);
        }
}

CitOutcome ChiSquare::run(int i, int j, std::span<const int> cond) {
    check_query(static_cast<int>(values_.cols()), i, j, cond);
    const int n = static_cast<int>(values_.rows());
    const int ci = cardinality_[i], cj = cardinality_[j];

    // stratum key = conditioning tuple, mixed-radix encoded
    std::map<long long, std::vector<int>> strata;
    for (int r = 0; r < n; ++r) {
        long long key = 0;
        for (int w : cond) key = key * cardinality_[w] + values_(r, w);
        strata[key].push_back(r);
    }

    double stat = 0.0;
    long long dof = 0;
    std::vector<double> table(static_cast<std::size_t>(ci) * cj);
    std::vector<double> rowsum(ci), colsum(cj);
    for (auto& [key, rows] : strata) {
        (void)key;
        std::fill(table.begin(), table.end(), 0.0);
        std::fill(rowsum.begin(), rowsum.end(), 0.0);
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (int r : rows) {
            int a = values_(r, i), b = values_(r, j);
            table[static_cast<std::size_t>(a) * cj + b] += 1.0;
            rowsum[a] += 1.0;
            colsum[b] += 1.0;
        }
        int robs = 0, cobs = 0;
        for (double v : rowsum) robs += v > 0;
        for (double v : colsum) cobs += v > 0;
        if (robs < 2 || cobs < 2) continue;  // stratum carries no information
        const double total = static_cast<double>(rows.size());
        for (int a = 0; a < ci; ++a) {
            if (rowsum[a] == 0) continue;
            for (int b = 0; b < cj; ++b) {
                if (colsum[b] == 0) continue;
                const double expect = rowsum[a] * colsum[b] / total;
                const double diff = table[static_cast<std::size_t>(a) * cj + b] - expect;
                stat += diff * diff / expect;
            }
        }
        dof += static_cast<long long>(robs - 1) * (cobs - 1);
    }

    if (dof == 0) return {true, 1.0, 0.0};
    boost::math::chi_squared dist(static_cast<double>(dof));
    const double p = boost::math::cdf(boost::math::complement(dist, stat));
    return {p > alpha_, p, stat};
}

// --- OracleCit ---------------------------------------------------------------

CitOutcome OracleCit::run(int i, int j, std::span<const int> cond) {
    return {d_separated(truth_, i, j, cond), std::nullopt, std::nullopt};
}

// --- NoisyChannelCit -----------------------------------------------------------

NoisyChannelCit::NoisyChannelCit(Dag truth, double alpha, double beta, std::uint64_t seed)
    : truth_(std::move(truth)), alpha_(alpha), beta_(beta), rng_(seed) {
    if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1)
        throw SpecificityViolated("alpha and beta must lie in [0,1]");
    if (!(1.0 - alpha > beta))
        throw SpecificityViolated("channel needs 1 - alpha > beta");
}

CitOutcome NoisyChannelCit::run(int i, int j, std::span<const int> cond) {
    const bool dsep = d_separated(truth_, i, j, cond);
    const bool indep = dsep ? !rng_.bernoulli(alpha_) : rng_.bernoulli(beta_);
    return {indep, std::nullopt, std::nullopt};
}

}  // namespace g2g
