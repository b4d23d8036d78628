// Regenerates data/sachs.csv: a synthetic stand-in for the discretized
// protein-signalling measurements, forward-sampled from the consensus
// 11-node network that ships in data/sachs_truth.txt. Each variable takes
// three ordered levels produced by thresholding a latent Gaussian driven by
// the discrete parent levels. Fixed seed; rerunning reproduces the file
// byte for byte.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "g2g/graph.hpp"
#include "g2g/rng.hpp"

int main(int argc, char** argv) {
    const std::string truth_path = argc > 1 ? argv[1] : "data/sachs_truth.txt";
    const std::string out_path = argc > 2 ? argv[2] : "data/sachs.csv";
    const int rows = 5400;
    const std::uint64_t seed = 20050422;

    g2g::Dag truth = g2g::dag_from_edge_list(g2g::read_edge_list_file(truth_path));
    const int d = truth.vertex_count();
    const auto topo = truth.topological_order();

    // fixed per-arc couplings: |w| in [1.1, 1.5], fair sign
    g2g::Rng wrng(g2g::Rng::derive(seed, 1));
    std::vector<std::vector<double>> w(d);
    for (int v = 0; v < d; ++v)
        for (std::size_t k = 0; k < truth.parents(v).size(); ++k) {
            double mag = wrng.uniform_range(1.1, 1.5);
            w[v].push_back(wrng.bernoulli(0.5) ? mag : -mag);
        }

    const char* level_name[3] = {"LOW", "AVG", "HIGH"};
    const double noise_sd = 0.40;
    const double root_cut = 0.4307;  // ~tertiles of a standard normal
    const double child_cut = 0.70;

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    for (int v = 0; v < d; ++v) out << (v ? "," : "") << truth.labels()[v];
    out << "\n";

    g2g::Rng rng(g2g::Rng::derive(seed, 2));
    std::vector<int> x(d);
    for (int r = 0; r < rows; ++r) {
        for (int v : topo) {
            const auto& ps = truth.parents(v);
            double latent;
            double cut;
            if (ps.empty()) {
                latent = rng.normal();
                cut = root_cut;
            } else {
                latent = noise_sd * rng.normal();
                for (std::size_t k = 0; k < ps.size(); ++k)
                    latent += w[v][k] * (x[ps[k]] - 1);
                cut = child_cut;
            }
            x[v] = latent < -cut ? 0 : (latent <= cut ? 1 : 2);
        }
        for (int v = 0; v < d; ++v) out << (v ? "," : "") << level_name[x[v]];
        out << "\n";
    }
    std::cout << "wrote " << rows << " rows to " << out_path << "\n";
    return 0;
}
