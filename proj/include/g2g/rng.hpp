#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace g2g {

// Deterministic RNG wrapper. The engine (mt19937_64) is fully specified by
// the C++ standard; the value mappings below are hand-rolled because
// std::*_distribution output is implementation-defined and results here must
// be bit-identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Seed for sub-stream `index` of stream `master`. Used for per-trial and
    // per-purpose stream splitting; documented in the README.
    static constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
        return mix(master ^ mix(index + 1));
    }

    std::uint64_t next() { return engine_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer on [0, n), unbiased via rejection
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t umax = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = umax - umax % n;
        std::uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % n;
    }

    // standard normal, Marsaglia polar method with cached spare
    double normal() {
        if (spare_) {
            double s = *spare_;
            spare_.reset();
            return s;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        return u * m;
    }

    double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace g2g
