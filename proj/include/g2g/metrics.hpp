#pragma once

#include <cstdint>

#include "g2g/graph.hpp"

namespace g2g {

struct SkeletonScore {
    double f1 = 0, precision = 0, recall = 0;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Edge-set F1 of a recovered skeleton against the truth. Degenerate cases:
/// both empty scores 1 across the board; an empty prediction against a
/// nonempty truth (or the reverse) scores 0.
SkeletonScore skeleton_f1(const Skeleton& predicted, const Skeleton& truth);

bool perfect_recovery(const Skeleton& predicted, const Skeleton& truth);

}  // namespace g2g
