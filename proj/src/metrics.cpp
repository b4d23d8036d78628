#include "g2g/metrics.hpp"

#include "g2g/errors.hpp"

namespace g2g {

SkeletonScore skeleton_f1(const Skeleton& predicted, const Skeleton& truth) {
    if (predicted.vertex_count() != truth.vertex_count())
        throw DimensionMismatch("skeletons have different sizes");
    const int d = truth.vertex_count();
    SkeletonScore s;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const bool p = predicted.has_edge(i, j);
            const bool t = truth.has_edge(i, j);
            s.tp += p && t;
            s.fp += p && !t;
            s.fn += !p && t;
            s.tn += !p && !t;
        }

    if (s.tp + s.fp + s.fn == 0) {  // both empty
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    s.precision = (s.tp + s.fp) ? static_cast<double>(s.tp) / (s.tp + s.fp) : 0.0;
    s.recall = (s.tp + s.fn) ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
    s.f1 = (s.precision + s.recall > 0)
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

bool perfect_recovery(const Skeleton& predicted, const Skeleton& truth) {
    if (predicted.vertex_count() != truth.vertex_count())
        throw DimensionMismatch("skeletons have different sizes");
    return predicted == truth;
}

}  // namespace g2g
