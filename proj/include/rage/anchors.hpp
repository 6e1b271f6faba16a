#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rage/features.hpp"

namespace rage {

/// m representative anchors in the same feature space (and column subset) as
/// the matrix they were clustered from.
struct AnchorSet {
    Eigen::MatrixXd vectors;  // m x d
    double inertia = 0.0;     // final within-cluster sum of squares

    int m() const { return static_cast<int>(vectors.rows()); }
    int d() const { return static_cast<int>(vectors.cols()); }
};

/// Lloyd k-means with k-means++ seeding, deterministic per seed. Stops when
/// the relative centroid shift drops below tol or after max_iter rounds.
/// Empty clusters are re-seeded to the point currently farthest from its
/// centroid. Inertia is checked to be non-increasing every iteration.
AnchorSet kmeans_anchors(const FeatureMatrix& features, int m, std::uint64_t seed,
                         int max_iter = 100, double tol = 1e-4);

/// Same, operating directly on a row-per-point matrix.
AnchorSet kmeans_anchors(const Eigen::MatrixXd& points, int m, std::uint64_t seed,
                         int max_iter = 100, double tol = 1e-4);

}  // namespace rage
