#include "rage/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rage/rng.hpp"

namespace rage {

namespace {

/// Squared distances of every point to every centroid via the expanded form;
/// tiny negative round-off is clamped to zero.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                                  const Eigen::VectorXd& point_sq) {
    Eigen::MatrixXd d = -2.0 * (points * centroids.transpose());
    d.colwise() += point_sq;
    d.rowwise() += centroids.rowwise().squaredNorm().transpose();
    return d.cwiseMax(0.0);
}

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& points, int m, RngEngine& rng) {
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd centroids(m, points.cols());
    centroids.row(0) = points.row(static_cast<Eigen::Index>(uniform_below(rng, n)));

    Eigen::VectorXd min_sq =
        (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int j = 1; j < m; ++j) {
        const double total = min_sq.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double cumulative = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                cumulative += min_sq(i);
                if (cumulative > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(uniform_below(rng, n));  // all points coincide with a centroid
        }
        centroids.row(j) = points.row(pick);
        min_sq = min_sq.cwiseMin((points.rowwise() - centroids.row(j)).rowwise().squaredNorm());
    }
    return centroids;
}

}  // namespace

AnchorSet kmeans_anchors(const Eigen::MatrixXd& points, int m, std::uint64_t seed,
                         int max_iter, double tol) {
    const int n = static_cast<int>(points.rows());
    if (n == 0) throw std::invalid_argument("k-means needs at least one point");
    if (m < 1 || m > n)
        throw std::invalid_argument("anchor count m must be in [1, n], got " + std::to_string(m));
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!points.allFinite()) throw std::invalid_argument("k-means input has non-finite values");

    RngEngine rng(seed);
    Eigen::MatrixXd centroids = plus_plus_init(points, m, rng);
    const Eigen::VectorXd point_sq = points.rowwise().squaredNorm();

    std::vector<int> assign(n, 0);
    double prev_inertia = std::numeric_limits<double>::infinity();
    double inertia = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::MatrixXd dists = squared_distances(points, centroids, point_sq);
        inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            dists.row(i).minCoeff(&best);  // ties resolve to the lowest index
            assign[i] = static_cast<int>(best);
            inertia += dists(i, best);
        }
        if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12) {
            throw std::logic_error("k-means inertia increased: " + std::to_string(prev_inertia) +
                                   " -> " + std::to_string(inertia));
        }
        prev_inertia = inertia;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, points.cols());
        std::vector<long> counts(m, 0);
        for (int i = 0; i < n; ++i) {  // fixed point order keeps the reduction deterministic
            sums.row(assign[i]) += points.row(i);
            ++counts[assign[i]];
        }

        // re-seed empty clusters with the worst-fit points
        std::vector<char> reseeded(n, 0);
        for (int j = 0; j < m; ++j) {
            if (counts[j] > 0) continue;
            int farthest = -1;
            double far_sq = -1.0;
            for (int i = 0; i < n; ++i) {
                if (reseeded[i] || counts[assign[i]] <= 1) continue;
                const double sq = dists(i, assign[i]);
                if (sq > far_sq) {
                    far_sq = sq;
                    farthest = i;
                }
            }
            if (farthest < 0) continue;  // every remaining point is alone in its cluster
            reseeded[farthest] = 1;
            sums.row(assign[farthest]) -= points.row(farthest);
            --counts[assign[farthest]];
            sums.row(j) = points.row(farthest);
            counts[j] = 1;
            assign[farthest] = j;
        }

        Eigen::MatrixXd next = centroids;
        double max_shift = 0.0;
        for (int j = 0; j < m; ++j) {
            if (counts[j] == 0) continue;
            next.row(j) = sums.row(j) / static_cast<double>(counts[j]);
            const double shift = (next.row(j) - centroids.row(j)).norm() / (1.0 + centroids.row(j).norm());
            max_shift = std::max(max_shift, shift);
        }
        centroids = std::move(next);
        if (max_shift < tol) break;
    }

    // final inertia against the converged centroids
    const Eigen::MatrixXd dists = squared_distances(points, centroids, point_sq);
    inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += dists.row(i).minCoeff();

    AnchorSet anchors;
    anchors.vectors = std::move(centroids);
    anchors.inertia = inertia;
    return anchors;
}

AnchorSet kmeans_anchors(const FeatureMatrix& features, int m, std::uint64_t seed,
                         int max_iter, double tol) {
    return kmeans_anchors(features.rows, m, seed, max_iter, tol);
}

}  // namespace rage
