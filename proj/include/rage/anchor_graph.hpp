#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <utility>
#include <vector>

#include "rage/anchors.hpp"
#include "rage/features.hpp"

namespace rage {

/// One sparse row of the anchor graph: (anchor index, weight) pairs sorted by
/// anchor index, weights positive and summing to 1.
using GraphRow = std::vector<std::pair<int, double>>;

/// Sparse n x m nonnegative row-stochastic matrix P linking pixels to their
/// k nearest anchors, plus the column masses lambda_jj = sum_i p_ij.
struct AnchorGraph {
    int n = 0;
    int m = 0;
    int k = 0;
    std::vector<GraphRow> rows;
    Eigen::VectorXd lambda_diag;

    /// Dense n x m copy of P, for oracles and small-scale checks.
    Eigen::MatrixXd dense() const;
};

/// Reduced m' x m' Laplacian over the anchors that carry mass; `kept` maps
/// its rows back to original anchor indices.
struct ReducedLaplacian {
    Eigen::MatrixXd matrix;
    std::vector<int> kept;

    int dropped(int m) const { return m - static_cast<int>(kept.size()); }
};

/// Squared Euclidean distances from x to every anchor.
Eigen::VectorXd anchor_distances(const Eigen::RowVectorXd& x, const AnchorSet& anchors);

/// Closed-form adaptive-neighbor weights for one row: the k nearest anchors
/// get weight (e_(k+1) - e_(j)) / (k e_(k+1) - sum_{j'<=k} e_(j')), the rest
/// zero. Sorting is stable with ties broken by anchor index. If the k+1
/// smallest distances all coincide the weights fall back to uniform 1/k on
/// the k lowest-index nearest anchors. Requires 1 <= k <= m-1.
GraphRow adaptive_weights(const Eigen::VectorXd& sq_dists, int k);

/// The per-row regularizer gamma = (k/2) e_(k+1) - (1/2) sum_{j<=k} e_(j)
/// implied by the k-sparse closed form.
double adaptive_gamma(const Eigen::VectorXd& sq_dists, int k);

/// Builds the anchor graph by applying adaptive_weights to every pixel.
AnchorGraph build_graph(const FeatureMatrix& features, const AnchorSet& anchors, int k);

/// Materializes S = P Lambda^-1 P^T (zero-mass anchors skipped). Symmetric by
/// construction, doubly stochastic, PSD. Refuses n above dense_cap.
Eigen::MatrixXd normalized_adjacency(const AnchorGraph& graph, int dense_cap = 2048);

/// L_A = P^T P - (P^T P) Lambda^-1 (P^T P) over mass-carrying anchors,
/// computed without materializing anything n x n. Exactly symmetric.
ReducedLaplacian reduced_laplacian(const AnchorGraph& graph);

/// Debug dump of P as "i j p_ij" lines.
void dump_graph(const AnchorGraph& graph, const std::filesystem::path& path);

}  // namespace rage
