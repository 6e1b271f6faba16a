#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "rage/anchor_graph.hpp"

namespace rage {

/// Labeled pixel indices with their one-hot target rows.
struct LabeledSet {
    std::vector<int> indices;
    Eigen::MatrixXd targets;  // |indices| x c, one-hot

    int size() const { return static_cast<int>(indices.size()); }
    int c() const { return static_cast<int>(targets.cols()); }

    /// Non-fatal issues: repeated indices, rows that are not one-hot, classes
    /// with no labeled pixel.
    std::vector<std::string> validate() const;
};

/// Builds a LabeledSet from class ids (1..c) at the given pixel indices.
LabeledSet make_labeled_set(const std::vector<int>& indices, const std::vector<int>& class_ids, int c);

struct SslSolution {
    Eigen::MatrixXd anchor_labels;  // F_u, m x c
    Eigen::MatrixXd soft_scores;    // P * F_u, n x c
    std::vector<int> hard_labels;   // 1..c, argmax ties to the smallest class
    double alpha = 0.0;
    double ridge_used = 0.0;
};

/// Closed-form anchor-graph SSL: F_u = (P_l^T P_l + alpha L_A + eps I)^-1
/// P_l^T Y_l with ridge eps = 1e-10, solved over mass-carrying anchors
/// (rows for pruned anchors come back zero). Throws if the system is still
/// singular after the ridge.
SslSolution solve_anchor_ssl(const AnchorGraph& graph, const LabeledSet& labeled, double alpha);

/// ||P_l F_u - Y_l||_F^2 + alpha * Tr(F_u^T L_A F_u).
double objective_value(const AnchorGraph& graph, const LabeledSet& labeled,
                       const Eigen::MatrixXd& anchor_labels, double alpha);

/// soft = P * F_u; hard label = argmax over classes, ties to the smallest id.
std::pair<Eigen::MatrixXd, std::vector<int>> predict(const AnchorGraph& graph,
                                                     const Eigen::MatrixXd& anchor_labels);

/// Hard labels from a soft-score matrix (argmax, ties to the smallest id).
std::vector<int> hard_labels_from_scores(const Eigen::MatrixXd& soft_scores);

/// Full-graph reference solver: minimizes Tr((F-Y)^T C (F-Y)) + Tr(F^T L F)
/// with C = diag(alpha_l on rows where Y is nonzero, alpha_v elsewhere) and
/// L = D - S; closed form F = (C + L + eps I)^-1 C Y, eps = 1e-10.
Eigen::MatrixXd solve_full_graph_reference(const Eigen::MatrixXd& adjacency, const Eigen::MatrixXd& labels,
                                           double alpha_l, double alpha_v);

}  // namespace rage
