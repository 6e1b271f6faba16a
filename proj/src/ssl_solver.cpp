#include "rage/ssl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rage {

namespace {

constexpr double kRidge = 1e-10;

/// P_l F_u rows via the sparse graph rows at the labeled indices.
Eigen::MatrixXd labeled_scores(const AnchorGraph& graph, const LabeledSet& labeled,
                               const Eigen::MatrixXd& anchor_labels) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(labeled.size(), anchor_labels.cols());
    for (int r = 0; r < labeled.size(); ++r) {
        const int i = labeled.indices[r];
        if (i < 0 || i >= graph.n)
            throw std::invalid_argument("labeled index " + std::to_string(i) + " out of range");
        for (const auto& [j, w] : graph.rows[i]) out.row(r) += w * anchor_labels.row(j);
    }
    return out;
}

}  // namespace

std::vector<std::string> LabeledSet::validate() const {
    std::vector<std::string> warnings;
    if (static_cast<Eigen::Index>(indices.size()) != targets.rows()) {
        warnings.push_back("index count does not match target rows");
        return warnings;
    }
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        warnings.push_back("labeled indices contain duplicates");
    std::vector<bool> seen(c(), false);
    for (Eigen::Index r = 0; r < targets.rows(); ++r) {
        int ones = 0;
        int cls = -1;
        for (Eigen::Index j = 0; j < targets.cols(); ++j) {
            if (targets(r, j) == 1.0) {
                ++ones;
                cls = static_cast<int>(j);
            } else if (targets(r, j) != 0.0) {
                ones = -1;
                break;
            }
        }
        if (ones != 1) {
            warnings.push_back("target row " + std::to_string(r) + " is not one-hot");
        } else {
            seen[cls] = true;
        }
    }
    for (int j = 0; j < c(); ++j) {
        if (!seen[j]) warnings.push_back("class " + std::to_string(j + 1) + " has no labeled pixel");
    }
    return warnings;
}

LabeledSet make_labeled_set(const std::vector<int>& indices, const std::vector<int>& class_ids, int c) {
    if (indices.size() != class_ids.size())
        throw std::invalid_argument("indices and class ids differ in length");
    if (c < 1) throw std::invalid_argument("class count must be >= 1");
    LabeledSet set;
    set.indices = indices;
    set.targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(indices.size()), c);
    for (std::size_t r = 0; r < class_ids.size(); ++r) {
        const int cls = class_ids[r];
        if (cls < 1 || cls > c)
            throw std::invalid_argument("class id " + std::to_string(cls) + " outside 1.." + std::to_string(c));
        set.targets(static_cast<Eigen::Index>(r), cls - 1) = 1.0;
    }
    return set;
}

SslSolution solve_anchor_ssl(const AnchorGraph& graph, const LabeledSet& labeled, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
    if (labeled.size() == 0) throw std::invalid_argument("labeled set is empty");

    const ReducedLaplacian reduced = reduced_laplacian(graph);
    const int mk = static_cast<int>(reduced.kept.size());
    const int c = labeled.c();
    std::vector<int> position(graph.m, -1);
    for (int j = 0; j < mk; ++j) position[reduced.kept[j]] = j;

    // P_l restricted to mass-carrying anchors (pruned columns are all-zero)
    Eigen::MatrixXd p_l = Eigen::MatrixXd::Zero(labeled.size(), mk);
    for (int r = 0; r < labeled.size(); ++r) {
        const int i = labeled.indices[r];
        if (i < 0 || i >= graph.n)
            throw std::invalid_argument("labeled index " + std::to_string(i) + " out of range");
        for (const auto& [j, w] : graph.rows[i]) p_l(r, position[j]) = w;
    }

    Eigen::MatrixXd system = p_l.transpose() * p_l + alpha * reduced.matrix;
    system.diagonal().array() += kRidge;
    const Eigen::MatrixXd rhs = p_l.transpose() * labeled.targets;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("anchor SSL system is singular after ridge "
                                 "(disconnected, label-free anchor block)");
    const Eigen::MatrixXd solved = ldlt.solve(rhs);
    if (!solved.allFinite())
        throw std::runtime_error("anchor SSL solve produced non-finite values "
                                 "(disconnected, label-free anchor block)");

    SslSolution solution;
    solution.alpha = alpha;
    solution.ridge_used = kRidge;
    solution.anchor_labels = Eigen::MatrixXd::Zero(graph.m, c);
    for (int j = 0; j < mk; ++j) solution.anchor_labels.row(reduced.kept[j]) = solved.row(j);
    std::tie(solution.soft_scores, solution.hard_labels) = predict(graph, solution.anchor_labels);
    return solution;
}

double objective_value(const AnchorGraph& graph, const LabeledSet& labeled,
                       const Eigen::MatrixXd& anchor_labels, double alpha) {
    if (anchor_labels.rows() != graph.m || anchor_labels.cols() != labeled.c())
        throw std::invalid_argument("anchor label matrix has wrong shape");

    const double fit = (labeled_scores(graph, labeled, anchor_labels) - labeled.targets).squaredNorm();

    const ReducedLaplacian reduced = reduced_laplacian(graph);
    Eigen::MatrixXd kept_labels(reduced.kept.size(), anchor_labels.cols());
    for (std::size_t j = 0; j < reduced.kept.size(); ++j)
        kept_labels.row(static_cast<Eigen::Index>(j)) = anchor_labels.row(reduced.kept[j]);
    const double smooth = (kept_labels.transpose() * reduced.matrix * kept_labels).trace();

    return fit + alpha * smooth;
}

std::vector<int> hard_labels_from_scores(const Eigen::MatrixXd& soft_scores) {
    std::vector<int> labels(soft_scores.rows());
    for (Eigen::Index i = 0; i < soft_scores.rows(); ++i) {
        Eigen::Index best = 0;
        soft_scores.row(i).maxCoeff(&best);  // first maximum -> smallest class id
        labels[i] = static_cast<int>(best) + 1;
    }
    return labels;
}

std::pair<Eigen::MatrixXd, std::vector<int>> predict(const AnchorGraph& graph,
                                                     const Eigen::MatrixXd& anchor_labels) {
    if (anchor_labels.rows() != graph.m)
        throw std::invalid_argument("anchor label matrix has " + std::to_string(anchor_labels.rows()) +
                                    " rows, graph has m = " + std::to_string(graph.m));
    Eigen::MatrixXd soft = Eigen::MatrixXd::Zero(graph.n, anchor_labels.cols());
    for (int i = 0; i < graph.n; ++i) {
        for (const auto& [j, w] : graph.rows[i]) soft.row(i) += w * anchor_labels.row(j);
    }
    return {soft, hard_labels_from_scores(soft)};
}

Eigen::MatrixXd solve_full_graph_reference(const Eigen::MatrixXd& adjacency, const Eigen::MatrixXd& labels,
                                           double alpha_l, double alpha_v) {
    const Eigen::Index n = adjacency.rows();
    if (adjacency.cols() != n) throw std::invalid_argument("adjacency must be square");
    if (labels.rows() != n) throw std::invalid_argument("label matrix row count must match adjacency");
    if (alpha_l <= 0.0 || alpha_v <= 0.0) throw std::invalid_argument("alpha_l and alpha_v must be positive");
    if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("adjacency must be symmetric");
    if (adjacency.minCoeff() < 0.0) throw std::invalid_argument("adjacency must be nonnegative");

    Eigen::VectorXd cost(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cost(i) = (labels.row(i).array() != 0.0).any() ? alpha_l : alpha_v;
    }

    Eigen::MatrixXd system = -adjacency;
    system.diagonal() += adjacency.rowwise().sum();  // L = D - S
    system.diagonal() += cost;
    system.diagonal().array() += kRidge;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("full-graph reference system is singular");
    const Eigen::MatrixXd solved = ldlt.solve(cost.asDiagonal() * labels);
    if (!solved.allFinite()) throw std::runtime_error("full-graph reference solve produced non-finite values");
    return solved;
}

}  // namespace rage
