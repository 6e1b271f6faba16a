#include "rage/anchor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "rage/parallel.hpp"

namespace rage {

namespace {

/// Anchor order sorted by (distance, index); stable under exact ties.
std::vector<int> sorted_order(const Eigen::VectorXd& sq_dists) {
    std::vector<int> order(sq_dists.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sq_dists(a) != sq_dists(b) ? sq_dists(a) < sq_dists(b) : a < b;
    });
    return order;
}

}  // namespace

Eigen::MatrixXd AnchorGraph::dense() const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, w] : rows[i]) p(i, j) = w;
    }
    return p;
}

Eigen::VectorXd anchor_distances(const Eigen::RowVectorXd& x, const AnchorSet& anchors) {
    if (x.size() != anchors.vectors.cols())
        throw std::invalid_argument("feature dimension " + std::to_string(x.size()) +
                                    " does not match anchor dimension " +
                                    std::to_string(anchors.vectors.cols()));
    return (anchors.vectors.rowwise() - x).rowwise().squaredNorm();
}

double adaptive_gamma(const Eigen::VectorXd& sq_dists, int k) {
    const auto order = sorted_order(sq_dists);
    double head = 0.0;
    for (int j = 0; j < k; ++j) head += sq_dists(order[j]);
    return 0.5 * (k * sq_dists(order[k]) - head);
}

GraphRow adaptive_weights(const Eigen::VectorXd& sq_dists, int k) {
    const int m = static_cast<int>(sq_dists.size());
    if (k < 1 || k > m - 1)
        throw std::invalid_argument("k must be in [1, m-1]; got k=" + std::to_string(k) +
                                    ", m=" + std::to_string(m));
    for (Eigen::Index j = 0; j < sq_dists.size(); ++j) {
        if (!std::isfinite(sq_dists(j)) || sq_dists(j) < 0.0)
            throw std::invalid_argument("squared distances must be finite and nonnegative");
    }

    const auto order = sorted_order(sq_dists);
    const double boundary = sq_dists(order[k]);  // e_(k+1)
    double head = 0.0;
    for (int j = 0; j < k; ++j) head += sq_dists(order[j]);
    const double denom = k * boundary - head;

    GraphRow row;
    row.reserve(k);
    if (denom <= 0.0) {
        // all k+1 nearest coincide; the closed form degenerates to 0/0
        for (int j = 0; j < k; ++j) row.emplace_back(order[j], 1.0 / k);
    } else {
        for (int j = 0; j < k; ++j) {
            const double w = (boundary - sq_dists(order[j])) / denom;
            if (w > 0.0) row.emplace_back(order[j], w);
        }
    }
    std::sort(row.begin(), row.end());
    return row;
}

AnchorGraph build_graph(const FeatureMatrix& features, const AnchorSet& anchors, int k) {
    const int n = features.n();
    const int m = anchors.m();
    if (features.d() != anchors.d())
        throw std::invalid_argument("feature/anchor dimension mismatch");
    if (k < 1 || k > m - 1)
        throw std::invalid_argument("k must be in [1, m-1]; got k=" + std::to_string(k) +
                                    ", m=" + std::to_string(m));

    AnchorGraph graph;
    graph.n = n;
    graph.m = m;
    graph.k = k;
    graph.rows.resize(n);

    const Eigen::VectorXd anchor_sq = anchors.vectors.rowwise().squaredNorm();
    const Eigen::VectorXd point_sq = features.rows.rowwise().squaredNorm();
    const Eigen::MatrixXd cross = features.rows * anchors.vectors.transpose();  // n x m

    parallel_for_index(n, 0, [&](int i) {
        Eigen::VectorXd e = (anchor_sq.array() + point_sq(i) - 2.0 * cross.row(i).transpose().array())
                                .cwiseMax(0.0);
        graph.rows[i] = adaptive_weights(e, k);
    });

    graph.lambda_diag = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, w] : graph.rows[i]) graph.lambda_diag(j) += w;
    }
    return graph;
}

Eigen::MatrixXd normalized_adjacency(const AnchorGraph& graph, int dense_cap) {
    if (graph.n > dense_cap)
        throw std::runtime_error("n = " + std::to_string(graph.n) + " exceeds the dense cap " +
                                 std::to_string(dense_cap) + "; use reduced_laplacian instead");

    // incidence lists per anchor
    std::vector<std::vector<std::pair<int, double>>> by_anchor(graph.m);
    for (int i = 0; i < graph.n; ++i) {
        for (const auto& [j, w] : graph.rows[i]) by_anchor[j].emplace_back(i, w);
    }

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(graph.n, graph.n);
    for (int j = 0; j < graph.m; ++j) {
        const double mass = graph.lambda_diag(j);
        if (mass <= 0.0) continue;  // zero-mass anchors are dropped from P and Lambda
        for (const auto& [a, wa] : by_anchor[j]) {
            for (const auto& [b, wb] : by_anchor[j]) {
                s(a, b) += wa * wb / mass;
            }
        }
    }
    return s;
}

ReducedLaplacian reduced_laplacian(const AnchorGraph& graph) {
    ReducedLaplacian result;
    for (int j = 0; j < graph.m; ++j) {
        if (graph.lambda_diag(j) > 0.0) result.kept.push_back(j);
    }
    const int mk = static_cast<int>(result.kept.size());
    std::vector<int> position(graph.m, -1);
    for (int j = 0; j < mk; ++j) position[result.kept[j]] = j;

    // Q = P^T P restricted to kept anchors, built row-wise so both triangles
    // accumulate identically
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(mk, mk);
    for (int i = 0; i < graph.n; ++i) {
        const GraphRow& row = graph.rows[i];
        for (const auto& [ja, wa] : row) {
            for (const auto& [jb, wb] : row) {
                q(position[ja], position[jb]) += wa * wb;
            }
        }
    }

    Eigen::VectorXd inv_sqrt_mass(mk);
    for (int j = 0; j < mk; ++j) inv_sqrt_mass(j) = 1.0 / std::sqrt(graph.lambda_diag(result.kept[j]));

    // Q Lambda^-1 Q = B^T B with B = Lambda^-1/2 Q; rankUpdate keeps it
    // exactly symmetric
    const Eigen::MatrixXd b = inv_sqrt_mass.asDiagonal() * q;
    Eigen::MatrixXd qlq = Eigen::MatrixXd::Zero(mk, mk);
    qlq.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
    qlq.triangularView<Eigen::StrictlyUpper>() = qlq.transpose();

    result.matrix = q - qlq;
    return result;
}

void dump_graph(const AnchorGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph dump: " + path.string());
    out.precision(17);
    for (int i = 0; i < graph.n; ++i) {
        for (const auto& [j, w] : graph.rows[i]) out << i << " " << j << " " << w << "\n";
    }
    if (!out) throw std::runtime_error("short write on graph dump: " + path.string());
}

}  // namespace rage
