#pragma once

#include <cstdint>
#include <vector>

#include "rage/anchor_graph.hpp"
#include "rage/features.hpp"
#include "rage/ssl_solver.hpp"

namespace rage {

struct EnsembleConfig {
    int k_g = 4;          // ensemble members
    int k_ss = 96;        // feature columns per member
    int anchors = 0;      // m; 0 = min(1000, ceil(n/10))
    int knn = 5;          // graph neighbors per row
    double alpha = 0.01;
    LbpParams lbp;        // carried for run reports
    std::uint64_t seed = 0;
    int threads = 0;      // 0 = hardware concurrency
};

struct MemberResult {
    int member_id = 0;
    std::vector<int> feature_columns;
    int anchors = 0;
    int knn = 0;
    SslSolution solution;
    double seconds = 0.0;
};

/// Default anchor count for an n-pixel image.
int resolve_anchor_count(int n);

/// Trains k_g independent members: per member g, a feature subset drawn with
/// seed+g, k-means anchors in that subspace (seed+g), an adaptive-neighbor
/// graph, and the closed-form solve. Members run in parallel; results are
/// ordered by member id and identical for any worker count.
std::vector<MemberResult> train_members(const FeatureMatrix& features, const LabeledSet& labeled,
                                        const EnsembleConfig& config);

/// Per-pixel plurality over member hard labels. Ties break to the class with
/// the largest summed soft score across members; residual ties to the
/// smallest class id.
std::vector<int> vote(const std::vector<MemberResult>& members);

}  // namespace rage
