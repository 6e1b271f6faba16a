#include "rage/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rage/anchors.hpp"
#include "rage/parallel.hpp"

namespace rage {

int resolve_anchor_count(int n) {
    return std::min(1000, (n + 9) / 10);
}

std::vector<MemberResult> train_members(const FeatureMatrix& features, const LabeledSet& labeled,
                                        const EnsembleConfig& config) {
    const int n = features.n();
    const int d = features.d();
    if (config.k_g < 1) throw std::invalid_argument("k_g must be >= 1");
    if (config.k_ss < 1 || config.k_ss > d)
        throw std::invalid_argument("k_ss must be in [1, d]; got k_ss=" + std::to_string(config.k_ss) +
                                    ", d=" + std::to_string(d));
    const int m = config.anchors > 0 ? config.anchors : resolve_anchor_count(n);

    std::vector<MemberResult> members(config.k_g);
    parallel_for_index(config.k_g, config.threads, [&](int g) {
        try {
            const auto start = std::chrono::steady_clock::now();
            MemberResult& member = members[g];
            member.member_id = g;
            member.anchors = m;
            member.knn = config.knn;
            member.feature_columns = sample_feature_subset(d, config.k_ss, config.seed + g);
            const FeatureMatrix sub = restrict_columns(features, member.feature_columns);
            const AnchorSet anchors = kmeans_anchors(sub, m, config.seed + g);
            const AnchorGraph graph = build_graph(sub, anchors, config.knn);
            member.solution = solve_anchor_ssl(graph, labeled, config.alpha);
            member.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        } catch (const std::exception& e) {
            throw std::runtime_error("ensemble member " + std::to_string(g) + ": " + e.what());
        }
    });
    return members;
}

std::vector<int> vote(const std::vector<MemberResult>& members) {
    if (members.empty()) throw std::invalid_argument("cannot vote with no ensemble members");
    const int n = static_cast<int>(members.front().solution.hard_labels.size());
    const int c = static_cast<int>(members.front().solution.soft_scores.cols());
    for (const MemberResult& member : members) {
        if (static_cast<int>(member.solution.hard_labels.size()) != n ||
            member.solution.soft_scores.cols() != c)
            throw std::invalid_argument("ensemble members disagree on n or c");
    }

    std::vector<int> labels(n);
    std::vector<int> counts(c);
    for (int i = 0; i < n; ++i) {
        std::fill(counts.begin(), counts.end(), 0);
        for (const MemberResult& member : members) ++counts[member.solution.hard_labels[i] - 1];
        const int top = *std::max_element(counts.begin(), counts.end());

        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int cls = 0; cls < c; ++cls) {
            if (counts[cls] != top) continue;
            double score = 0.0;
            for (const MemberResult& member : members) score += member.solution.soft_scores(i, cls);
            if (score > best_score) {  // strict: residual ties keep the smallest class id
                best_score = score;
                best = cls;
            }
        }
        labels[i] = best + 1;
    }
    return labels;
}

}  // namespace rage
