#include "rage/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rage/anchors.hpp"
#include "rage/features.hpp"
#include "rage/metrics.hpp"
#include "rage/rng.hpp"

namespace rage {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::pair<LabeledSet, std::vector<int>> split_labels(const LabelField& field, double fraction,
                                                     std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("train fraction must be in (0, 1], got " + std::to_string(fraction));
    const int c = field.num_classes();
    if (c < 1) throw std::invalid_argument("label field has no labeled pixels");

    std::vector<std::vector<int>> by_class(c);
    for (int i = 0; i < field.pixels(); ++i) {
        const int label = field.labels[i];
        if (label > 0) by_class[label - 1].push_back(i);
    }

    RngEngine rng(seed);
    std::vector<int> train_indices;
    std::vector<int> train_classes;
    std::vector<int> holdout;
    for (int cls = 0; cls < c; ++cls) {
        std::vector<int>& pool = by_class[cls];
        if (pool.empty()) continue;  // class absent: skipped
        shuffle_vec(pool, rng);
        const int take = static_cast<int>(std::ceil(fraction * static_cast<double>(pool.size())));
        for (int r = 0; r < static_cast<int>(pool.size()); ++r) {
            if (r < take) {
                train_indices.push_back(pool[r]);
                train_classes.push_back(cls + 1);
            } else {
                holdout.push_back(pool[r]);
            }
        }
    }
    std::sort(holdout.begin(), holdout.end());
    return {make_labeled_set(train_indices, train_classes, c), std::move(holdout)};
}

RunReport run_pipeline(const RunConfig& config) {
    const auto t_total = std::chrono::steady_clock::now();
    nlohmann::json stage_times;

    // ---- load or synthesize ----
    auto t_stage = std::chrono::steady_clock::now();
    const bool has_files = !config.data_path.empty() || !config.header_path.empty() ||
                           !config.labels_path.empty();
    if (has_files == config.synthetic.has_value())
        throw std::invalid_argument("provide either --input/--header/--labels or --synthetic, not both");

    HsiCube cube;
    LabelField truth;
    if (config.synthetic) {
        std::tie(cube, truth) = make_synthetic_cube(*config.synthetic, config.seed);
    } else {
        if (config.data_path.empty() || config.header_path.empty() || config.labels_path.empty())
            throw std::invalid_argument("file input needs --input, --header, and --labels");
        cube = load_cube(config.data_path, config.header_path);
        truth = load_labels(config.labels_path);
        if (truth.width != cube.width || truth.height != cube.height)
            throw std::invalid_argument("label raster dimensions do not match the cube");
    }
    stage_times["load_s"] = seconds_since(t_stage);

    // ---- band selection ----
    t_stage = std::chrono::steady_clock::now();
    const int n_bands = config.n_bands_lpe > 0 ? config.n_bands_lpe : std::min(20, cube.bands);
    const BandSelection selection = select_bands_lpe(cube, n_bands, config.lpe_sample_cap);
    stage_times["band_selection_s"] = seconds_since(t_stage);

    // ---- features ----
    t_stage = std::chrono::steady_clock::now();
    const FeatureMatrix features = stack_features(cube, selection, config.ensemble.lbp);
    stage_times["features_s"] = seconds_since(t_stage);

    // ---- split ----
    t_stage = std::chrono::steady_clock::now();
    auto [labeled, holdout] = split_labels(truth, config.train_fraction, config.seed);
    const std::vector<std::string> warnings = labeled.validate();
    stage_times["split_s"] = seconds_since(t_stage);

    // ---- ensemble ----
    t_stage = std::chrono::steady_clock::now();
    EnsembleConfig ensemble = config.ensemble;
    ensemble.seed = config.seed;
    ensemble.k_ss = std::min(ensemble.k_ss, features.d());
    if (ensemble.anchors <= 0) ensemble.anchors = resolve_anchor_count(features.n());
    const std::vector<MemberResult> members = train_members(features, labeled, ensemble);
    stage_times["train_s"] = seconds_since(t_stage);

    t_stage = std::chrono::steady_clock::now();
    RunReport report;
    report.final_labels = vote(members);
    stage_times["vote_s"] = seconds_since(t_stage);

    // ---- metrics ----
    t_stage = std::chrono::steady_clock::now();
    const std::vector<int> exclude = config.include_train_in_metrics ? std::vector<int>{} : labeled.indices;
    const ConfusionMatrix cm = confusion(report.final_labels, truth, exclude);
    nlohmann::json per_class = nlohmann::json::array();
    for (int j = 0; j < cm.c(); ++j) {
        const long row_sum = cm.counts.row(j).sum();
        if (row_sum == 0) {
            per_class.push_back(nullptr);
        } else {
            per_class.push_back(static_cast<double>(cm.counts(j, j)) / static_cast<double>(row_sum));
        }
    }
    stage_times["metrics_s"] = seconds_since(t_stage);

    nlohmann::json j;
    if (cm.total() > 0) {
        j["oa"] = overall_accuracy(cm);
        j["aa"] = average_accuracy(cm);
        j["kappa"] = kappa(cm);
    } else {
        j["oa"] = nullptr;
        j["aa"] = nullptr;
        j["kappa"] = nullptr;
    }
    j["per_class"] = per_class;
    j["evaluated_pixels"] = cm.total();
    j["seed"] = config.seed;
    j["n"] = features.n();
    j["d"] = features.d();
    j["c"] = truth.num_classes();
    j["train_pixels"] = labeled.size();
    j["holdout_pixels"] = holdout.size();
    j["metrics_exclude_training"] = !config.include_train_in_metrics;
    j["warnings"] = warnings;

    nlohmann::json members_json = nlohmann::json::array();
    for (const MemberResult& member : members) {
        members_json.push_back({{"id", member.member_id},
                                {"seconds", member.seconds},
                                {"anchors", member.anchors},
                                {"knn", member.knn},
                                {"k_ss", static_cast<int>(member.feature_columns.size())}});
    }
    j["members"] = members_json;

    nlohmann::json cfg;
    if (config.synthetic) {
        const SyntheticSpec& s = *config.synthetic;
        cfg["synthetic"] = {{"width", s.width},
                            {"height", s.height},
                            {"bands", s.bands},
                            {"classes", s.classes},
                            {"class_separation", s.class_separation},
                            {"noise_sigma", s.noise_sigma},
                            {"patch_layout", s.patch_layout == PatchLayout::stripes ? "stripes" : "blocks"}};
    } else {
        cfg["input"] = config.data_path;
        cfg["header"] = config.header_path;
        cfg["labels"] = config.labels_path;
    }
    cfg["train_fraction"] = config.train_fraction;
    cfg["bands_lpe"] = n_bands;
    cfg["lpe_sample_cap"] = config.lpe_sample_cap;
    cfg["selected_bands"] = selection.indices;
    cfg["k_g"] = ensemble.k_g;
    cfg["k_ss"] = ensemble.k_ss;
    cfg["anchors"] = ensemble.anchors;
    cfg["knn"] = ensemble.knn;
    cfg["alpha"] = ensemble.alpha;
    cfg["lbp"] = {{"neighbors", ensemble.lbp.neighbors},
                  {"radius", ensemble.lbp.radius},
                  {"window", ensemble.lbp.window},
                  {"mapping", ensemble.lbp.mapping == LbpMapping::uniform_u2 ? "uniform_u2" : "raw"}};
    cfg["threads"] = ensemble.threads;
    j["config"] = cfg;

    // ---- outputs ----
    if (!config.out_dir.empty()) {
        const std::filesystem::path out(config.out_dir);
        std::filesystem::create_directories(out);

        LabelField predicted;
        predicted.width = truth.width;
        predicted.height = truth.height;
        predicted.labels = report.final_labels;
        save_label_map(predicted, out / "labels");

        if (config.dump_graphs) {
            for (const MemberResult& member : members) {
                const FeatureMatrix sub = restrict_columns(features, member.feature_columns);
                const AnchorSet anchors = kmeans_anchors(sub, member.anchors, config.seed + member.member_id);
                const AnchorGraph graph = build_graph(sub, anchors, member.knn);
                dump_graph(graph, out / ("member" + std::to_string(member.member_id) + "_graph.txt"));
            }
        }
    }

    j["stage_times_s"] = stage_times;
    j["time_s"] = seconds_since(t_total);
    if (!config.out_dir.empty()) {
        std::ofstream rout(std::filesystem::path(config.out_dir) / "report.json");
        if (!rout) throw std::runtime_error("cannot write report.json under " + config.out_dir);
        rout << j.dump(2) << "\n";
    }

    report.json = std::move(j);
    return report;
}

}  // namespace rage
