#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rage/ensemble.hpp"
#include "rage/hsi_io.hpp"
#include "rage/ssl_solver.hpp"

namespace rage {

struct RunConfig {
    // exactly one input source: files or a synthetic spec
    std::string data_path;
    std::string header_path;
    std::string labels_path;
    std::optional<SyntheticSpec> synthetic;

    double train_fraction = 0.05;
    int n_bands_lpe = 0;  // 0 = min(20, bands)
    int lpe_sample_cap = 4096;
    EnsembleConfig ensemble;
    std::uint64_t seed = 9;
    std::string out_dir;
    bool include_train_in_metrics = false;
    bool dump_graphs = false;
};

/// Stratified split: per class, ceil(fraction * count) pixels sampled without
/// replacement, deterministic per seed. Returns the training set and the
/// held-out labeled pixel indices.
std::pair<LabeledSet, std::vector<int>> split_labels(const LabelField& field, double fraction,
                                                     std::uint64_t seed);

struct RunReport {
    nlohmann::json json;
    std::vector<int> final_labels;
};

/// Full pipeline: load/synthesize, LPE band selection, LBP + stacking, split,
/// ensemble training, voting, metrics, and (when out_dir is set) labels.csv,
/// labels.pgm, and report.json under out_dir.
RunReport run_pipeline(const RunConfig& config);

}  // namespace rage
