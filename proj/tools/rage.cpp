#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rage/pipeline.hpp"

namespace {

rage::SyntheticSpec parse_synthetic(const std::string& text, const std::string& layout) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) parts.push_back(token);
    if (parts.size() != 6)
        throw CLI::ValidationError("--synthetic expects w,h,bands,classes,separation,sigma");
    rage::SyntheticSpec spec;
    try {
        spec.width = std::stoi(parts[0]);
        spec.height = std::stoi(parts[1]);
        spec.bands = std::stoi(parts[2]);
        spec.classes = std::stoi(parts[3]);
        spec.class_separation = std::stod(parts[4]);
        spec.noise_sigma = std::stod(parts[5]);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--synthetic expects numeric w,h,bands,classes,separation,sigma");
    }
    if (layout == "stripes") {
        spec.patch_layout = rage::PatchLayout::stripes;
    } else if (layout == "blocks") {
        spec.patch_layout = rage::PatchLayout::blocks;
    } else {
        throw CLI::ValidationError("--layout must be stripes or blocks");
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RAGE: spatial-spectral semi-supervised HSI classification with "
                 "random anchor-graph ensembles"};

    rage::RunConfig config;
    std::string synthetic_text;
    std::string layout = "stripes";
    bool quiet = false;

    app.add_option("--input", config.data_path, "Raw float32 band-sequential cube file");
    app.add_option("--header", config.header_path, "JSON sidecar describing the cube");
    app.add_option("--labels", config.labels_path, "Ground-truth label CSV (0 = background)");
    app.add_option("--synthetic", synthetic_text,
                   "Generate a test cube instead: w,h,bands,classes,separation,sigma");
    app.add_option("--layout", layout, "Synthetic class layout: stripes | blocks")
        ->capture_default_str();
    app.add_option("--train-frac", config.train_fraction,
                   "Stratified fraction of labeled pixels used for training")
        ->capture_default_str();
    app.add_option("--bands", config.n_bands_lpe, "LPE-selected band count (0 = min(20, bands))")
        ->capture_default_str();
    app.add_option("--kg", config.ensemble.k_g, "Ensemble member count")->capture_default_str();
    app.add_option("--kss", config.ensemble.k_ss, "Feature columns per member (clamped to d)")
        ->capture_default_str();
    app.add_option("--anchors", config.ensemble.anchors, "Anchor count m (0 = min(1000, ceil(n/10)))")
        ->capture_default_str();
    app.add_option("--knn", config.ensemble.knn, "Neighbors per graph row")->capture_default_str();
    app.add_option("--alpha", config.ensemble.alpha, "Laplacian regularization weight")
        ->capture_default_str();
    app.add_option("--window", config.ensemble.lbp.window, "LBP histogram window (odd)")
        ->capture_default_str();
    app.add_option("--lbp-neighbors", config.ensemble.lbp.neighbors, "LBP circle samples (4, 8, 16)")
        ->capture_default_str();
    app.add_option("--lbp-radius", config.ensemble.lbp.radius, "LBP circle radius")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", config.ensemble.threads, "Worker threads (0 = hardware)")
        ->capture_default_str();
    app.add_option("--out", config.out_dir, "Output directory for labels.csv/labels.pgm/report.json");
    app.add_flag("--include-train-metrics", config.include_train_in_metrics,
                 "Keep training pixels in the evaluation");
    app.add_flag("--dump-graphs", config.dump_graphs, "Write each member's P as a coordinate list");
    app.add_flag("--quiet", quiet, "Suppress the report on stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!synthetic_text.empty()) config.synthetic = parse_synthetic(synthetic_text, layout);
        const rage::RunReport report = rage::run_pipeline(config);
        if (!quiet) std::cout << report.json.dump(2) << std::endl;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
