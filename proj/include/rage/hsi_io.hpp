#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rage {

/// A width x height x bands raster of reflectance values, stored
/// band-sequential (all of band 0, then band 1, ...), row-major within a band.
struct HsiCube {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<double> values;

    int pixels() const { return width * height; }

    double at(int x, int y, int band) const {
        return values[static_cast<std::size_t>(band) * pixels() + static_cast<std::size_t>(y) * width + x];
    }
};

/// Per-pixel integer class ids, row-major. 0 = unlabeled/background,
/// 1..c = classes.
struct LabelField {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    int pixels() const { return width * height; }

    /// c = largest label present (0 for an all-background field).
    int num_classes() const;
};

enum class PatchLayout { stripes, blocks };

struct SyntheticSpec {
    int width = 32;
    int height = 32;
    int bands = 16;
    int classes = 3;
    double class_separation = 8.0;  // mean spectral offset between classes, in noise-sigma units
    double noise_sigma = 1.0;
    PatchLayout patch_layout = PatchLayout::stripes;
};

/// Extracts band `b` as a height x width matrix (row = y, col = x).
Eigen::MatrixXd band_plane(const HsiCube& cube, int b);

/// Loads a raw little-endian float32 band-sequential cube described by a JSON
/// sidecar {"width":int,"height":int,"bands":int,"dtype":"float32"}.
/// Values are widened to double. Throws on size mismatch, unsupported dtype,
/// or non-finite values.
HsiCube load_cube(const std::filesystem::path& data_path, const std::filesystem::path& header_path);

/// Writes the cube in the load_cube format (float32 data + JSON header).
void save_cube(const HsiCube& cube, const std::filesystem::path& data_path,
               const std::filesystem::path& header_path);

/// Reads a label raster from an integer CSV (height rows x width columns).
/// Throws on ragged rows, negative entries, or non-integer tokens.
LabelField load_labels(const std::filesystem::path& path);

/// Writes `<stem>.pgm` (plain-text P2, maxval = max(c, 1)) and `<stem>.csv`
/// (same layout load_labels reads). Labels must fit in 16 bits.
void save_label_map(const LabelField& field, const std::filesystem::path& stem);

/// Deterministic synthetic cube: class b occupies a contiguous region per
/// patch_layout and has band-wise mean b * class_separation * noise_sigma,
/// plus i.i.d. Gaussian noise of noise_sigma. Every class is present.
/// Throws if classes > width * height.
std::pair<HsiCube, LabelField> make_synthetic_cube(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace rage
