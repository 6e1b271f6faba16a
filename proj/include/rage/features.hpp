#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rage/hsi_io.hpp"

namespace rage {

enum class LbpMapping { uniform_u2, raw };

struct LbpParams {
    int neighbors = 8;  // P, circular samples per code
    int radius = 1;     // r, sample circle radius in pixels
    int window = 7;     // w, odd histogram patch width
    LbpMapping mapping = LbpMapping::uniform_u2;

    /// Histogram length: P*(P-1)+3 for uniform_u2, 2^P for raw.
    int bins() const;

    /// Throws std::invalid_argument unless w is odd and >= 3, P in {4,8,16},
    /// and r >= 1.
    void validate() const;
};

/// Row-per-pixel stacked spatial-spectral features. Column tags are
/// "lbp-band-<b>-bin-<q>" or "spectral-band-<b>" with b the cube band index.
struct FeatureMatrix {
    Eigen::MatrixXd rows;  // n x d
    std::vector<std::string> column_provenance;

    int n() const { return static_cast<int>(rows.rows()); }
    int d() const { return static_cast<int>(rows.cols()); }
};

/// Ordered LPE output: selected band indices plus the per-step linear
/// prediction residual norms that drove each selection.
struct BandSelection {
    std::vector<int> indices;
    std::vector<double> scores;
};

/// Greedy forward band selection by linear prediction error. Pixels are
/// subsampled with a deterministic stride down to at most sample_cap.
/// Seeded with the band pair whose one-predictor affine fit is worst; each
/// later step adds the band worst-predicted by the affine span of the
/// current selection. Ties break to the lowest band index. n_select = 1
/// degenerates to the max-variance band.
BandSelection select_bands_lpe(const HsiCube& cube, int n_select, int sample_cap = 4096);

/// LBP code at (x, y): samples `neighbors` points on the circle of radius
/// `radius` at angles 2*pi*p/P, bilinearly interpolated, reflection padding
/// outside the raster. Bit p (weight 2^p) is set iff sample > center.
int lbp_code(const Eigen::MatrixXd& band, int x, int y, const LbpParams& params);

/// Maps a P-bit code to its u2 histogram bin: codes with at most 2 circular
/// 0/1 transitions get dedicated bins, everything else shares the final
/// overflow bin. Throws if code is out of [0, 2^P).
int uniform_bin(int code, int neighbors);

/// Per-pixel normalized histograms (rows sum to 1) of mapped LBP codes over
/// the w x w patch centered at each pixel, reflection padding at borders.
/// Row order matches the cube's row-major pixel order; n x bins.
Eigen::MatrixXd lbp_histogram_image(const Eigen::MatrixXd& band, const LbpParams& params);

/// Stacks, per pixel, the LBP histograms of every selected band followed by
/// the raw reflectance of the selected bands, then min-max normalizes each
/// column to [0, 1] (constant columns map to 0).
FeatureMatrix stack_features(const HsiCube& cube, const BandSelection& selection, const LbpParams& params);

/// k_ss distinct column indices drawn uniformly without replacement,
/// deterministic per seed, returned sorted ascending.
std::vector<int> sample_feature_subset(int d_total, int k_ss, std::uint64_t seed);

/// Copies the given columns (and their provenance) into a new matrix.
FeatureMatrix restrict_columns(const FeatureMatrix& features, const std::vector<int>& columns);

}  // namespace rage
