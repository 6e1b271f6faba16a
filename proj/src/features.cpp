#include "rage/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rage/parallel.hpp"
#include "rage/rng.hpp"

namespace rage {

namespace {

/// reflect-101 index: mirrors about the edge pixel without repeating it.
int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

struct SampleOffset {
    bool on_grid;
    int ix, iy;      // valid when on_grid
    double dx, dy;   // otherwise
};

std::vector<SampleOffset> make_offsets(const LbpParams& params) {
    std::vector<SampleOffset> offsets(params.neighbors);
    for (int p = 0; p < params.neighbors; ++p) {
        const double angle = 2.0 * M_PI * p / params.neighbors;
        const double dx = params.radius * std::cos(angle);
        const double dy = params.radius * std::sin(angle);
        const double rx = std::round(dx);
        const double ry = std::round(dy);
        SampleOffset& o = offsets[p];
        o.on_grid = std::abs(dx - rx) < 1e-9 && std::abs(dy - ry) < 1e-9;
        o.ix = static_cast<int>(rx);
        o.iy = static_cast<int>(ry);
        o.dx = dx;
        o.dy = dy;
    }
    return offsets;
}

double sample_bilinear(const Eigen::MatrixXd& band, double sx, double sy) {
    const int w = static_cast<int>(band.cols());
    const int h = static_cast<int>(band.rows());
    const double fx = std::floor(sx);
    const double fy = std::floor(sy);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const double ax = sx - fx;
    const double ay = sy - fy;
    const double v00 = band(reflect_index(y0, h), reflect_index(x0, w));
    const double v10 = band(reflect_index(y0, h), reflect_index(x0 + 1, w));
    const double v01 = band(reflect_index(y0 + 1, h), reflect_index(x0, w));
    const double v11 = band(reflect_index(y0 + 1, h), reflect_index(x0 + 1, w));
    // Difference form: exact when all four corners coincide, so flat
    // neighborhoods compare equal to the center.
    return v00 + ax * (v10 - v00) + ay * (v01 - v00) + ax * ay * (v11 - v10 - v01 + v00);
}

int code_at(const Eigen::MatrixXd& band, int x, int y, const std::vector<SampleOffset>& offsets) {
    const int w = static_cast<int>(band.cols());
    const int h = static_cast<int>(band.rows());
    const double center = band(reflect_index(y, h), reflect_index(x, w));
    int code = 0;
    for (std::size_t p = 0; p < offsets.size(); ++p) {
        const SampleOffset& o = offsets[p];
        const double v = o.on_grid
                             ? band(reflect_index(y + o.iy, h), reflect_index(x + o.ix, w))
                             : sample_bilinear(band, x + o.dx, y + o.dy);
        if (v > center) code |= 1 << p;
    }
    return code;
}

int count_transitions(int code, int neighbors) {
    int t = 0;
    for (int p = 0; p < neighbors; ++p) {
        const int a = (code >> p) & 1;
        const int b = (code >> ((p + 1) % neighbors)) & 1;
        t += a != b;
    }
    return t;
}

std::vector<int> build_u2_table(int neighbors) {
    const int ncodes = 1 << neighbors;
    std::vector<int> table(ncodes, -1);
    int next = 0;
    for (int code = 0; code < ncodes; ++code) {
        if (count_transitions(code, neighbors) <= 2) table[code] = next++;
    }
    for (int& bin : table) {
        if (bin < 0) bin = next;
    }
    return table;
}

const std::vector<int>& u2_table(int neighbors) {
    static const std::vector<int> t4 = build_u2_table(4);
    static const std::vector<int> t8 = build_u2_table(8);
    static const std::vector<int> t16 = build_u2_table(16);
    switch (neighbors) {
        case 4: return t4;
        case 8: return t8;
        case 16: return t16;
        default: throw std::invalid_argument("LBP neighbor count must be 4, 8, or 16");
    }
}

}  // namespace

int LbpParams::bins() const {
    return mapping == LbpMapping::uniform_u2 ? neighbors * (neighbors - 1) + 3 : 1 << neighbors;
}

void LbpParams::validate() const {
    if (window < 3 || window % 2 == 0) throw std::invalid_argument("LBP window must be odd and >= 3");
    if (neighbors != 4 && neighbors != 8 && neighbors != 16)
        throw std::invalid_argument("LBP neighbor count must be 4, 8, or 16");
    if (radius < 1) throw std::invalid_argument("LBP radius must be >= 1");
}

int lbp_code(const Eigen::MatrixXd& band, int x, int y, const LbpParams& params) {
    params.validate();
    return code_at(band, x, y, make_offsets(params));
}

int uniform_bin(int code, int neighbors) {
    const auto& table = u2_table(neighbors);
    if (code < 0 || code >= static_cast<int>(table.size()))
        throw std::invalid_argument("LBP code " + std::to_string(code) + " out of range for P=" +
                                    std::to_string(neighbors));
    return table[code];
}

Eigen::MatrixXd lbp_histogram_image(const Eigen::MatrixXd& band, const LbpParams& params) {
    params.validate();
    const int h = static_cast<int>(band.rows());
    const int w = static_cast<int>(band.cols());
    const int nbins = params.bins();
    const auto offsets = make_offsets(params);

    Eigen::MatrixXi bin_image(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int code = code_at(band, x, y, offsets);
            bin_image(y, x) = params.mapping == LbpMapping::uniform_u2
                                  ? u2_table(params.neighbors)[code]
                                  : code;
        }
    }

    const int half = params.window / 2;
    const double norm = 1.0 / (static_cast<double>(params.window) * params.window);
    Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h) * w, nbins);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Eigen::Index row = static_cast<Eigen::Index>(y) * w + x;
            for (int dy = -half; dy <= half; ++dy) {
                const int yy = reflect_index(y + dy, h);
                for (int dx = -half; dx <= half; ++dx) {
                    const int xx = reflect_index(x + dx, w);
                    hist(row, bin_image(yy, xx)) += norm;
                }
            }
        }
    }
    return hist;
}

namespace {

/// Orthonormal basis grown one column at a time; residual_sq gives the
/// squared distance of a vector from the current span.
class AffineSpan {
public:
    AffineSpan(int ns, int capacity) : q_(ns, capacity + 1), cols_(0) {
        q_.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(ns)));
        cols_ = 1;
    }

    double residual_sq(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd coeffs = q_.leftCols(cols_).transpose() * x;
        return std::max(0.0, x.squaredNorm() - coeffs.squaredNorm());
    }

    void add(const Eigen::VectorXd& x) {
        Eigen::VectorXd r = x - q_.leftCols(cols_) * (q_.leftCols(cols_).transpose() * x);
        r -= q_.leftCols(cols_) * (q_.leftCols(cols_).transpose() * r);  // second pass for stability
        const double norm = r.norm();
        if (norm > 1e-12 * (1.0 + x.norm())) {
            q_.col(cols_) = r / norm;
            ++cols_;
        }
        // exactly dependent columns leave the span unchanged
    }

private:
    Eigen::MatrixXd q_;
    int cols_;
};

Eigen::MatrixXd subsample_pixels(const HsiCube& cube, int sample_cap, int* out_ns) {
    const int n = cube.pixels();
    const int stride = (n + sample_cap - 1) / sample_cap;
    const int ns = (n + stride - 1) / stride;
    Eigen::MatrixXd samples(ns, cube.bands);
    for (int b = 0; b < cube.bands; ++b) {
        const double* base = cube.values.data() + static_cast<std::size_t>(b) * n;
        for (int s = 0; s < ns; ++s) samples(s, b) = base[static_cast<std::size_t>(s) * stride];
    }
    *out_ns = ns;
    return samples;
}

}  // namespace

BandSelection select_bands_lpe(const HsiCube& cube, int n_select, int sample_cap) {
    const int bands = cube.bands;
    if (n_select < 1 || n_select > bands)
        throw std::invalid_argument("n_select must be in [1, bands], got " + std::to_string(n_select));
    if (sample_cap < n_select + 1)
        throw std::invalid_argument("sample_cap must be >= n_select + 1");

    int ns = 0;
    const Eigen::MatrixXd samples = subsample_pixels(cube, sample_cap, &ns);
    if (ns < 2 && n_select > 1)
        throw std::invalid_argument("cube too degenerate for multi-band LPE selection");

    BandSelection selection;
    std::vector<char> selected(bands, 0);

    const Eigen::RowVectorXd means = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - means;

    if (n_select == 1) {
        // no pair to fit: the residual from the intercept-only span is the
        // centered norm, i.e. the max-variance band
        int best = 0;
        double best_sq = -1.0;
        for (int b = 0; b < bands; ++b) {
            const double sq = centered.col(b).squaredNorm();
            if (sq > best_sq) {
                best_sq = sq;
                best = b;
            }
        }
        selection.indices.push_back(best);
        selection.scores.push_back(std::sqrt(best_sq));
        return selection;
    }

    // seed pair: predictor i, target j with the worst affine one-band fit
    const Eigen::MatrixXd gram = centered.transpose() * centered;
    int best_i = 0, best_j = 1;
    double best_sq = -1.0;
    for (int i = 0; i < bands; ++i) {
        for (int j = 0; j < bands; ++j) {
            if (i == j) continue;
            const double denom = gram(i, i);
            const double sq = denom > 0.0 ? std::max(0.0, gram(j, j) - gram(i, j) * gram(i, j) / denom)
                                          : gram(j, j);
            if (sq > best_sq) {
                best_sq = sq;
                best_i = i;
                best_j = j;
            }
        }
    }
    const double pair_score = std::sqrt(best_sq);
    AffineSpan span(ns, n_select);
    for (int b : {best_i, best_j}) {
        selection.indices.push_back(b);
        selection.scores.push_back(pair_score);
        selected[b] = 1;
        span.add(samples.col(b));
    }

    while (static_cast<int>(selection.indices.size()) < n_select) {
        int best = -1;
        double best_resid = -1.0;
        for (int b = 0; b < bands; ++b) {
            if (selected[b]) continue;
            const double resid = span.residual_sq(samples.col(b));
            if (resid > best_resid) {
                best_resid = resid;
                best = b;
            }
        }
        selection.indices.push_back(best);
        selection.scores.push_back(std::sqrt(best_resid));
        selected[best] = 1;
        span.add(samples.col(best));
    }
    return selection;
}

FeatureMatrix stack_features(const HsiCube& cube, const BandSelection& selection, const LbpParams& params) {
    params.validate();
    if (selection.indices.empty()) throw std::invalid_argument("band selection is empty");
    for (int b : selection.indices) {
        if (b < 0 || b >= cube.bands)
            throw std::invalid_argument("selected band " + std::to_string(b) + " out of range");
    }

    const int n = cube.pixels();
    const int nsel = static_cast<int>(selection.indices.size());
    const int nbins = params.bins();
    const int d = nbins * nsel + nsel;

    FeatureMatrix fm;
    fm.rows.resize(n, d);
    fm.column_provenance.resize(d);

    parallel_for_index(nsel, 0, [&](int s) {
        const int band = selection.indices[s];
        fm.rows.block(0, static_cast<Eigen::Index>(s) * nbins, n, nbins) =
            lbp_histogram_image(band_plane(cube, band), params);
    });
    for (int s = 0; s < nsel; ++s) {
        const int band = selection.indices[s];
        for (int q = 0; q < nbins; ++q) {
            fm.column_provenance[static_cast<std::size_t>(s) * nbins + q] =
                "lbp-band-" + std::to_string(band) + "-bin-" + std::to_string(q);
        }
        const double* base = cube.values.data() + static_cast<std::size_t>(band) * n;
        for (int i = 0; i < n; ++i) fm.rows(i, static_cast<Eigen::Index>(nbins) * nsel + s) = base[i];
        fm.column_provenance[static_cast<std::size_t>(nbins) * nsel + s] =
            "spectral-band-" + std::to_string(band);
    }

    for (int col = 0; col < d; ++col) {
        const double lo = fm.rows.col(col).minCoeff();
        const double hi = fm.rows.col(col).maxCoeff();
        const double range = hi - lo;
        if (range > 0.0) {
            fm.rows.col(col) = (fm.rows.col(col).array() - lo) / range;
        } else {
            fm.rows.col(col).setZero();
        }
    }
    return fm;
}

std::vector<int> sample_feature_subset(int d_total, int k_ss, std::uint64_t seed) {
    if (k_ss < 1 || k_ss > d_total)
        throw std::invalid_argument("k_ss must be in [1, d_total], got " + std::to_string(k_ss));
    std::vector<int> indices(d_total);
    for (int i = 0; i < d_total; ++i) indices[i] = i;
    RngEngine rng(seed);
    for (int i = 0; i < k_ss; ++i) {
        const int j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(d_total - i)));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k_ss);
    std::sort(indices.begin(), indices.end());
    return indices;
}

FeatureMatrix restrict_columns(const FeatureMatrix& features, const std::vector<int>& columns) {
    FeatureMatrix out;
    out.rows.resize(features.rows.rows(), static_cast<Eigen::Index>(columns.size()));
    out.column_provenance.reserve(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const int col = columns[i];
        if (col < 0 || col >= features.d())
            throw std::invalid_argument("feature column " + std::to_string(col) + " out of range");
        out.rows.col(static_cast<Eigen::Index>(i)) = features.rows.col(col);
        out.column_provenance.push_back(features.column_provenance[col]);
    }
    return out;
}

}  // namespace rage
