#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rage/features.hpp"
#include "rage/hsi_io.hpp"
#include "rage/rng.hpp"

using namespace rage;

namespace {

Eigen::MatrixXd random_raster(int h, int w, std::uint64_t seed) {
    RngEngine rng(seed);
    Eigen::MatrixXd raster(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) raster(y, x) = uniform01(rng);
    return raster;
}

HsiCube cube_from_bands(int w, int h, const std::vector<std::vector<double>>& bands) {
    HsiCube cube;
    cube.width = w;
    cube.height = h;
    cube.bands = static_cast<int>(bands.size());
    for (const auto& b : bands) cube.values.insert(cube.values.end(), b.begin(), b.end());
    return cube;
}

Eigen::MatrixXi code_image(const Eigen::MatrixXd& band, const LbpParams& params) {
    Eigen::MatrixXi codes(band.rows(), band.cols());
    for (int y = 0; y < band.rows(); ++y)
        for (int x = 0; x < band.cols(); ++x) codes(y, x) = lbp_code(band, x, y, params);
    return codes;
}

}  // namespace

TEST_CASE("LbpParams validation and bin counts") {
    LbpParams params;
    CHECK(params.bins() == 59);  // P=8 u2
    params.neighbors = 4;
    CHECK(params.bins() == 15);
    params.neighbors = 16;
    CHECK(params.bins() == 243);
    params.neighbors = 8;
    params.mapping = LbpMapping::raw;
    CHECK(params.bins() == 256);

    LbpParams bad = params;
    bad.window = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.neighbors = 6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.radius = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("lbp_code basics") {
    LbpParams params;

    SUBCASE("constant raster gives code 0 everywhere") {
        const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 5, 2.5);
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x) CHECK(lbp_code(flat, x, y, params) == 0);
    }
    SUBCASE("hand-built raster gives code 129") {
        Eigen::MatrixXd band(3, 3);
        band << 4, 4, 6,
                4, 5, 6,
                4, 4, 4;
        CHECK(lbp_code(band, 1, 1, params) == 129);
    }
    SUBCASE("all neighbors greater gives the all-ones code") {
        Eigen::MatrixXd band = Eigen::MatrixXd::Constant(3, 3, 10.0);
        band(1, 1) = 0.0;
        CHECK(lbp_code(band, 1, 1, params) == 255);
    }
}

TEST_CASE("uniform_bin u2 mapping") {
    SUBCASE("code 0 has a dedicated bin") {
        const int bin0 = uniform_bin(0, 8);
        for (int code = 1; code < 256; ++code) CHECK(uniform_bin(code, 8) != bin0);
    }
    SUBCASE("code 129 (two circular transitions) gets a dedicated uniform bin") {
        const int bin = uniform_bin(129, 8);
        int sharers = 0;
        for (int code = 0; code < 256; ++code) sharers += uniform_bin(code, 8) == bin;
        CHECK(sharers == 1);
        CHECK(bin != 58);  // not the overflow bin
    }
    SUBCASE("alternating code is non-uniform") {
        CHECK(uniform_bin(0b01010101, 8) == 58);  // shared overflow bin
    }
    SUBCASE("total function over all codes, exactly 58 uniform codes for P=8") {
        std::vector<int> per_bin(59, 0);
        for (int code = 0; code < 256; ++code) ++per_bin[uniform_bin(code, 8)];
        int total = 0;
        int singleton_bins = 0;
        for (int b = 0; b < 59; ++b) {
            total += per_bin[b];
            singleton_bins += per_bin[b] == 1;
        }
        CHECK(total == 256);
        CHECK(singleton_bins == 58);
        CHECK(per_bin[58] == 256 - 58);
    }
    SUBCASE("out-of-range codes rejected") {
        CHECK_THROWS_AS(uniform_bin(256, 8), std::invalid_argument);
        CHECK_THROWS_AS(uniform_bin(-1, 8), std::invalid_argument);
    }
}

TEST_CASE("lbp_histogram_image") {
    LbpParams params;

    SUBCASE("constant band concentrates on uniform_bin(0)") {
        const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(6, 6, 1.0);
        const Eigen::MatrixXd hist = lbp_histogram_image(flat, params);
        const int bin0 = uniform_bin(0, 8);
        for (Eigen::Index i = 0; i < hist.rows(); ++i) {
            CHECK(hist(i, bin0) == doctest::Approx(1.0));
            CHECK(hist.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("histogram mass sums to 1") {
        const Eigen::MatrixXd band = random_raster(9, 11, 123);
        const Eigen::MatrixXd hist = lbp_histogram_image(band, params);
        for (Eigen::Index i = 0; i < hist.rows(); ++i)
            CHECK(std::abs(hist.row(i).sum() - 1.0) < 1e-9);
    }
    SUBCASE("matches the naive double-loop oracle exactly") {
        const Eigen::MatrixXd band = random_raster(16, 16, 99);
        CHECK(lbp_histogram_image(band, params) == test::naive_lbp_histograms(band, params));

        LbpParams raw = params;
        raw.mapping = LbpMapping::raw;
        raw.window = 5;
        CHECK(lbp_histogram_image(band, raw) == test::naive_lbp_histograms(band, raw));

        LbpParams wide = params;
        wide.neighbors = 16;
        wide.radius = 2;
        CHECK(lbp_histogram_image(band, wide) == test::naive_lbp_histograms(band, wide));
    }
}

TEST_CASE("monotone illumination invariance of LBP codes") {
    SUBCASE("grid-exact sampling (P=4): any strictly increasing transform") {
        LbpParams params;
        params.neighbors = 4;
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const Eigen::MatrixXd band = random_raster(12, 10, seed);
            const Eigen::MatrixXd warped =
                band.unaryExpr([](double v) { return std::exp(v) + v * v * v; });
            CHECK(code_image(band, params) == code_image(warped, params));
        }
    }
    SUBCASE("interpolated sampling (P=8): strictly increasing affine transforms") {
        LbpParams params;
        for (std::uint64_t seed : {4u, 5u, 6u}) {
            const Eigen::MatrixXd band = random_raster(12, 10, seed);
            const Eigen::MatrixXd warped = (2.0 * band.array() + 1.0).matrix();
            CHECK(code_image(band, params) == code_image(warped, params));
        }
    }
}

TEST_CASE("select_bands_lpe") {
    SUBCASE("dependent band pair plus independent noise") {
        // band1 = 2 * band0 exactly; band2 independent with large variance
        RngEngine rng(5);
        const int n = 64;
        std::vector<double> b0(n), b1(n), b2(n);
        for (int i = 0; i < n; ++i) {
            b0[i] = uniform01(rng);
            b1[i] = 2.0 * b0[i];
            b2[i] = 10.0 * gaussian(rng);
        }
        const HsiCube cube = cube_from_bands(8, 8, {b0, b1, b2});
        const BandSelection sel = select_bands_lpe(cube, 2);
        REQUIRE(sel.indices.size() == 2);
        const std::set<int> chosen(sel.indices.begin(), sel.indices.end());
        CHECK(chosen.count(2) == 1);
        CHECK(chosen.count(0) + chosen.count(1) == 1);

        // brute-force pair oracle: residual of regressing band j on [1, band i];
        // the chosen pair must attain the maximum residual (pairs can tie
        // exactly here, so compare values, not identities)
        Eigen::MatrixXd x(n, 3);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = b0[i];
            x(i, 1) = b1[i];
            x(i, 2) = b2[i];
        }
        const auto pair_residual = [&](int i, int j) {
            Eigen::MatrixXd a(n, 2);
            a.col(0).setOnes();
            a.col(1) = x.col(i);
            const Eigen::VectorXd fit = a.colPivHouseholderQr().solve(x.col(j));
            return (x.col(j) - a * fit).squaredNorm();
        };
        double best = -1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) best = std::max(best, pair_residual(i, j));
        const double chosen_resid =
            std::max(pair_residual(sel.indices[0], sel.indices[1]),
                     pair_residual(sel.indices[1], sel.indices[0]));
        CHECK(chosen_resid == doctest::Approx(best).epsilon(1e-9));
    }
    SUBCASE("n_select = bands selects everything") {
        RngEngine rng(6);
        std::vector<std::vector<double>> bands(4, std::vector<double>(16));
        for (auto& b : bands)
            for (double& v : b) v = uniform01(rng);
        const HsiCube cube = cube_from_bands(4, 4, bands);
        const BandSelection sel = select_bands_lpe(cube, 4);
        CHECK(std::set<int>(sel.indices.begin(), sel.indices.end()) == std::set<int>{0, 1, 2, 3});
        CHECK(sel.scores.size() == 4);
    }
    SUBCASE("n_select = 1 picks the max-variance band") {
        RngEngine rng(7);
        std::vector<std::vector<double>> bands(3, std::vector<double>(25));
        for (std::size_t b = 0; b < bands.size(); ++b)
            for (double& v : bands[b]) v = (b + 1.0) * gaussian(rng);
        const HsiCube cube = cube_from_bands(5, 5, bands);
        const BandSelection sel = select_bands_lpe(cube, 1);
        REQUIRE(sel.indices.size() == 1);

        int best = -1;
        double best_var = -1.0;
        for (int b = 0; b < 3; ++b) {
            double mean = 0.0, sq = 0.0;
            for (double v : bands[b]) mean += v;
            mean /= 25.0;
            for (double v : bands[b]) sq += (v - mean) * (v - mean);
            if (sq > best_var) {
                best_var = sq;
                best = b;
            }
        }
        CHECK(sel.indices[0] == best);
    }
    SUBCASE("never selects a dependent band while an independent one remains") {
        RngEngine rng(8);
        const int n = 36;
        std::vector<double> b0(n), dep(n), ind(n);
        for (int i = 0; i < n; ++i) {
            b0[i] = gaussian(rng);
            dep[i] = 3.0 * b0[i] + 1.0;
            ind[i] = gaussian(rng);
        }
        const HsiCube cube = cube_from_bands(6, 6, {b0, dep, ind});
        const BandSelection sel = select_bands_lpe(cube, 3);
        // the dependent band must come last
        CHECK((sel.indices[2] == 0 || sel.indices[2] == 1));
    }
    SUBCASE("preconditions") {
        const HsiCube cube = cube_from_bands(2, 2, {{1, 2, 3, 4}});
        CHECK_THROWS_AS(select_bands_lpe(cube, 0), std::invalid_argument);
        CHECK_THROWS_AS(select_bands_lpe(cube, 2), std::invalid_argument);
        CHECK_THROWS_AS(select_bands_lpe(cube, 1, 1), std::invalid_argument);

        const HsiCube single = cube_from_bands(1, 1, {{1.0}, {2.0}});
        CHECK_THROWS_AS(select_bands_lpe(single, 2), std::invalid_argument);
    }
}

TEST_CASE("stack_features") {
    LbpParams params;
    SyntheticSpec spec;
    spec.width = 8;
    spec.height = 8;
    spec.bands = 3;
    spec.classes = 2;
    const auto [cube, field] = make_synthetic_cube(spec, 11);

    SUBCASE("dimension bookkeeping for 2 selected bands") {
        BandSelection sel;
        sel.indices = {0, 2};
        sel.scores = {1.0, 1.0};
        const FeatureMatrix fm = stack_features(cube, sel, params);
        CHECK(fm.d() == 59 * 2 + 2);
        CHECK(fm.n() == 64);
        CHECK(fm.column_provenance.front() == "lbp-band-0-bin-0");
        CHECK(fm.column_provenance[59] == "lbp-band-2-bin-0");
        CHECK(fm.column_provenance[118] == "spectral-band-0");
        CHECK(fm.column_provenance[119] == "spectral-band-2");
    }
    SUBCASE("constant cube normalizes to all zeros") {
        HsiCube flat;
        flat.width = 4;
        flat.height = 4;
        flat.bands = 2;
        flat.values.assign(32, 3.0);
        BandSelection sel;
        sel.indices = {0, 1};
        const FeatureMatrix fm = stack_features(flat, sel, params);
        CHECK(fm.rows.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("every column lands in [0,1] with full range or constant zero") {
        BandSelection sel;
        sel.indices = {0, 1, 2};
        const FeatureMatrix fm = stack_features(cube, sel, params);
        for (int col = 0; col < fm.d(); ++col) {
            const double lo = fm.rows.col(col).minCoeff();
            const double hi = fm.rows.col(col).maxCoeff();
            CHECK(lo >= 0.0);
            CHECK(hi <= 1.0);
            const bool normalized = lo == 0.0 && hi == doctest::Approx(1.0);
            const bool constant_zero = lo == 0.0 && hi == 0.0;
            CHECK((normalized || constant_zero));
        }
    }
}

TEST_CASE("sample_feature_subset") {
    SUBCASE("exhaustive case is the identity") {
        const auto all = sample_feature_subset(7, 7, 3);
        CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    }
    SUBCASE("deterministic per seed") {
        CHECK(sample_feature_subset(100, 10, 5) == sample_feature_subset(100, 10, 5));
        CHECK(sample_feature_subset(100, 10, 5) != sample_feature_subset(100, 10, 6));
    }
    SUBCASE("sorted distinct indices in range") {
        const auto subset = sample_feature_subset(50, 20, 9);
        CHECK(subset.size() == 20);
        for (std::size_t i = 1; i < subset.size(); ++i) CHECK(subset[i] > subset[i - 1]);
        CHECK(subset.front() >= 0);
        CHECK(subset.back() < 50);
    }
    SUBCASE("k_ss beyond d_total rejected") {
        CHECK_THROWS_AS(sample_feature_subset(5, 6, 0), std::invalid_argument);
        CHECK_THROWS_AS(sample_feature_subset(5, 0, 0), std::invalid_argument);
    }
}

TEST_CASE("restrict_columns keeps provenance") {
    FeatureMatrix fm;
    fm.rows = Eigen::MatrixXd::Random(4, 3);
    fm.column_provenance = {"a", "b", "c"};
    const FeatureMatrix sub = restrict_columns(fm, {2, 0});
    CHECK(sub.d() == 2);
    CHECK(sub.column_provenance == std::vector<std::string>{"c", "a"});
    CHECK(sub.rows.col(0) == fm.rows.col(2));
    CHECK_THROWS_AS(restrict_columns(fm, {3}), std::invalid_argument);
}
