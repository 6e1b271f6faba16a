#include "rage/hsi_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rage/rng.hpp"

namespace rage {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<float> read_float32_file(const std::filesystem::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open data file: " + path.string());
    in.seekg(0, std::ios::end);
    const auto nbytes = static_cast<std::size_t>(in.tellg());
    if (nbytes != expected * sizeof(float)) {
        fail("size mismatch: " + path.string() + " holds " + std::to_string(nbytes) +
             " bytes, header implies " + std::to_string(expected * sizeof(float)));
    }
    in.seekg(0, std::ios::beg);
    std::vector<float> buf(expected);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes));
    if (!in) fail("short read on data file: " + path.string());
    return buf;
}

}  // namespace

int LabelField::num_classes() const {
    int c = 0;
    for (int v : labels) c = std::max(c, v);
    return c;
}

Eigen::MatrixXd band_plane(const HsiCube& cube, int b) {
    Eigen::MatrixXd plane(cube.height, cube.width);
    const double* base = cube.values.data() + static_cast<std::size_t>(b) * cube.pixels();
    for (int y = 0; y < cube.height; ++y)
        for (int x = 0; x < cube.width; ++x)
            plane(y, x) = base[static_cast<std::size_t>(y) * cube.width + x];
    return plane;
}

HsiCube load_cube(const std::filesystem::path& data_path, const std::filesystem::path& header_path) {
    std::ifstream hin(header_path);
    if (!hin) fail("cannot open header: " + header_path.string());
    nlohmann::json header;
    try {
        hin >> header;
    } catch (const nlohmann::json::exception& e) {
        fail("bad header JSON in " + header_path.string() + ": " + e.what());
    }

    HsiCube cube;
    try {
        cube.width = header.at("width").get<int>();
        cube.height = header.at("height").get<int>();
        cube.bands = header.at("bands").get<int>();
        const auto dtype = header.at("dtype").get<std::string>();
        if (dtype != "float32") fail("unsupported dtype \"" + dtype + "\" in " + header_path.string());
    } catch (const nlohmann::json::exception& e) {
        fail("bad header fields in " + header_path.string() + ": " + e.what());
    }
    if (cube.width < 1 || cube.height < 1 || cube.bands < 1) {
        fail("header dimensions must be >= 1 in " + header_path.string());
    }

    const std::size_t count = static_cast<std::size_t>(cube.pixels()) * cube.bands;
    const std::vector<float> raw = read_float32_file(data_path, count);
    cube.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::isfinite(raw[i])) fail("non-finite value at offset " + std::to_string(i) + " in " + data_path.string());
        cube.values[i] = static_cast<double>(raw[i]);
    }
    return cube;
}

void save_cube(const HsiCube& cube, const std::filesystem::path& data_path,
               const std::filesystem::path& header_path) {
    {
        nlohmann::json header{{"width", cube.width}, {"height", cube.height},
                              {"bands", cube.bands}, {"dtype", "float32"}};
        std::ofstream hout(header_path);
        if (!hout) fail("cannot write header: " + header_path.string());
        hout << header.dump(2) << "\n";
    }
    std::ofstream out(data_path, std::ios::binary);
    if (!out) fail("cannot write data file: " + data_path.string());
    std::vector<float> raw(cube.values.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<float>(cube.values[i]);
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!out) fail("short write on data file: " + data_path.string());
}

LabelField load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open labels file: " + path.string());

    LabelField field;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        std::stringstream ss(line);
        std::string token;
        int cols = 0;
        while (std::getline(ss, token, ',')) {
            std::size_t pos = 0;
            long v = 0;
            try {
                v = std::stol(token, &pos);
            } catch (const std::exception&) {
                fail("non-integer token \"" + token + "\" at row " + std::to_string(row));
            }
            while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
            if (pos != token.size()) fail("non-integer token \"" + token + "\" at row " + std::to_string(row));
            if (v < 0) fail("negative label " + std::to_string(v) + " at row " + std::to_string(row));
            field.labels.push_back(static_cast<int>(v));
            ++cols;
        }
        if (row == 0) {
            field.width = cols;
        } else if (cols != field.width) {
            fail("ragged row " + std::to_string(row) + ": " + std::to_string(cols) +
                 " columns, expected " + std::to_string(field.width));
        }
        ++row;
    }
    field.height = row;
    if (field.width < 1 || field.height < 1) fail("empty labels file: " + path.string());
    return field;
}

void save_label_map(const LabelField& field, const std::filesystem::path& stem) {
    const int c = field.num_classes();
    if (c > 0xFFFF) fail("labels do not fit in 16 bits (c = " + std::to_string(c) + ")");
    const int maxval = std::max(c, 1);  // PGM forbids maxval 0

    std::filesystem::path pgm = stem;
    pgm += ".pgm";
    std::ofstream pout(pgm);
    if (!pout) fail("cannot write " + pgm.string());
    pout << "P2\n" << field.width << " " << field.height << "\n" << maxval << "\n";
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            pout << field.labels[static_cast<std::size_t>(y) * field.width + x];
            pout << (x + 1 == field.width ? '\n' : ' ');
        }
    }
    if (!pout) fail("short write on " + pgm.string());

    std::filesystem::path csv = stem;
    csv += ".csv";
    std::ofstream cout_(csv);
    if (!cout_) fail("cannot write " + csv.string());
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            cout_ << field.labels[static_cast<std::size_t>(y) * field.width + x];
            cout_ << (x + 1 == field.width ? '\n' : ',');
        }
    }
    if (!cout_) fail("short write on " + csv.string());
}

namespace {

std::vector<int> layout_labels(const SyntheticSpec& spec) {
    const int n = spec.width * spec.height;
    const int c = spec.classes;
    std::vector<int> labels(n, 0);

    if (spec.patch_layout == PatchLayout::blocks) {
        const int gx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c))));
        const int gy = (c + gx - 1) / gx;
        if (spec.width >= gx && spec.height >= gy) {
            for (int y = 0; y < spec.height; ++y) {
                const int ty = std::min(y * gy / spec.height, gy - 1);
                for (int x = 0; x < spec.width; ++x) {
                    const int tx = std::min(x * gx / spec.width, gx - 1);
                    labels[static_cast<std::size_t>(y) * spec.width + x] = 1 + (ty * gx + tx) % c;
                }
            }
            std::vector<bool> present(c + 1, false);
            for (int v : labels) present[v] = true;
            if (std::all_of(present.begin() + 1, present.end(), [](bool b) { return b; })) {
                return labels;
            }
            // fall through: grid too coarse for some class, use stripes
        }
    }

    // Contiguous runs of the row-major pixel index, one balanced run per class.
    for (int i = 0; i < n; ++i) {
        labels[i] = 1 + std::min(static_cast<int>(static_cast<long long>(i) * c / n), c - 1);
    }
    return labels;
}

}  // namespace

std::pair<HsiCube, LabelField> make_synthetic_cube(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.classes < 2) fail("synthetic spec needs classes >= 2");
    if (spec.class_separation < 0) fail("synthetic spec needs class_separation >= 0");
    if (spec.noise_sigma <= 0) fail("synthetic spec needs noise_sigma > 0");
    if (spec.width < 1 || spec.height < 1 || spec.bands < 1) fail("synthetic spec dimensions must be >= 1");
    if (spec.classes > spec.width * spec.height) {
        fail("synthetic spec has more classes (" + std::to_string(spec.classes) + ") than pixels (" +
             std::to_string(spec.width * spec.height) + ")");
    }

    LabelField field;
    field.width = spec.width;
    field.height = spec.height;
    field.labels = layout_labels(spec);

    HsiCube cube;
    cube.width = spec.width;
    cube.height = spec.height;
    cube.bands = spec.bands;
    cube.values.resize(static_cast<std::size_t>(cube.pixels()) * cube.bands);

    RngEngine rng(seed);
    std::size_t pos = 0;
    for (int b = 0; b < spec.bands; ++b) {
        for (int i = 0; i < cube.pixels(); ++i) {
            const double mean = field.labels[i] * spec.class_separation * spec.noise_sigma;
            cube.values[pos++] = mean + spec.noise_sigma * gaussian(rng);
        }
    }
    return {std::move(cube), std::move(field)};
}

}  // namespace rage
