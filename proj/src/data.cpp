#include "gspace/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "gspace/errors.hpp"

namespace gspace {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw FormatError(path + ": truncated header");
    }
    return (std::uint32_t{buf[0]} << 24) | (std::uint32_t{buf[1]} << 16) | (std::uint32_t{buf[2]} << 8) |
           std::uint32_t{buf[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

} // namespace

int Dataset::num_classes() const {
    int k = 0;
    for (int label : labels) k = std::max(k, label + 1);
    return k;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images = open_binary(images_path);
    const std::uint32_t image_magic = read_be32(images, images_path);
    if (image_magic != kImagesMagic) {
        throw FormatError(images_path + ": bad magic, expected images file");
    }
    const std::uint32_t n = read_be32(images, images_path);
    const std::uint32_t rows = read_be32(images, images_path);
    const std::uint32_t cols = read_be32(images, images_path);
    const size_t pixel_count = static_cast<size_t>(n) * rows * cols;
    std::vector<std::uint8_t> pixels(pixel_count);
    if (pixel_count > 0 &&
        !images.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixel_count))) {
        throw FormatError(images_path + ": truncated pixel payload");
    }

    std::ifstream labels = open_binary(labels_path);
    const std::uint32_t label_magic = read_be32(labels, labels_path);
    if (label_magic != kLabelsMagic) {
        throw FormatError(labels_path + ": bad magic, expected labels file");
    }
    const std::uint32_t n_labels = read_be32(labels, labels_path);
    if (n_labels != n) {
        throw FormatError(images_path + " has " + std::to_string(n) + " images but " + labels_path + " has " +
                          std::to_string(n_labels) + " labels");
    }
    std::vector<std::uint8_t> raw_labels(n_labels);
    if (n_labels > 0 &&
        !labels.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(n_labels))) {
        throw FormatError(labels_path + ": truncated label payload");
    }

    Dataset data;
    data.feature_dim = static_cast<int>(rows * cols);
    data.image_rows = static_cast<int>(rows);
    data.image_cols = static_cast<int>(cols);
    data.features.resize(pixel_count);
    for (size_t i = 0; i < pixel_count; ++i) data.features[i] = pixels[i] / 255.0;
    data.labels.assign(raw_labels.begin(), raw_labels.end());
    return data;
}

void write_idx_images(const std::string& path, int rows, int cols, const std::vector<std::uint8_t>& pixels,
                      int count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_be32(out, kImagesMagic);
    write_be32(out, static_cast<std::uint32_t>(count));
    write_be32(out, static_cast<std::uint32_t>(rows));
    write_be32(out, static_cast<std::uint32_t>(cols));
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_be32(out, kLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

Dataset avg_pool_downsample(const Dataset& data, int factor) {
    if (factor < 1 || data.image_rows < 1 || data.image_cols < 1) {
        throw ShapeError("downsampling needs image-shaped data and factor >= 1");
    }
    if (data.image_rows % factor != 0 || data.image_cols % factor != 0) {
        throw ShapeError("image dimensions " + std::to_string(data.image_rows) + "x" +
                         std::to_string(data.image_cols) + " not divisible by factor " + std::to_string(factor));
    }
    const int out_rows = data.image_rows / factor;
    const int out_cols = data.image_cols / factor;
    Dataset out;
    out.feature_dim = out_rows * out_cols;
    out.image_rows = out_rows;
    out.image_cols = out_cols;
    out.labels = data.labels;
    out.split = data.split;
    out.features.resize(static_cast<size_t>(data.size()) * static_cast<size_t>(out.feature_dim));
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int i = 0; i < data.size(); ++i) {
        const std::span<const double> src = data.example(i);
        double* dst = out.features.data() + static_cast<size_t>(i) * static_cast<size_t>(out.feature_dim);
        for (int r = 0; r < out_rows; ++r) {
            for (int c = 0; c < out_cols; ++c) {
                double sum = 0.0;
                for (int dr = 0; dr < factor; ++dr) {
                    for (int dc = 0; dc < factor; ++dc) {
                        sum += src[static_cast<size_t>((r * factor + dr) * data.image_cols + c * factor + dc)];
                    }
                }
                dst[r * out_cols + c] = sum * inv;
            }
        }
    }
    return out;
}

Dataset synthetic_blobs(std::uint64_t seed, int n_per_class, int dim, int classes, double spread) {
    if (classes < 2 || dim < 1 || n_per_class < 1) {
        throw std::domain_error("blobs need K >= 2, d >= 1, n_per_class >= 1");
    }
    Dataset data;
    data.feature_dim = dim;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    data.features.reserve(static_cast<size_t>(classes) * n_per_class * static_cast<size_t>(dim));
    data.labels.reserve(static_cast<size_t>(classes) * n_per_class);
    for (int k = 0; k < classes; ++k) {
        for (int i = 0; i < n_per_class; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double mean = (j % classes == k) ? 0.9 : 0.1;
                data.features.push_back(mean + spread * noise(rng));
            }
            data.labels.push_back(k);
        }
    }
    return data;
}

void write_metrics(const std::string& path, const Metrics& metrics) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "epoch,train_loss,train_acc,test_loss,test_acc,wall_ms\n";
    char buf[512];
    for (const EpochRecord& r : metrics.epochs) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss, r.train_acc,
                      r.test_loss, r.test_acc, r.wall_ms);
        out << buf;
    }
}

Metrics read_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "epoch,train_loss,train_acc,test_loss,test_acc,wall_ms") {
        throw FormatError(path + ":1: bad metrics header");
    }
    Metrics metrics;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        EpochRecord r;
        char trailing = 0;
        const int matched = std::sscanf(line.c_str(), "%d,%lg,%lg,%lg,%lg,%lg%c", &r.epoch, &r.train_loss,
                                        &r.train_acc, &r.test_loss, &r.test_acc, &r.wall_ms, &trailing);
        if (matched != 6) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": malformed metrics row");
        }
        metrics.epochs.push_back(r);
    }
    return metrics;
}

void save_checkpoint(const std::string& path, const Architecture& arch, const WeightVector& w) {
    require_weight_shape(arch, w);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    auto write_u32 = [&out](std::uint32_t v) {
        unsigned char buf[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<const char*>(buf), 4);
    };
    out.write("GSGD", 4);
    write_u32(1); // version
    write_u32(static_cast<std::uint32_t>(arch.layers()));
    for (int h : arch.widths()) write_u32(static_cast<std::uint32_t>(h));
    for (double x : w) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
        unsigned char buf[8];
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
        out.write(reinterpret_cast<const char*>(buf), 8);
    }
}

std::pair<Architecture, WeightVector> load_checkpoint(const std::string& path) {
    std::ifstream in = open_binary(path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "GSGD", 4) != 0) {
        throw FormatError(path + ": bad checkpoint magic");
    }
    auto read_u32 = [&in, &path]() {
        unsigned char buf[4];
        if (!in.read(reinterpret_cast<char*>(buf), 4)) throw FormatError(path + ": truncated checkpoint");
        return std::uint32_t{buf[0]} | (std::uint32_t{buf[1]} << 8) | (std::uint32_t{buf[2]} << 16) |
               (std::uint32_t{buf[3]} << 24);
    };
    const std::uint32_t version = read_u32();
    if (version != 1) throw FormatError(path + ": unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t layers = read_u32();
    if (layers < 1 || layers > 10000) {
        throw FormatError(path + ": implausible layer count " + std::to_string(layers));
    }
    std::vector<int> widths(layers + 1);
    for (std::uint32_t i = 0; i <= layers; ++i) widths[i] = static_cast<int>(read_u32());
    Architecture arch(widths);
    WeightVector w(static_cast<size_t>(arch.edge_count()));
    for (double& x : w) {
        unsigned char buf[8];
        if (!in.read(reinterpret_cast<char*>(buf), 8)) throw FormatError(path + ": truncated weights");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= std::uint64_t{buf[b]} << (8 * b);
        x = std::bit_cast<double>(bits);
    }
    return {arch, w};
}

} // namespace gspace
