#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gspace/arch.hpp"
#include "gspace/metrics.hpp"

namespace gspace {

// Feature matrix (row per example) plus integer class labels in [0, K).
struct Dataset {
    int feature_dim = 0;
    int image_rows = 0; // 0 unless loaded from image files
    int image_cols = 0;
    std::vector<double> features; // size() * feature_dim, row-major
    std::vector<int> labels;
    std::string split; // "train" or "test"

    int size() const { return static_cast<int>(labels.size()); }
    std::span<const double> example(int i) const {
        return {features.data() + static_cast<size_t>(i) * static_cast<size_t>(feature_dim),
                static_cast<size_t>(feature_dim)};
    }
    int num_classes() const;
};

// IDX image/label pair: big-endian headers, magic 0x00000803 / 0x00000801,
// u8 payload; pixels are scaled by 1/255. Throws FormatError on a bad
// magic or truncated payload, and on an image/label count mismatch.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writers for the same format (round-trip and fixture support).
void write_idx_images(const std::string& path, int rows, int cols, const std::vector<std::uint8_t>& pixels,
                      int count);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

// Mean-pool square blocks of size factor x factor. Requires image
// dimensions divisible by factor.
Dataset avg_pool_downsample(const Dataset& data, int factor);

// K seeded Gaussian clusters; class means sit on a fixed deterministic
// lattice so spread = 0 is linearly separable.
Dataset synthetic_blobs(std::uint64_t seed, int n_per_class, int dim, int classes, double spread);

// CSV with header epoch,train_loss,train_acc,test_loss,test_acc,wall_ms;
// floats carry 17 significant digits so the round trip is exact.
void write_metrics(const std::string& path, const Metrics& metrics);
Metrics read_metrics(const std::string& path);

// Flat binary checkpoint: magic "GSGD", u32 version, u32 layer count L,
// L+1 u32 widths, then m little-endian float64 weights.
void save_checkpoint(const std::string& path, const Architecture& arch, const WeightVector& w);
std::pair<Architecture, WeightVector> load_checkpoint(const std::string& path);

} // namespace gspace
