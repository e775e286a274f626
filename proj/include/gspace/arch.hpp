#pragma once

#include <cstdint>
#include <vector>

#include "gspace/errors.hpp"

namespace gspace {

// Edge of a fully connected MLP: connects node `from` at layer-1 to node
// `to` at layer. Weight layers are numbered 1..L.
struct EdgeRef {
    int layer = 0;
    int from = 0;
    int to = 0;

    bool operator==(const EdgeRef&) const = default;
};

// Layer widths [h_0, h_1, ..., h_L] of a fully connected ReLU MLP with a
// linear output layer. L >= 1, all widths >= 1.
class Architecture {
public:
    explicit Architecture(std::vector<int> widths);

    const std::vector<int>& widths() const { return widths_; }
    int layers() const { return static_cast<int>(widths_.size()) - 1; } // L
    int width(int layer) const { return widths_[static_cast<size_t>(layer)]; }
    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }

    // m = sum_{l=1}^{L} h_{l-1} * h_l
    int edge_count() const { return edge_count_; }
    // H = sum_{l=1}^{L-1} h_l
    int hidden_count() const { return hidden_count_; }
    // Total number of input->output paths, prod_l h_l (saturating).
    long long path_count() const;

    // Flat weight layout: layer-major, then target-node-major, then source:
    //   index(l, from, to) = offset(l) + to * h_{l-1} + from     (0-based)
    int layer_offset(int layer) const { return offsets_[static_cast<size_t>(layer) - 1]; }
    int edge_index(int layer, int from, int to) const;
    EdgeRef edge_at(int index) const;

    // Hidden nodes numbered layer-major: (l, j) -> sum_{l'<l} h_l' + j for
    // hidden layers l = 1..L-1.
    int hidden_index(int layer, int node) const;
    // Inverse of hidden_index.
    std::pair<int, int> hidden_at(int index) const;

    bool operator==(const Architecture& other) const { return widths_ == other.widths_; }

private:
    std::vector<int> widths_;
    std::vector<int> offsets_; // offsets_[l-1] = flat index of first edge in weight layer l
    int edge_count_ = 0;
    int hidden_count_ = 0;
};

// Flat edge-indexed weight storage; length must equal arch.edge_count().
using WeightVector = std::vector<double>;

void require_weight_shape(const Architecture& arch, const WeightVector& w);
// Throws std::domain_error if any entry is exactly zero (G-SGD precondition).
void require_nonzero(const WeightVector& w);

} // namespace gspace
