#include "gspace/arch.hpp"

#include <limits>
#include <string>

namespace gspace {

Architecture::Architecture(std::vector<int> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) {
        throw ShapeError("architecture needs at least an input and an output layer");
    }
    for (int h : widths_) {
        if (h < 1) throw ShapeError("layer widths must be >= 1");
    }
    offsets_.reserve(widths_.size() - 1);
    for (size_t l = 1; l < widths_.size(); ++l) {
        offsets_.push_back(edge_count_);
        edge_count_ += widths_[l - 1] * widths_[l];
        if (l + 1 < widths_.size()) hidden_count_ += widths_[l];
    }
}

long long Architecture::path_count() const {
    long long n = 1;
    for (int h : widths_) {
        if (n > std::numeric_limits<long long>::max() / h) {
            return std::numeric_limits<long long>::max();
        }
        n *= h;
    }
    return n;
}

int Architecture::edge_index(int layer, int from, int to) const {
    return layer_offset(layer) + to * width(layer - 1) + from;
}

EdgeRef Architecture::edge_at(int index) const {
    for (int l = 1; l <= layers(); ++l) {
        const int span = width(l - 1) * width(l);
        const int base = layer_offset(l);
        if (index < base + span) {
            const int rel = index - base;
            return EdgeRef{l, rel % width(l - 1), rel / width(l - 1)};
        }
    }
    throw ShapeError("edge index " + std::to_string(index) + " out of range");
}

int Architecture::hidden_index(int layer, int node) const {
    int base = 0;
    for (int l = 1; l < layer; ++l) base += width(l);
    return base + node;
}

std::pair<int, int> Architecture::hidden_at(int index) const {
    for (int l = 1; l < layers(); ++l) {
        if (index < width(l)) return {l, index};
        index -= width(l);
    }
    throw ShapeError("hidden node index out of range");
}

void require_weight_shape(const Architecture& arch, const WeightVector& w) {
    if (static_cast<int>(w.size()) != arch.edge_count()) {
        throw ShapeError("weight vector has " + std::to_string(w.size()) + " entries, architecture has " +
                         std::to_string(arch.edge_count()) + " edges");
    }
}

void require_nonzero(const WeightVector& w) {
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0.0) {
            throw std::domain_error("weight " + std::to_string(i) + " is zero");
        }
    }
}

} // namespace gspace
