#pragma once

#include <span>
#include <vector>

#include "gspace/arch.hpp"

namespace gspace {

enum class LossKind { SoftmaxCrossEntropy, MeanSquaredError };

// Training target: a class index (cross-entropy, accuracy; one-hot for MSE)
// or an explicit regression vector (MSE only).
struct Target {
    int class_index = -1;
    std::vector<double> values; // nonempty => explicit vector target

    static Target of_class(int k) { return Target{k, {}}; }
    static Target of_vector(std::vector<double> v) { return Target{-1, std::move(v)}; }
    bool is_vector() const { return !values.empty(); }
};

struct Example {
    std::vector<double> input;
    Target target;
};
using Batch = std::span<const Example>;

// Forward pass record. node_values[l] holds o^l for l = 0..L (o^0 = x,
// o^L = outputs); pre_activations[l-1] holds the layer-l hidden pre-ReLU
// values for l = 1..L-1. The output layer is linear.
struct ForwardTrace {
    std::vector<std::vector<double>> pre_activations;
    std::vector<std::vector<double>> node_values;
    std::vector<double> outputs;
};

ForwardTrace forward(const Architecture& arch, const WeightVector& w, std::span<const double> x);

// Scalar loss on raw outputs. Softmax cross-entropy is max-shifted.
// MSE is the mean over the K output coordinates.
double loss_value(std::span<const double> outputs, const Target& target, LossKind kind);

// dLoss/dOutputs at the given outputs.
std::vector<double> loss_gradient(std::span<const double> outputs, const Target& target, LossKind kind);

// Full gradient of loss w.r.t. every weight, subgradient convention
// relu'(0) = 0.
WeightVector backward(const Architecture& arch, const WeightVector& w, std::span<const double> x,
                      const Target& target, LossKind kind);

// Arithmetic mean of per-example gradients. Throws EmptyBatchError on an
// empty batch.
WeightVector batch_gradient(const Architecture& arch, const WeightVector& w, Batch batch, LossKind kind);

double batch_loss(const Architecture& arch, const WeightVector& w, Batch batch, LossKind kind);

// argmax(outputs) with lowest index winning ties.
int predict_class(std::span<const double> outputs);

} // namespace gspace
