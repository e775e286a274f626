#include "gspace/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gspace {

namespace {

std::vector<double> mse_target(std::span<const double> outputs, const Target& target) {
    if (target.is_vector()) {
        if (target.values.size() != outputs.size()) {
            throw ShapeError("MSE target has wrong dimension");
        }
        return target.values;
    }
    const int k = static_cast<int>(outputs.size());
    if (target.class_index < 0 || target.class_index >= k) {
        throw LabelError("label " + std::to_string(target.class_index) + " out of range for K=" + std::to_string(k));
    }
    std::vector<double> t(outputs.size(), 0.0);
    t[static_cast<size_t>(target.class_index)] = 1.0;
    return t;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double shift = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (size_t k = 0; k < logits.size(); ++k) {
        p[k] = std::exp(logits[k] - shift);
        z += p[k];
    }
    for (double& v : p) v /= z;
    return p;
}

} // namespace

ForwardTrace forward(const Architecture& arch, const WeightVector& w, std::span<const double> x) {
    require_weight_shape(arch, w);
    if (static_cast<int>(x.size()) != arch.input_dim()) {
        throw ShapeError("input has " + std::to_string(x.size()) + " features, architecture expects " +
                         std::to_string(arch.input_dim()));
    }
    const int L = arch.layers();
    ForwardTrace trace;
    trace.node_values.resize(static_cast<size_t>(L) + 1);
    trace.pre_activations.resize(static_cast<size_t>(std::max(L - 1, 0)));
    trace.node_values[0].assign(x.begin(), x.end());

    for (int l = 1; l <= L; ++l) {
        const std::vector<double>& prev = trace.node_values[static_cast<size_t>(l) - 1];
        std::vector<double> pre(static_cast<size_t>(arch.width(l)), 0.0);
        const int hin = arch.width(l - 1);
        const double* wl = w.data() + arch.layer_offset(l);
        for (int to = 0; to < arch.width(l); ++to) {
            double sum = 0.0;
            const double* col = wl + to * hin;
            for (int from = 0; from < hin; ++from) sum += col[from] * prev[static_cast<size_t>(from)];
            pre[static_cast<size_t>(to)] = sum;
        }
        if (l < L) {
            std::vector<double> act(pre.size());
            for (size_t i = 0; i < pre.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : 0.0;
            trace.pre_activations[static_cast<size_t>(l) - 1] = std::move(pre);
            trace.node_values[static_cast<size_t>(l)] = std::move(act);
        } else {
            trace.node_values[static_cast<size_t>(l)] = pre;
            trace.outputs = std::move(pre);
        }
    }
    return trace;
}

double loss_value(std::span<const double> outputs, const Target& target, LossKind kind) {
    if (kind == LossKind::MeanSquaredError) {
        const std::vector<double> t = mse_target(outputs, target);
        double acc = 0.0;
        for (size_t k = 0; k < outputs.size(); ++k) {
            const double d = outputs[k] - t[k];
            acc += d * d;
        }
        return acc / static_cast<double>(outputs.size());
    }
    const int k = static_cast<int>(outputs.size());
    if (target.is_vector()) throw LabelError("cross-entropy needs a class label");
    if (target.class_index < 0 || target.class_index >= k) {
        throw LabelError("label " + std::to_string(target.class_index) + " out of range for K=" + std::to_string(k));
    }
    const double shift = *std::max_element(outputs.begin(), outputs.end());
    double z = 0.0;
    for (double v : outputs) z += std::exp(v - shift);
    return std::log(z) - (outputs[static_cast<size_t>(target.class_index)] - shift);
}

std::vector<double> loss_gradient(std::span<const double> outputs, const Target& target, LossKind kind) {
    if (kind == LossKind::MeanSquaredError) {
        const std::vector<double> t = mse_target(outputs, target);
        std::vector<double> g(outputs.size());
        const double scale = 2.0 / static_cast<double>(outputs.size());
        for (size_t k = 0; k < outputs.size(); ++k) g[k] = scale * (outputs[k] - t[k]);
        return g;
    }
    if (target.is_vector()) throw LabelError("cross-entropy needs a class label");
    const int k = static_cast<int>(outputs.size());
    if (target.class_index < 0 || target.class_index >= k) {
        throw LabelError("label " + std::to_string(target.class_index) + " out of range for K=" + std::to_string(k));
    }
    std::vector<double> g = softmax(outputs);
    g[static_cast<size_t>(target.class_index)] -= 1.0;
    return g;
}

WeightVector backward(const Architecture& arch, const WeightVector& w, std::span<const double> x,
                      const Target& target, LossKind kind) {
    const ForwardTrace trace = forward(arch, w, x);
    const int L = arch.layers();
    WeightVector grad(w.size(), 0.0);

    std::vector<double> delta = loss_gradient(trace.outputs, target, kind); // d loss / d pre^L
    for (int l = L; l >= 1; --l) {
        const std::vector<double>& prev = trace.node_values[static_cast<size_t>(l) - 1];
        const int hin = arch.width(l - 1);
        double* gl = grad.data() + arch.layer_offset(l);
        for (int to = 0; to < arch.width(l); ++to) {
            const double d = delta[static_cast<size_t>(to)];
            double* col = gl + to * hin;
            for (int from = 0; from < hin; ++from) col[from] = d * prev[static_cast<size_t>(from)];
        }
        if (l == 1) break;
        // Propagate to layer l-1 and apply the ReLU mask (relu'(0) = 0).
        std::vector<double> next(static_cast<size_t>(hin), 0.0);
        const double* wl = w.data() + arch.layer_offset(l);
        for (int from = 0; from < hin; ++from) {
            double sum = 0.0;
            for (int to = 0; to < arch.width(l); ++to) sum += wl[to * hin + from] * delta[static_cast<size_t>(to)];
            const double pre = trace.pre_activations[static_cast<size_t>(l) - 2][static_cast<size_t>(from)];
            next[static_cast<size_t>(from)] = pre > 0.0 ? sum : 0.0;
        }
        delta = std::move(next);
    }
    return grad;
}

WeightVector batch_gradient(const Architecture& arch, const WeightVector& w, Batch batch, LossKind kind) {
    if (batch.empty()) throw EmptyBatchError("batch_gradient on an empty batch");
    WeightVector acc(w.size(), 0.0);
    for (const Example& ex : batch) {
        const WeightVector g = backward(arch, w, ex.input, ex.target, kind);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& v : acc) v *= inv;
    return acc;
}

double batch_loss(const Architecture& arch, const WeightVector& w, Batch batch, LossKind kind) {
    if (batch.empty()) throw EmptyBatchError("batch_loss on an empty batch");
    double acc = 0.0;
    for (const Example& ex : batch) {
        acc += loss_value(forward(arch, w, ex.input).outputs, ex.target, kind);
    }
    return acc / static_cast<double>(batch.size());
}

int predict_class(std::span<const double> outputs) {
    return static_cast<int>(std::max_element(outputs.begin(), outputs.end()) - outputs.begin());
}

} // namespace gspace
