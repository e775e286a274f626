#include "gspace/gsgd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gspace/data.hpp"

namespace gspace {

std::vector<double> basis_values(const WeightVector& w, const SkeletonPlan& plan) {
    require_weight_shape(plan.arch, w);
    require_nonzero(w);
    std::vector<double> v(static_cast<size_t>(plan.basis_count()));
    for (int g = 0; g < plan.basis_count(); ++g) {
        const double value = path_value(w, plan.basis_path(g));
        if (value == 0.0) throw std::domain_error("basis path value underflowed to zero");
        v[static_cast<size_t>(g)] = value;
    }
    return v;
}

std::vector<double> icr_gradients(const std::vector<double>& dw, const WeightVector& w,
                                  const std::vector<double>& v, const SkeletonPlan& plan) {
    const int a = static_cast<int>(plan.all_basis.size());
    const int n = plan.basis_count();
    if (static_cast<int>(dw.size()) != plan.arch.edge_count() || static_cast<int>(v.size()) != n) {
        throw ShapeError("icr_gradients dimension mismatch");
    }
    for (double vj : v) {
        if (vj == 0.0) throw std::domain_error("degenerate basis path value");
    }
    std::vector<double> dv(static_cast<size_t>(n), 0.0);
    // Skip-basis entries: the non-skeleton column has a single nonzero.
    for (int i = 0; i < static_cast<int>(plan.skip_basis.size()); ++i) {
        const int e = plan.skip_basis[static_cast<size_t>(i)].carrier_edge;
        dv[static_cast<size_t>(a + i)] =
            dw[static_cast<size_t>(e)] * w[static_cast<size_t>(e)] / v[static_cast<size_t>(a + i)];
    }
    // All-basis entries by decreasing carrier layer: every other basis path
    // through the carrier is already solved at that point.
    for (int j = a - 1; j >= 0; --j) {
        const int e = plan.all_basis[static_cast<size_t>(j)].carrier_edge;
        double acc = w[static_cast<size_t>(e)] * dw[static_cast<size_t>(e)];
        for (int g : plan.basis_with_edge[static_cast<size_t>(e)]) {
            if (g != j) acc -= v[static_cast<size_t>(g)] * dv[static_cast<size_t>(g)];
        }
        dv[static_cast<size_t>(j)] = acc / v[static_cast<size_t>(j)];
    }
    return dv;
}

std::vector<std::pair<double, double>> icr_free_column_residual(const std::vector<double>& dw,
                                                                const WeightVector& w,
                                                                const std::vector<double>& v,
                                                                const std::vector<double>& dv,
                                                                const SkeletonPlan& plan) {
    std::vector<std::pair<double, double>> out;
    out.reserve(plan.free_edges.size());
    for (int e : plan.free_edges) {
        double predicted = 0.0;
        for (int g : plan.basis_with_edge[static_cast<size_t>(e)]) {
            predicted += dv[static_cast<size_t>(g)] * v[static_cast<size_t>(g)] / w[static_cast<size_t>(e)];
        }
        out.emplace_back(predicted, dw[static_cast<size_t>(e)]);
    }
    return out;
}

std::vector<double> weight_allocation(const std::vector<double>& ratios, const SkeletonPlan& plan) {
    if (static_cast<int>(ratios.size()) != plan.basis_count()) {
        throw ShapeError("weight_allocation needs one ratio per basis path");
    }
    for (double r : ratios) {
        if (r == 0.0) throw std::domain_error("degenerate path ratio");
    }
    const int a = static_cast<int>(plan.all_basis.size());
    std::vector<double> r(static_cast<size_t>(plan.arch.edge_count()), 1.0);
    // All-basis carriers in increasing carrier-layer order; any non-carrier
    // skeleton edge on the path is free (ratio 1) or already assigned.
    for (int j = 0; j < a; ++j) {
        const BasisPath& bp = plan.all_basis[static_cast<size_t>(j)];
        double others = 1.0;
        for (int e : bp.path.edges) {
            if (e != bp.carrier_edge) others *= r[static_cast<size_t>(e)];
        }
        r[static_cast<size_t>(bp.carrier_edge)] = ratios[static_cast<size_t>(j)] / others;
    }
    for (int i = 0; i < static_cast<int>(plan.skip_basis.size()); ++i) {
        const BasisPath& bp = plan.skip_basis[static_cast<size_t>(i)];
        double others = 1.0;
        for (int e : bp.path.edges) {
            if (e != bp.carrier_edge) others *= r[static_cast<size_t>(e)];
        }
        r[static_cast<size_t>(bp.carrier_edge)] = ratios[static_cast<size_t>(a + i)] / others;
    }
    return r;
}

WeightVector gsgd_step(const Architecture& arch, const WeightVector& w, Batch batch, double eta,
                       const SkeletonPlan& plan, LossKind loss) {
    const WeightVector dw = batch_gradient(arch, w, batch, loss);
    const std::vector<double> v = basis_values(w, plan);
    const std::vector<double> dv = icr_gradients(dw, w, v, plan);

    std::vector<double> ratios(v.size());
    for (size_t j = 0; j < v.size(); ++j) {
        const double updated = v[j] - eta * dv[j];
        if (updated == 0.0) {
            throw StepRejected("basis value " + std::to_string(j) + " would cross zero");
        }
        ratios[j] = updated / v[j];
    }
    const std::vector<double> r = weight_allocation(ratios, plan);
    WeightVector next(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        next[i] = w[i] * r[i];
        if (next[i] == 0.0 || !std::isfinite(next[i])) {
            throw StepRejected("weight " + std::to_string(i) + " left the nonzero domain");
        }
    }
    return next;
}

WeightVector sgd_step(const Architecture& arch, const WeightVector& w, Batch batch, double eta, LossKind loss) {
    const WeightVector dw = batch_gradient(arch, w, batch, loss);
    WeightVector next(w.size());
    for (size_t i = 0; i < w.size(); ++i) next[i] = w[i] - eta * dw[i];
    return next;
}

WeightVector init_weights(const Architecture& arch, const SkeletonPlan& plan, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    WeightVector w(static_cast<size_t>(arch.edge_count()), 0.0);
    for (int l = 1; l <= arch.layers(); ++l) {
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / arch.width(l - 1)));
        for (int to = 0; to < arch.width(l); ++to) {
            for (int from = 0; from < arch.width(l - 1); ++from) {
                const int e = arch.edge_index(l, from, to);
                if (plan.is_skeleton[static_cast<size_t>(e)]) {
                    w[static_cast<size_t>(e)] = 1.0;
                } else {
                    double draw = dist(rng);
                    while (draw == 0.0) draw = dist(rng);
                    w[static_cast<size_t>(e)] = draw;
                }
            }
        }
    }
    return w;
}

namespace {

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

Evaluation evaluate(const Architecture& arch, const WeightVector& w, const Dataset& data, LossKind loss) {
    Evaluation eval;
    const int n = data.size();
    if (n == 0) return eval;
    int correct = 0;
    std::vector<double> x(static_cast<size_t>(data.feature_dim));
    for (int i = 0; i < n; ++i) {
        const auto row = data.example(i);
        std::copy(row.begin(), row.end(), x.begin());
        const ForwardTrace trace = forward(arch, w, x);
        eval.loss += loss_value(trace.outputs, Target::of_class(data.labels[static_cast<size_t>(i)]), loss);
        if (predict_class(trace.outputs) == data.labels[static_cast<size_t>(i)]) ++correct;
    }
    eval.loss /= n;
    eval.accuracy = static_cast<double>(correct) / n;
    return eval;
}

std::vector<Example> make_batch(const Dataset& data, std::span<const int> indices) {
    std::vector<Example> batch;
    batch.reserve(indices.size());
    for (int idx : indices) {
        const auto row = data.example(idx);
        batch.push_back(Example{{row.begin(), row.end()},
                                Target::of_class(data.labels[static_cast<size_t>(idx)])});
    }
    return batch;
}

} // namespace

TrainResult train(const Architecture& arch, const TrainConfig& config, const Dataset& train_data,
                  const Dataset& test_data, const SkeletonPlan* plan, const WeightVector* start,
                  const EpochCallback& on_epoch) {
    if (config.learning_rate <= 0.0) throw std::domain_error("learning rate must be positive");
    if (config.batch_size < 1) throw std::domain_error("batch size must be >= 1");
    if (config.epochs < 0) throw std::domain_error("epoch count must be >= 0");
    if (train_data.feature_dim != arch.input_dim()) {
        throw ShapeError("dataset feature dimension does not match the architecture");
    }
    if (config.optimizer == Optimizer::Gsgd && plan == nullptr) {
        throw std::invalid_argument("G-SGD needs a skeleton plan");
    }

    std::mt19937_64 rng(config.seed);
    std::optional<SkeletonPlan> local_plan;
    if (plan == nullptr) local_plan.emplace(build_skeleton(arch));
    const SkeletonPlan& the_plan = plan == nullptr ? *local_plan : *plan;

    TrainResult result;
    result.final_weights = start != nullptr ? *start : init_weights(arch, the_plan, config.seed);
    if (config.optimizer == Optimizer::Gsgd) require_nonzero(result.final_weights);
    WeightVector& w = result.final_weights;

    auto record_epoch = [&](int epoch, double wall_ms) {
        const Evaluation tr = evaluate(arch, w, train_data, config.loss);
        const Evaluation te = evaluate(arch, w, test_data, config.loss);
        result.metrics.epochs.push_back(EpochRecord{epoch, tr.loss, tr.accuracy, te.loss, te.accuracy, wall_ms});
        if (on_epoch) on_epoch(epoch, w);
    };
    record_epoch(0, 0.0);

    std::vector<int> order(static_cast<size_t>(train_data.size()));
    std::iota(order.begin(), order.end(), 0);
    double eta = config.learning_rate;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& [at_epoch, multiplier] : config.lr_schedule) {
            if (at_epoch == epoch) eta *= multiplier;
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t off = 0; off < order.size(); off += static_cast<size_t>(config.batch_size)) {
            const size_t count = std::min(static_cast<size_t>(config.batch_size), order.size() - off);
            const std::vector<Example> batch =
                make_batch(train_data, std::span<const int>(order).subspan(off, count));
            if (config.optimizer == Optimizer::Sgd) {
                w = sgd_step(arch, w, batch, eta, config.loss);
                continue;
            }
            // A step that would zero a basis value is retried with a
            // halved rate rather than clipped.
            double step_eta = eta;
            for (int attempt = 0;; ++attempt) {
                try {
                    w = gsgd_step(arch, w, batch, step_eta, the_plan, config.loss);
                    break;
                } catch (const StepRejected& err) {
                    if (attempt >= 8) {
                        throw StepRejected("epoch " + std::to_string(epoch) + ", batch offset " +
                                           std::to_string(off) + ": " + err.what());
                    }
                    step_eta *= 0.5;
                    ++result.rejected_steps;
                }
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        record_epoch(epoch, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return result;
}

} // namespace gspace
