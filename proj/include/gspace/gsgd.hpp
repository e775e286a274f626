#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gspace/metrics.hpp"
#include "gspace/nn.hpp"
#include "gspace/skeleton.hpp"

namespace gspace {

struct Dataset;

// v in (R\{0})^{m-H}, ordered as the plan's all_basis ++ skip_basis.
std::vector<double> basis_values(const WeightVector& w, const SkeletonPlan& plan);

// Inverse-chain-rule transform: weight gradients -> basis-value gradients,
// solved by substitution over the carrier columns. Skip-basis entries come
// straight from their non-skeleton column; all-basis entries follow in
// decreasing carrier-layer order.
std::vector<double> icr_gradients(const std::vector<double>& dw, const WeightVector& w,
                                  const std::vector<double>& v, const SkeletonPlan& plan);

// Debug-mode consistency check: substitute dv back into the chain-rule
// identity on the H free-skeleton columns, which were not used by the
// solve. Returns (predicted, actual) per free edge.
std::vector<std::pair<double, double>> icr_free_column_residual(const std::vector<double>& dw,
                                                                const WeightVector& w,
                                                                const std::vector<double>& v,
                                                                const std::vector<double>& dv,
                                                                const SkeletonPlan& plan);

// Weight-allocation: project basis-path ratios onto per-weight ratios by
// back-substitution. Free skeleton edges get ratio exactly 1.
std::vector<double> weight_allocation(const std::vector<double>& ratios, const SkeletonPlan& plan);

// One G-SGD step: v' = v - eta * dv, ratios R = v'/v, weights w' = w * r.
// Throws StepRejected if any basis value or weight would land exactly on
// zero. Free skeleton weights of w' are bitwise those of w.
WeightVector gsgd_step(const Architecture& arch, const WeightVector& w, Batch batch, double eta,
                       const SkeletonPlan& plan, LossKind loss);

WeightVector sgd_step(const Architecture& arch, const WeightVector& w, Batch batch, double eta, LossKind loss);

enum class Optimizer { Sgd, Gsgd };

struct TrainConfig {
    Optimizer optimizer = Optimizer::Sgd;
    double learning_rate = 0.01;
    int batch_size = 64;
    int epochs = 20;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::SoftmaxCrossEntropy;
    // (epoch, multiplier): the learning rate is multiplied by `multiplier`
    // when the 1-based epoch index reaches `epoch`.
    std::vector<std::pair<int, double>> lr_schedule;
};

struct TrainResult {
    Metrics metrics;
    WeightVector final_weights;
    int rejected_steps = 0; // batches that needed a halved step to avoid a zero crossing
};

// Skeleton weights 1, non-skeleton fan-in-scaled normal draws.
WeightVector init_weights(const Architecture& arch, const SkeletonPlan& plan, std::uint64_t seed);

using EpochCallback = std::function<void(int epoch, const WeightVector& w)>;

// Deterministic given config.seed: init (unless start is provided),
// shuffling and batching all derive from it. For G-SGD a plan is required.
// on_epoch fires after each recorded epoch, including the initial one.
TrainResult train(const Architecture& arch, const TrainConfig& config, const Dataset& train_data,
                  const Dataset& test_data, const SkeletonPlan* plan, const WeightVector* start = nullptr,
                  const EpochCallback& on_epoch = {});

} // namespace gspace
