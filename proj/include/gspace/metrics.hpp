#pragma once

#include <cstdint>
#include <vector>

namespace gspace {

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_loss = 0.0;
    double test_acc = 0.0;
    double wall_ms = 0.0;
};

struct Metrics {
    std::vector<EpochRecord> epochs; // epoch 0 = pre-training evaluation

    const EpochRecord& final_record() const { return epochs.back(); }
};

// True when every field except wall_ms is bitwise equal.
bool same_up_to_walltime(const Metrics& a, const Metrics& b);

} // namespace gspace
