#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gspace/gsgd.hpp"
#include "gspace/scaling.hpp"

namespace gspace {

// |a - b| relative to max(1, |a|, |b|).
double rel_err(double a, double b);

// Weights with magnitudes in [0.3, 1.5] and random signs; never zero.
WeightVector random_nonzero_weights(const Architecture& arch, std::mt19937_64& rng);
ScalingVector random_scaling(int hidden_count, std::mt19937_64& rng, double lo = 0.1, double hi = 10.0);
std::vector<double> random_input(int dim, std::mt19937_64& rng);

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

// The verification suite behind `gspace verify`: rank theorem, basis
// validity, scaling-invariance sweep, ICR/WA round trip and the ICR
// free-column consistency check.
std::vector<CheckResult> run_verification(const Architecture& arch, long long max_paths, std::uint64_t seed);

} // namespace gspace
