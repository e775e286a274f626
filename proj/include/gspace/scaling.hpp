#pragma once

#include <span>
#include <vector>

#include "gspace/arch.hpp"

namespace gspace {

struct SkeletonPlan;

// One strictly positive factor per hidden node, layer-major order. The
// operator multiplies each node's incoming weights by c and divides its
// outgoing weights by c; input and output nodes carry implicit scale 1.
using ScalingVector = std::vector<double>;

void require_positive(const ScalingVector& g);

WeightVector apply_scaling(const Architecture& arch, const WeightVector& w, const ScalingVector& g);

// Group operation: elementwise product, so that
// apply_scaling(w, compose(g1, g2)) == apply_scaling(apply_scaling(w, g2), g1).
ScalingVector compose(const ScalingVector& g1, const ScalingVector& g2);

// Elementwise reciprocal.
ScalingVector inverse(const ScalingVector& g);

// Positive-scale equivalence test via the finite criterion: matching signs
// on every free skeleton weight and basis-path values equal within
// tol * max(1, |v_p(w)|). Throws std::domain_error on zero weights.
bool check_equivalence(const Architecture& arch, const WeightVector& w, const WeightVector& w2,
                       const SkeletonPlan& plan, double tol);

} // namespace gspace
