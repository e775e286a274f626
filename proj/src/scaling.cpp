#include "gspace/scaling.hpp"

#include <cmath>
#include <string>

#include "gspace/skeleton.hpp"

namespace gspace {

void require_positive(const ScalingVector& g) {
    for (double c : g) {
        if (!(c > 0.0)) throw std::domain_error("scaling factors must be strictly positive");
    }
}

WeightVector apply_scaling(const Architecture& arch, const WeightVector& w, const ScalingVector& g) {
    require_weight_shape(arch, w);
    if (static_cast<int>(g.size()) != arch.hidden_count()) {
        throw std::domain_error("scaling vector needs one entry per hidden node");
    }
    require_positive(g);
    const int L = arch.layers();
    auto scale_of = [&](int layer, int node) -> double {
        if (layer == 0 || layer == L) return 1.0;
        return g[static_cast<size_t>(arch.hidden_index(layer, node))];
    };
    WeightVector out(w.size());
    for (int l = 1; l <= L; ++l) {
        for (int to = 0; to < arch.width(l); ++to) {
            const double c_out = scale_of(l, to);
            for (int from = 0; from < arch.width(l - 1); ++from) {
                const int e = arch.edge_index(l, from, to);
                out[static_cast<size_t>(e)] = w[static_cast<size_t>(e)] * c_out / scale_of(l - 1, from);
            }
        }
    }
    return out;
}

ScalingVector compose(const ScalingVector& g1, const ScalingVector& g2) {
    if (g1.size() != g2.size()) throw std::domain_error("compose length mismatch");
    ScalingVector out(g1.size());
    for (size_t i = 0; i < g1.size(); ++i) out[i] = g1[i] * g2[i];
    return out;
}

ScalingVector inverse(const ScalingVector& g) {
    require_positive(g);
    ScalingVector out(g.size());
    for (size_t i = 0; i < g.size(); ++i) out[i] = 1.0 / g[i];
    return out;
}

bool check_equivalence(const Architecture& arch, const WeightVector& w, const WeightVector& w2,
                       const SkeletonPlan& plan, double tol) {
    require_weight_shape(arch, w);
    require_weight_shape(arch, w2);
    require_nonzero(w);
    require_nonzero(w2);
    for (int e : plan.free_edges) {
        if (std::signbit(w[static_cast<size_t>(e)]) != std::signbit(w2[static_cast<size_t>(e)])) return false;
    }
    for (int j = 0; j < plan.basis_count(); ++j) {
        const Path& p = plan.basis_path(j);
        const double a = path_value(w, p);
        const double b = path_value(w2, p);
        if (std::fabs(a - b) > tol * std::max(1.0, std::fabs(a))) return false;
    }
    return true;
}

} // namespace gspace
