#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "gspace/paths.hpp"

namespace gspace {

// A basis path plus the edge that carries its value through the
// triangular ICR/WA solves. For skip-basis paths the carrier is the
// path's unique non-skeleton edge. For all-basis paths it is the path's
// unique "new" non-free skeleton edge: the layer-1 skeleton edge for the
// h_1 primary paths, and the incoming-only skeleton edge for the extra
// paths that exist when a hidden layer is wider than its predecessor.
struct BasisPath {
    Path path;
    int carrier_edge = -1;
    int carrier_layer = 0;
};

// Output of the skeleton method: skeleton/free edge sets and the ordered
// basis-path list. Basis paths are globally indexed as
// all_basis[0..A) ++ skip_basis[0..S); all_basis is ordered by increasing
// carrier layer (primaries first), skip_basis by non-skeleton edge index.
struct SkeletonPlan {
    Architecture arch;
    std::vector<char> is_skeleton; // per edge
    std::vector<char> is_free;     // per edge; the H outgoing skeleton edges
    std::vector<char> is_dotted;   // skeleton edges that are not a full diagonal-chain link
    std::vector<int> free_edges;   // hidden-node-major, |free_edges| = H

    std::vector<BasisPath> all_basis;
    std::vector<BasisPath> skip_basis;

    std::vector<int> skip_of_edge;             // non-skeleton edge -> skip index, else -1
    std::vector<int> allbasis_of_carrier;      // edge -> all-basis index whose carrier it is, else -1
    std::vector<std::vector<int>> basis_with_edge; // edge -> global basis indices through it
    std::vector<int> allbasis_of_hidden;       // hidden node -> first covering all-basis index

    int basis_count() const { return static_cast<int>(all_basis.size() + skip_basis.size()); }
    const Path& basis_path(int global) const {
        const int a = static_cast<int>(all_basis.size());
        return global < a ? all_basis[static_cast<size_t>(global)].path
                          : skip_basis[static_cast<size_t>(global - a)].path;
    }
    int carrier_edge(int global) const {
        const int a = static_cast<int>(all_basis.size());
        return global < a ? all_basis[static_cast<size_t>(global)].carrier_edge
                          : skip_basis[static_cast<size_t>(global - a)].carrier_edge;
    }
};

SkeletonPlan build_skeleton(const Architecture& arch);

// m - H, the G-space dimension.
long long count_basis_paths(const Architecture& arch);

struct BasisReport {
    bool count_ok = false;
    bool rank_ok = false;
    bool uniqueness_ok = false;
    bool coverage_ok = false;
    bool all_ok() const { return count_ok && rank_ok && uniqueness_ok && coverage_ok; }
};

BasisReport verify_basis(const Architecture& arch, const SkeletonPlan& plan);

// Integer combination p = sum_i skip_i - sum_j alpha_j * allbasis_j in
// exponent space. all_basis_subtracted holds (index, alpha_j) pairs;
// alpha_j is signed, so a bare all-basis path comes back as itself with
// alpha = -1 (i.e. coefficient +1 on itself). Throws std::logic_error if
// the plan cannot express the path.
struct PathExpansion {
    std::vector<int> skip_indices;
    std::vector<std::pair<int, int>> all_basis_subtracted;
};

PathExpansion express_nonbasis(const Architecture& arch, const Path& p, const SkeletonPlan& plan);

// One record per line: SKEL <edge>, FREE <edge>, ABASIS <carrier> <nodes...>,
// SBASIS <edge> <nodes...>.
void write_plan(std::ostream& out, const SkeletonPlan& plan);

} // namespace gspace
