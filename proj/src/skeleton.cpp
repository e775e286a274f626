#include "gspace/skeleton.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "gspace/exact_rank.hpp"

namespace gspace {

namespace {

// Canonical skeleton prefix into node `s` at layer `layer`: follow the
// incoming skeleton edge (s mod h_{l-1} -> s) upstream to the input layer.
std::vector<int> skeleton_prefix_nodes(const Architecture& arch, int s, int layer) {
    std::vector<int> nodes(static_cast<size_t>(layer) + 1);
    nodes[static_cast<size_t>(layer)] = s;
    for (int l = layer; l >= 1; --l) {
        s = s % arch.width(l - 1);
        nodes[static_cast<size_t>(l) - 1] = s;
    }
    return nodes;
}

// Free-edge suffix out of node `s` at layer `layer`: follow the outgoing
// skeleton edge (s -> s mod h_{l+1}) down to the output layer.
std::vector<int> skeleton_suffix_nodes(const Architecture& arch, int s, int layer) {
    std::vector<int> nodes;
    nodes.reserve(static_cast<size_t>(arch.layers() - layer) + 1);
    nodes.push_back(s);
    for (int l = layer + 1; l <= arch.layers(); ++l) {
        s = s % arch.width(l);
        nodes.push_back(s);
    }
    return nodes;
}

// prefix ends at the tail of the joining edge, suffix starts at its head.
std::vector<int> concat_nodes(std::vector<int> prefix, const std::vector<int>& suffix) {
    prefix.insert(prefix.end(), suffix.begin(), suffix.end());
    return prefix;
}

} // namespace

SkeletonPlan build_skeleton(const Architecture& arch) {
    SkeletonPlan plan{arch, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    const int m = arch.edge_count();
    const int L = arch.layers();
    plan.is_skeleton.assign(static_cast<size_t>(m), 0);
    plan.is_free.assign(static_cast<size_t>(m), 0);
    plan.is_dotted.assign(static_cast<size_t>(m), 0);
    plan.skip_of_edge.assign(static_cast<size_t>(m), -1);
    plan.allbasis_of_carrier.assign(static_cast<size_t>(m), -1);
    plan.allbasis_of_hidden.assign(static_cast<size_t>(arch.hidden_count()), -1);

    if (L == 1) {
        // No hidden nodes: every edge is its own basis path.
        for (int e = 0; e < m; ++e) {
            const EdgeRef ref = arch.edge_at(e);
            BasisPath bp;
            bp.path = Path::from_nodes(arch, {ref.from, ref.to});
            bp.carrier_edge = e;
            bp.carrier_layer = 1;
            plan.skip_of_edge[static_cast<size_t>(e)] = static_cast<int>(plan.skip_basis.size());
            plan.skip_basis.push_back(std::move(bp));
        }
        plan.basis_with_edge.assign(static_cast<size_t>(m), {});
        for (int i = 0; i < m; ++i) plan.basis_with_edge[static_cast<size_t>(i)].push_back(i);
        return plan;
    }

    // Skeleton edges: per hidden node (l, j) the incoming edge
    // (j mod h_{l-1} -> j) in w^l and the outgoing edge (j -> j mod h_{l+1})
    // in w^{l+1}. The two coincide on diagonal chain links.
    for (int l = 1; l < L; ++l) {
        for (int j = 0; j < arch.width(l); ++j) {
            const int incoming = arch.edge_index(l, j % arch.width(l - 1), j);
            const int outgoing = arch.edge_index(l + 1, j, j % arch.width(l + 1));
            plan.is_skeleton[static_cast<size_t>(incoming)] = 1;
            plan.is_skeleton[static_cast<size_t>(outgoing)] = 1;
            plan.is_free[static_cast<size_t>(outgoing)] = 1;
            plan.free_edges.push_back(outgoing);
        }
    }
    // Dotted = skeleton edge in a middle matrix that is only one of
    // {incoming primary of its head, outgoing skeleton of its tail}.
    for (int e = 0; e < m; ++e) {
        if (!plan.is_skeleton[static_cast<size_t>(e)]) continue;
        const EdgeRef ref = arch.edge_at(e);
        if (ref.layer == 1 || ref.layer == L) continue;
        const bool incoming_primary = ref.from == ref.to % arch.width(ref.layer - 1);
        const bool outgoing_of_tail = ref.to == ref.from % arch.width(ref.layer);
        if (!(incoming_primary && outgoing_of_tail)) plan.is_dotted[static_cast<size_t>(e)] = 1;
    }

    // Primary all-basis paths: one per layer-1 node, carried by its
    // layer-1 skeleton edge.
    for (int j = 0; j < arch.width(1); ++j) {
        std::vector<int> nodes = skeleton_suffix_nodes(arch, j, 1);
        nodes.insert(nodes.begin(), j % arch.width(0));
        BasisPath bp;
        bp.path = Path::from_nodes(arch, std::move(nodes));
        bp.carrier_edge = arch.edge_index(1, j % arch.width(0), j);
        bp.carrier_layer = 1;
        plan.allbasis_of_carrier[static_cast<size_t>(bp.carrier_edge)] = static_cast<int>(plan.all_basis.size());
        plan.all_basis.push_back(std::move(bp));
    }
    // Extra all-basis paths: one per incoming-only skeleton edge, which
    // exist where a hidden layer is wider than its predecessor.
    for (int l = 2; l < L; ++l) {
        for (int k = arch.width(l - 1); k < arch.width(l); ++k) {
            const int s = k % arch.width(l - 1);
            BasisPath bp;
            bp.path = Path::from_nodes(
                arch, concat_nodes(skeleton_prefix_nodes(arch, s, l - 1), skeleton_suffix_nodes(arch, k, l)));
            bp.carrier_edge = arch.edge_index(l, s, k);
            bp.carrier_layer = l;
            plan.allbasis_of_carrier[static_cast<size_t>(bp.carrier_edge)] = static_cast<int>(plan.all_basis.size());
            plan.all_basis.push_back(std::move(bp));
        }
    }

    // Skip-basis paths: canonical skeleton prefix into the non-skeleton
    // edge's tail, the edge itself, free-edge suffix out of its head.
    for (int e = 0; e < m; ++e) {
        if (plan.is_skeleton[static_cast<size_t>(e)]) continue;
        const EdgeRef ref = arch.edge_at(e);
        std::vector<int> nodes = ref.layer == 1 ? std::vector<int>{ref.from}
                                                : skeleton_prefix_nodes(arch, ref.from, ref.layer - 1);
        nodes = concat_nodes(std::move(nodes), skeleton_suffix_nodes(arch, ref.to, ref.layer));
        BasisPath bp;
        bp.path = Path::from_nodes(arch, std::move(nodes));
        bp.carrier_edge = e;
        bp.carrier_layer = ref.layer;
        plan.skip_of_edge[static_cast<size_t>(e)] = static_cast<int>(plan.skip_basis.size());
        plan.skip_basis.push_back(std::move(bp));
    }

    plan.basis_with_edge.assign(static_cast<size_t>(m), {});
    const int a = static_cast<int>(plan.all_basis.size());
    for (int g = 0; g < plan.basis_count(); ++g) {
        for (int e : plan.basis_path(g).edges) plan.basis_with_edge[static_cast<size_t>(e)].push_back(g);
    }
    for (int j = 0; j < a; ++j) {
        const Path& p = plan.all_basis[static_cast<size_t>(j)].path;
        for (int l = 1; l < L; ++l) {
            int& slot = plan.allbasis_of_hidden[static_cast<size_t>(
                arch.hidden_index(l, p.nodes[static_cast<size_t>(l)]))];
            if (slot < 0) slot = j;
        }
    }
    return plan;
}

long long count_basis_paths(const Architecture& arch) {
    return static_cast<long long>(arch.edge_count()) - arch.hidden_count();
}

BasisReport verify_basis(const Architecture& arch, const SkeletonPlan& plan) {
    BasisReport report;
    const long long expected = count_basis_paths(arch);
    report.count_ok = plan.basis_count() == expected;

    std::vector<std::vector<int>> cols;
    cols.reserve(static_cast<size_t>(plan.basis_count()));
    for (int g = 0; g < plan.basis_count(); ++g) {
        std::vector<int> rows = plan.basis_path(g).edges;
        std::sort(rows.begin(), rows.end());
        cols.push_back(std::move(rows));
    }
    report.rank_ok = exact_rank_columns(arch.edge_count(), cols) == expected;

    // Each non-skeleton edge must appear in exactly one basis path: its own
    // skip path. Recounted from the path lists, not the prebuilt indexes.
    std::vector<int> occurrences(static_cast<size_t>(arch.edge_count()), 0);
    for (int g = 0; g < plan.basis_count(); ++g) {
        for (int e : plan.basis_path(g).edges) ++occurrences[static_cast<size_t>(e)];
    }
    report.uniqueness_ok = true;
    for (int e = 0; e < arch.edge_count(); ++e) {
        if (plan.is_skeleton[static_cast<size_t>(e)]) continue;
        const int skip = plan.skip_of_edge[static_cast<size_t>(e)];
        if (occurrences[static_cast<size_t>(e)] != 1 || skip < 0 ||
            plan.skip_basis[static_cast<size_t>(skip)].carrier_edge != e) {
            report.uniqueness_ok = false;
            break;
        }
    }

    std::vector<char> covered(static_cast<size_t>(arch.hidden_count()), 0);
    for (const BasisPath& bp : plan.all_basis) {
        for (int l = 1; l < arch.layers(); ++l) {
            covered[static_cast<size_t>(arch.hidden_index(l, bp.path.nodes[static_cast<size_t>(l)]))] = 1;
        }
    }
    report.coverage_ok =
        std::all_of(covered.begin(), covered.end(), [](char c) { return c == 1; });
    return report;
}

PathExpansion express_nonbasis(const Architecture& arch, const Path& p, const SkeletonPlan& plan) {
    if (static_cast<int>(p.edges.size()) != arch.layers()) {
        throw ShapeError("path does not belong to this architecture");
    }
    PathExpansion expansion;
    std::map<int, long long> residual; // edge -> integer coefficient of (sum skips - p)
    auto add = [&residual](int edge, long long c) {
        auto [it, inserted] = residual.emplace(edge, c);
        if (!inserted && (it->second += c) == 0) residual.erase(it);
    };

    for (int e : p.edges) {
        const int skip = plan.skip_of_edge[static_cast<size_t>(e)];
        if (skip < 0) continue; // skeleton edge
        expansion.skip_indices.push_back(skip);
        for (int se : plan.skip_basis[static_cast<size_t>(skip)].path.edges) add(se, 1);
    }
    for (int e : p.edges) add(e, -1);

    // The remainder lies in the span of the all-basis columns; peel them
    // off by carrier, deepest layers first.
    for (int j = static_cast<int>(plan.all_basis.size()) - 1; j >= 0; --j) {
        const BasisPath& bp = plan.all_basis[static_cast<size_t>(j)];
        const auto it = residual.find(bp.carrier_edge);
        if (it == residual.end()) continue;
        const long long alpha = it->second;
        for (int e : bp.path.edges) add(e, -alpha);
        expansion.all_basis_subtracted.emplace_back(j, static_cast<int>(alpha));
    }
    if (!residual.empty()) {
        throw std::logic_error("skeleton plan cannot express the given path; plan is defective");
    }
    std::reverse(expansion.all_basis_subtracted.begin(), expansion.all_basis_subtracted.end());
    return expansion;
}

void write_plan(std::ostream& out, const SkeletonPlan& plan) {
    for (int e = 0; e < plan.arch.edge_count(); ++e) {
        if (plan.is_skeleton[static_cast<size_t>(e)]) out << "SKEL " << e << '\n';
    }
    for (int e : plan.free_edges) out << "FREE " << e << '\n';
    auto write_path = [&out](const char* tag, const BasisPath& bp) {
        out << tag << ' ' << bp.carrier_edge;
        for (int n : bp.path.nodes) out << ' ' << n;
        out << '\n';
    };
    for (const BasisPath& bp : plan.all_basis) write_path("ABASIS", bp);
    for (const BasisPath& bp : plan.skip_basis) write_path("SBASIS", bp);
}

} // namespace gspace
