#include <doctest.h>

#include <random>
#include <sstream>

#include "gspace/exact_rank.hpp"
#include "gspace/skeleton.hpp"
#include "test_util.hpp"

using namespace gspace;

namespace {
const Architecture fig1({2, 1, 2});

long long equal_width_closed_form(int d, int h, int layers, int k) {
    return static_cast<long long>(d) * h + static_cast<long long>(layers - 2) * h * h +
           static_cast<long long>(h) * k - static_cast<long long>(layers - 1) * h;
}
} // namespace

TEST_CASE("build_skeleton on the one-hidden-node network") {
    const SkeletonPlan plan = build_skeleton(fig1);
    // Edges: 0 = in0->hid, 1 = in1->hid, 2 = hid->out0, 3 = hid->out1.
    CHECK(plan.is_skeleton == std::vector<char>{1, 0, 1, 0});
    CHECK(plan.free_edges == std::vector<int>{2});
    REQUIRE(plan.all_basis.size() == 1);
    CHECK(plan.all_basis[0].path.nodes == std::vector<int>{0, 0, 0});
    CHECK(plan.all_basis[0].carrier_edge == 0);
    REQUIRE(plan.skip_basis.size() == 2);
    CHECK(plan.skip_basis[0].path.nodes == std::vector<int>{1, 0, 0}); // w2 * w3
    CHECK(plan.skip_basis[1].path.nodes == std::vector<int>{0, 0, 1}); // w1 * w4
    CHECK(plan.basis_count() == 3);
}

TEST_CASE("trivial plan for a single-layer network") {
    const Architecture arch({3, 2});
    const SkeletonPlan plan = build_skeleton(arch);
    CHECK(plan.free_edges.empty());
    CHECK(plan.all_basis.empty());
    CHECK(plan.skip_basis.size() == 6);
    CHECK(verify_basis(arch, plan).all_ok());
}

TEST_CASE("count_basis_paths") {
    CHECK(count_basis_paths(fig1) == 3);
    CHECK(count_basis_paths(Architecture({49, 8, 8, 10})) == 520);
    CHECK(count_basis_paths(Architecture({3, 5, 4, 2})) == 34); // (15+20+8) - (5+4)
    SUBCASE("equal-width closed form") {
        for (int h : {2, 3, 5}) {
            for (int layers : {2, 3, 4}) {
                std::vector<int> widths(static_cast<size_t>(layers) + 1, h);
                widths.front() = 4;
                widths.back() = 3;
                const Architecture arch(widths);
                CHECK(count_basis_paths(arch) == equal_width_closed_form(4, h, layers, 3));
                CHECK(count_basis_paths(arch) == static_cast<long long>(build_skeleton(arch).basis_count()));
            }
        }
    }
}

TEST_CASE("free skeleton edges are skeleton edges, one per hidden node") {
    for (const auto& widths :
         std::vector<std::vector<int>>{{2, 1, 2}, {3, 4, 2}, {2, 3, 2, 2}, {2, 2, 3, 2}, {3, 2, 5, 2, 4, 3}}) {
        const Architecture arch(widths);
        const SkeletonPlan plan = build_skeleton(arch);
        CHECK(static_cast<int>(plan.free_edges.size()) == arch.hidden_count());
        for (int e : plan.free_edges) {
            CHECK(plan.is_skeleton[static_cast<size_t>(e)]);
            CHECK(plan.is_free[static_cast<size_t>(e)]);
        }
    }
}

TEST_CASE("all-basis path count follows the width profile") {
    // h_1 plus, per middle layer, the width growth over its predecessor.
    CHECK(build_skeleton(Architecture({2, 2, 3, 2})).all_basis.size() == 3);  // 2 + (3-2)
    CHECK(build_skeleton(Architecture({2, 3, 2, 2})).all_basis.size() == 3);  // 3 + 0
    CHECK(build_skeleton(Architecture({49, 8, 8, 10})).all_basis.size() == 8);
    CHECK(build_skeleton(Architecture({3, 2, 5, 2, 4, 3})).all_basis.size() == 2 + 3 + 0 + 2);
}

TEST_CASE("verify_basis") {
    SUBCASE("all flags true on the verification set") {
        for (const auto& widths : std::vector<std::vector<int>>{{2, 1, 2}, {3, 2}, {2, 2, 2}, {3, 4, 2},
                                                                {2, 3, 2, 2}, {3, 3, 3, 3}, {2, 2, 3, 2},
                                                                {49, 8, 8, 10}}) {
            const Architecture arch(widths);
            const BasisReport report = verify_basis(arch, build_skeleton(arch));
            CAPTURE(widths[0]);
            CHECK(report.count_ok);
            CHECK(report.rank_ok);
            CHECK(report.uniqueness_ok);
            CHECK(report.coverage_ok);
        }
    }
    SUBCASE("smuggling the dependent fourth path in breaks the count") {
        SkeletonPlan plan = build_skeleton(fig1);
        BasisPath extra;
        extra.path = Path::from_nodes(fig1, {1, 0, 1}); // w2 * w4
        extra.carrier_edge = extra.path.edges[0];
        extra.carrier_layer = 1;
        plan.skip_basis.push_back(extra);
        const BasisReport report = verify_basis(fig1, plan);
        CHECK_FALSE(report.count_ok);
        CHECK_FALSE(report.uniqueness_ok);
    }
    SUBCASE("dropping an all-basis path breaks coverage and count") {
        SkeletonPlan plan = build_skeleton(fig1);
        plan.all_basis.clear();
        const BasisReport report = verify_basis(fig1, plan);
        CHECK_FALSE(report.count_ok);
        CHECK_FALSE(report.coverage_ok);
    }
}

TEST_CASE("basis column rank matches the full structure-matrix rank") {
    for (const auto& widths : std::vector<std::vector<int>>{{2, 1, 2}, {2, 2, 2}, {3, 4, 2}, {2, 3, 2, 2}}) {
        const Architecture arch(widths);
        CHECK(exact_rank(structure_matrix(arch)) == count_basis_paths(arch));
    }
}

TEST_CASE("express_nonbasis") {
    const SkeletonPlan plan = build_skeleton(fig1);

    SUBCASE("the dependent path is skip + skip - all") {
        const Path p4 = Path::from_nodes(fig1, {1, 0, 1});
        const PathExpansion ex = express_nonbasis(fig1, p4, plan);
        CHECK(ex.skip_indices == std::vector<int>{0, 1});
        REQUIRE(ex.all_basis_subtracted.size() == 1);
        CHECK(ex.all_basis_subtracted[0] == std::pair<int, int>{0, 1});
    }
    SUBCASE("basis paths come back as themselves") {
        const PathExpansion skip_ex = express_nonbasis(fig1, plan.skip_basis[1].path, plan);
        CHECK(skip_ex.skip_indices == std::vector<int>{1});
        CHECK(skip_ex.all_basis_subtracted.empty());
        const PathExpansion all_ex = express_nonbasis(fig1, plan.all_basis[0].path, plan);
        CHECK(all_ex.skip_indices.empty());
        REQUIRE(all_ex.all_basis_subtracted.size() == 1);
        CHECK(all_ex.all_basis_subtracted[0] == std::pair<int, int>{0, -1});
    }
    SUBCASE("exact exponent reconstruction and value identity on enumerable nets") {
        std::mt19937_64 rng(19);
        for (const auto& widths :
             std::vector<std::vector<int>>{{2, 2, 2}, {2, 3, 2, 2}, {2, 2, 3, 2}, {3, 3, 3, 3}}) {
            const Architecture arch(widths);
            const SkeletonPlan net_plan = build_skeleton(arch);
            const WeightVector w = random_nonzero_weights(arch, rng);
            for (const Path& p : enumerate_paths(arch)) {
                const PathExpansion ex = express_nonbasis(arch, p, net_plan);

                // Integer identity: p + sum alpha_j * allbasis_j = sum skips.
                std::vector<long long> lhs(static_cast<size_t>(arch.edge_count()), 0);
                for (int e : p.edges) ++lhs[static_cast<size_t>(e)];
                for (const auto& [j, alpha] : ex.all_basis_subtracted) {
                    CHECK(alpha <= arch.layers() - 1);
                    for (int e : net_plan.all_basis[static_cast<size_t>(j)].path.edges) {
                        lhs[static_cast<size_t>(e)] += alpha;
                    }
                }
                std::vector<long long> rhs(static_cast<size_t>(arch.edge_count()), 0);
                for (int i : ex.skip_indices) {
                    for (int e : net_plan.skip_basis[static_cast<size_t>(i)].path.edges) {
                        ++rhs[static_cast<size_t>(e)];
                    }
                }
                CHECK(lhs == rhs);

                // Value identity: v_p * prod v_all^alpha = prod v_skip.
                double lhs_v = path_value(w, p);
                for (const auto& [j, alpha] : ex.all_basis_subtracted) {
                    lhs_v *= std::pow(path_value(w, net_plan.all_basis[static_cast<size_t>(j)].path), alpha);
                }
                double rhs_v = 1.0;
                for (int i : ex.skip_indices) {
                    rhs_v *= path_value(w, net_plan.skip_basis[static_cast<size_t>(i)].path);
                }
                CHECK(rel_err(lhs_v, rhs_v) <= 1e-10);
            }
        }
    }
    SUBCASE("value identity holds across 100 random weight draws") {
        const Architecture arch({2, 2, 2});
        const SkeletonPlan net_plan = build_skeleton(arch);
        const std::vector<Path> paths = enumerate_paths(arch);
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 100; ++trial) {
            const WeightVector w = random_nonzero_weights(arch, rng);
            for (const Path& p : paths) {
                const PathExpansion ex = express_nonbasis(arch, p, net_plan);
                double lhs_v = path_value(w, p);
                for (const auto& [j, alpha] : ex.all_basis_subtracted) {
                    lhs_v *= std::pow(path_value(w, net_plan.all_basis[static_cast<size_t>(j)].path), alpha);
                }
                double rhs_v = 1.0;
                for (int i : ex.skip_indices) {
                    rhs_v *= path_value(w, net_plan.skip_basis[static_cast<size_t>(i)].path);
                }
                CHECK(rel_err(lhs_v, rhs_v) <= 1e-10);
            }
        }
    }
}

TEST_CASE("plan export records every component") {
    const SkeletonPlan plan = build_skeleton(fig1);
    std::ostringstream out;
    write_plan(out, plan);
    std::istringstream in(out.str());
    std::string tag;
    int skel = 0, free_count = 0, abasis = 0, sbasis = 0;
    while (in >> tag) {
        std::string rest;
        std::getline(in, rest);
        if (tag == "SKEL") ++skel;
        else if (tag == "FREE") ++free_count;
        else if (tag == "ABASIS") ++abasis;
        else if (tag == "SBASIS") ++sbasis;
        else FAIL("unknown tag " << tag);
    }
    CHECK(skel == 2);
    CHECK(free_count == 1);
    CHECK(abasis == 1);
    CHECK(sbasis == 2);
}
