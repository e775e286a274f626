#include <doctest.h>

#include <random>

#include "gspace/exact_rank.hpp"

using namespace gspace;

namespace {

IntMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
    IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return m;
}

} // namespace

TEST_CASE("exact_rank on hand matrices") {
    CHECK(exact_rank(from_rows({{1, 0}, {0, 1}})) == 2);
    CHECK(exact_rank(from_rows({{1, 2}, {2, 4}})) == 1);
    CHECK(exact_rank(from_rows({{0, 0}, {0, 0}})) == 0);
    CHECK(exact_rank(from_rows({{1, 2, 3}, {4, 5, 6}})) == 2);
    CHECK(exact_rank(from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}})) == 2);
    // A matrix float elimination would misjudge: rows differ by 1 part in 2^53.
    CHECK(exact_rank(from_rows({{9007199254740993LL, 1}, {9007199254740992LL, 1}})) == 2);
}

TEST_CASE("exact_rank of structure matrices equals m - H") {
    struct Case {
        std::vector<int> widths;
        int expected;
    };
    for (const Case& c : {Case{{2, 1, 2}, 3}, Case{{3, 2}, 6}, Case{{2, 2, 2}, 6}, Case{{3, 4, 2}, 16},
                          Case{{2, 3, 2, 2}, 11}, Case{{3, 3, 3, 3}, 21}}) {
        const Architecture arch(c.widths);
        CHECK(exact_rank(structure_matrix(arch)) == c.expected);
        CHECK(c.expected == arch.edge_count() - arch.hidden_count());
    }
}

TEST_CASE("exact_rank properties on random integer matrices") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int trial = 0; trial < 30; ++trial) {
        const int rows = 3 + static_cast<int>(rng() % 5);
        const int cols = 3 + static_cast<int>(rng() % 5);
        IntMatrix m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) m.at(r, c) = entry(rng);
        }
        const int rank = exact_rank(m);
        CHECK(rank <= std::min(rows, cols));

        IntMatrix t(cols, rows);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) t.at(c, r) = m.at(r, c);
        }
        CHECK(exact_rank(t) == rank);

        // Appending the sum of two existing columns must not raise the rank.
        IntMatrix wider(rows, cols + 1);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) wider.at(r, c) = m.at(r, c);
            wider.at(r, cols) = m.at(r, 0) + m.at(r, cols - 1);
        }
        CHECK(exact_rank(wider) == rank);
    }
}

TEST_CASE("exact_rank_columns mirrors the dense routine") {
    const Architecture arch({2, 3, 2, 2});
    const StructureMatrix m = structure_matrix(arch);
    CHECK(exact_rank_columns(m.rows, m.col_rows) == exact_rank(m));
}
