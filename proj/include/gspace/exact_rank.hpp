#pragma once

#include <vector>

#include "gspace/paths.hpp"

namespace gspace {

// Dense integer matrix, row-major.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<long long> a;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), 0) {}
    long long& at(int r, int c) { return a[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
    long long at(int r, int c) const { return a[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
};

// Rank over the rationals by fraction-free (Bareiss) Gaussian elimination
// in arbitrary-precision integers. No floating point anywhere.
int exact_rank(const IntMatrix& m);

// Rank of a set of sparse {0,1} columns over `rows` rows.
int exact_rank_columns(int rows, const std::vector<std::vector<int>>& cols);

int exact_rank(const StructureMatrix& m);

} // namespace gspace
