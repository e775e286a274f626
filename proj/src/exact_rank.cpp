#include "gspace/exact_rank.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <utility>

namespace gspace {

namespace {

using BigInt = boost::multiprecision::cpp_int;

// Bareiss elimination on a working copy. Each step pivots on the smallest
// nonzero magnitude in the remaining block, which keeps intermediate
// minors small on the near-unimodular matrices this project produces.
int bareiss_rank(std::vector<BigInt>& m, int rows, int cols) {
    auto at = [&](int r, int c) -> BigInt& {
        return m[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)];
    };
    BigInt prev = 1;
    int rank = 0;
    for (int step = 0; rank < rows && step < cols; ++step) {
        // Smallest-magnitude nonzero pivot in columns >= step, rows >= rank;
        // a unit entry ends the search immediately.
        int pr = -1, pc = -1;
        for (int r = rank; r < rows && pr < 0; ++r) {
            for (int c = step; c < cols; ++c) {
                const BigInt& v = at(r, c);
                if (v == 1 || v == -1) {
                    pr = r;
                    pc = c;
                    break;
                }
            }
        }
        if (pr < 0) {
            for (int r = rank; r < rows; ++r) {
                for (int c = step; c < cols; ++c) {
                    const BigInt& v = at(r, c);
                    if (v == 0) continue;
                    if (pr < 0 || abs(v) < abs(at(pr, pc))) {
                        pr = r;
                        pc = c;
                    }
                }
            }
        }
        if (pr < 0) break;
        if (pr != rank) {
            for (int c = 0; c < cols; ++c) std::swap(at(pr, c), at(rank, c));
        }
        if (pc != step) {
            for (int r = 0; r < rows; ++r) std::swap(at(r, pc), at(r, step));
        }
        const BigInt pivot = at(rank, step);
        for (int r = rank + 1; r < rows; ++r) {
            const BigInt factor = at(r, step);
            for (int c = step + 1; c < cols; ++c) {
                at(r, c) = (pivot * at(r, c) - factor * at(rank, c)) / prev;
            }
            at(r, step) = 0;
        }
        prev = pivot;
        ++rank;
    }
    return rank;
}

} // namespace

int exact_rank(const IntMatrix& m) {
    if (m.rows == 0 || m.cols == 0) return 0;
    // Eliminate along the shorter dimension.
    const bool transpose = m.rows > m.cols;
    const int rows = transpose ? m.cols : m.rows;
    const int cols = transpose ? m.rows : m.cols;
    std::vector<BigInt> work(static_cast<size_t>(rows) * static_cast<size_t>(cols));
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            const long long v = m.at(r, c);
            if (v == 0) continue;
            const int rr = transpose ? c : r;
            const int cc = transpose ? r : c;
            work[static_cast<size_t>(rr) * static_cast<size_t>(cols) + static_cast<size_t>(cc)] = v;
        }
    }
    return bareiss_rank(work, rows, cols);
}

int exact_rank_columns(int rows, const std::vector<std::vector<int>>& cols) {
    IntMatrix m(rows, static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols; ++j) {
        for (int r : cols[static_cast<size_t>(j)]) m.at(r, j) = 1;
    }
    return exact_rank(m);
}

int exact_rank(const StructureMatrix& m) {
    return exact_rank_columns(m.rows, m.col_rows);
}

} // namespace gspace
