#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gspace/arch.hpp"
#include "gspace/nn.hpp"

namespace gspace {

inline constexpr long long kDefaultEnumerationCap = 1'000'000;

// One input->output route through a single node per layer. Stored as the
// node sequence (i_0, ..., i_L) plus the flat edge index per layer. The
// {0,1}^m exponent vector is derived on demand.
struct Path {
    std::vector<int> nodes;
    std::vector<int> edges;

    static Path from_nodes(const Architecture& arch, std::vector<int> nodes);
    bool operator==(const Path&) const = default;
};

// m x n sparse {0,1} matrix whose column j is the exponent vector of path j.
struct StructureMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<int>> col_rows; // sorted edge indices per column
};

// Generalized addition on (R\{0})^m: elementwise product. Throws
// std::domain_error on a zero entry or length mismatch.
std::vector<double> gadd(std::span<const double> w, std::span<const double> w2);

// Generalized scalar multiplication: sgn(w_i) * |w_i|^{ln alpha}, alpha > 0.
std::vector<double> gscale(double alpha, std::span<const double> w);

// Product of the L weights along p.
double path_value(const WeightVector& w, const Path& p);

// Same value computed from the {0,1}^m exponent vector by folding the
// generalized scalar addition over the selected entries.
double generalized_inner_product(const WeightVector& w, std::span<const std::uint8_t> exponents);

std::vector<std::uint8_t> exponent_vector(const Architecture& arch, const Path& p);

// All paths in lexicographic node-sequence order. Throws
// EnumerationLimitError when the count exceeds `cap`.
std::vector<Path> enumerate_paths(const Architecture& arch, long long cap = kDefaultEnumerationCap);

StructureMatrix structure_matrix(const Architecture& arch, long long cap = kDefaultEnumerationCap);

// Binary status per hidden node, 1{o > 0}, layer-major order.
std::vector<std::uint8_t> activation_pattern(const Architecture& arch, const WeightVector& w,
                                             std::span<const double> x);
std::vector<std::uint8_t> activation_pattern(const Architecture& arch, const ForwardTrace& trace);

// Product of hidden-node statuses along p.
double path_activation(const Architecture& arch, const Path& p, std::span<const std::uint8_t> statuses);

// Output k = sum over paths ending at k of v_p * a_p * x_{i_0}. The
// brute-force oracle for forward().
std::vector<double> path_sum_output(const Architecture& arch, const WeightVector& w, std::span<const double> x,
                                    long long cap = kDefaultEnumerationCap);

// Sparse triplet export, header "m n nnz" then one "row col 1" line per
// entry (0-based, column-major order).
void write_structure_matrix(std::ostream& out, const StructureMatrix& m);

} // namespace gspace
