#include "gspace/paths.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace gspace {

Path Path::from_nodes(const Architecture& arch, std::vector<int> nodes) {
    if (static_cast<int>(nodes.size()) != arch.layers() + 1) {
        throw ShapeError("path needs one node per layer");
    }
    Path p;
    p.edges.reserve(nodes.size() - 1);
    for (int l = 1; l <= arch.layers(); ++l) {
        const int from = nodes[static_cast<size_t>(l) - 1];
        const int to = nodes[static_cast<size_t>(l)];
        if (from < 0 || from >= arch.width(l - 1) || to < 0 || to >= arch.width(l)) {
            throw ShapeError("path node out of range at layer " + std::to_string(l));
        }
        p.edges.push_back(arch.edge_index(l, from, to));
    }
    p.nodes = std::move(nodes);
    return p;
}

std::vector<double> gadd(std::span<const double> w, std::span<const double> w2) {
    if (w.size() != w2.size()) throw std::domain_error("gadd length mismatch");
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0.0 || w2[i] == 0.0) throw std::domain_error("gadd on a zero entry");
        out[i] = w[i] * w2[i];
    }
    return out;
}

std::vector<double> gscale(double alpha, std::span<const double> w) {
    if (!(alpha > 0.0)) throw std::domain_error("gscale needs alpha > 0");
    const double e = std::log(alpha);
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0.0) throw std::domain_error("gscale on a zero entry");
        out[i] = std::copysign(std::pow(std::fabs(w[i]), e), w[i]);
    }
    return out;
}

double path_value(const WeightVector& w, const Path& p) {
    double v = 1.0;
    for (int e : p.edges) v *= w[static_cast<size_t>(e)];
    return v;
}

double generalized_inner_product(const WeightVector& w, std::span<const std::uint8_t> exponents) {
    if (w.size() != exponents.size()) throw std::domain_error("exponent vector length mismatch");
    // Scalar generalized addition is ordinary multiplication; fold it over
    // the entries selected by exponent 1 (the empty sum is the identity 1).
    double acc = 1.0;
    for (size_t i = 0; i < w.size(); ++i) {
        if (exponents[i]) acc *= w[i];
    }
    return acc;
}

std::vector<std::uint8_t> exponent_vector(const Architecture& arch, const Path& p) {
    std::vector<std::uint8_t> e(static_cast<size_t>(arch.edge_count()), 0);
    for (int idx : p.edges) e[static_cast<size_t>(idx)] = 1;
    return e;
}

std::vector<Path> enumerate_paths(const Architecture& arch, long long cap) {
    const long long n = arch.path_count();
    if (n > cap) {
        throw EnumerationLimitError("architecture has " + std::to_string(n) + " paths, cap is " +
                                    std::to_string(cap));
    }
    const int L = arch.layers();
    std::vector<Path> paths;
    paths.reserve(static_cast<size_t>(n));
    std::vector<int> nodes(static_cast<size_t>(L) + 1, 0);
    while (true) {
        paths.push_back(Path::from_nodes(arch, nodes));
        int pos = L;
        while (pos >= 0) {
            if (++nodes[static_cast<size_t>(pos)] < arch.width(pos)) break;
            nodes[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return paths;
}

StructureMatrix structure_matrix(const Architecture& arch, long long cap) {
    const std::vector<Path> paths = enumerate_paths(arch, cap);
    StructureMatrix m;
    m.rows = arch.edge_count();
    m.cols = static_cast<int>(paths.size());
    m.col_rows.reserve(paths.size());
    for (const Path& p : paths) {
        std::vector<int> rows = p.edges;
        std::sort(rows.begin(), rows.end());
        m.col_rows.push_back(std::move(rows));
    }
    return m;
}

std::vector<std::uint8_t> activation_pattern(const Architecture& arch, const ForwardTrace& trace) {
    std::vector<std::uint8_t> statuses;
    statuses.reserve(static_cast<size_t>(arch.hidden_count()));
    for (int l = 1; l < arch.layers(); ++l) {
        for (double o : trace.node_values[static_cast<size_t>(l)]) {
            statuses.push_back(o > 0.0 ? 1 : 0);
        }
    }
    return statuses;
}

std::vector<std::uint8_t> activation_pattern(const Architecture& arch, const WeightVector& w,
                                             std::span<const double> x) {
    return activation_pattern(arch, forward(arch, w, x));
}

double path_activation(const Architecture& arch, const Path& p, std::span<const std::uint8_t> statuses) {
    double a = 1.0;
    for (int l = 1; l < arch.layers(); ++l) {
        a *= statuses[static_cast<size_t>(arch.hidden_index(l, p.nodes[static_cast<size_t>(l)]))];
    }
    return a;
}

std::vector<double> path_sum_output(const Architecture& arch, const WeightVector& w, std::span<const double> x,
                                    long long cap) {
    require_weight_shape(arch, w);
    if (static_cast<int>(x.size()) != arch.input_dim()) throw ShapeError("input dimension mismatch");
    const std::vector<Path> paths = enumerate_paths(arch, cap);
    const std::vector<std::uint8_t> statuses = activation_pattern(arch, w, x);
    std::vector<double> out(static_cast<size_t>(arch.output_dim()), 0.0);
    for (const Path& p : paths) {
        const double a = path_activation(arch, p, statuses);
        if (a == 0.0) continue;
        out[static_cast<size_t>(p.nodes.back())] += path_value(w, p) * a * x[static_cast<size_t>(p.nodes.front())];
    }
    return out;
}

void write_structure_matrix(std::ostream& out, const StructureMatrix& m) {
    long long nnz = 0;
    for (const auto& col : m.col_rows) nnz += static_cast<long long>(col.size());
    out << m.rows << ' ' << m.cols << ' ' << nnz << '\n';
    for (int j = 0; j < m.cols; ++j) {
        for (int r : m.col_rows[static_cast<size_t>(j)]) out << r << ' ' << j << " 1\n";
    }
}

} // namespace gspace
