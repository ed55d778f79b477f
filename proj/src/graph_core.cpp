#include "gridident/graph_core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "gridident/errors.hpp"

namespace gridident {

namespace {

std::string edge_name(Edge e) {
    return "(" + std::to_string(e.i) + "," + std::to_string(e.j) + ")";
}

template <typename Matrix>
int rank_from_svd(const Matrix& m, std::optional<double> rel_tol) {
    if (m.size() == 0) {
        return 0;
    }
    const double tol = rel_tol.value_or(default_rank_tolerance(m.rows(), m.cols()));
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 0;
    }
    const double cutoff = tol * sv(0);
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cutoff) {
            ++rank;
        }
    }
    return rank;
}

}  // namespace

NetworkGraph::NetworkGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 1) {
        throw InvalidSizeError("graph needs at least one node, got n=" + std::to_string(n));
    }
    for (auto& e : edges_) {
        if (e.i > e.j) {
            std::swap(e.i, e.j);
        }
        if (e.i == e.j) {
            throw ValidationError("self-loop at node " + std::to_string(e.i));
        }
        if (e.i < 1 || e.j > n) {
            throw ValidationError("edge " + edge_name(e) + " out of range for n=" + std::to_string(n));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end()) {
        throw ValidationError("duplicate edge " + edge_name(*dup));
    }
    tails_.reserve(edges_.size());
    heads_.reserve(edges_.size());
    for (const auto& e : edges_) {
        tails_.push_back(e.i - 1);
        heads_.push_back(e.j - 1);
    }
}

bool NetworkGraph::contains(Edge e) const { return index_of(e).has_value(); }

std::optional<int> NetworkGraph::index_of(Edge e) const {
    if (e.i > e.j) {
        std::swap(e.i, e.j);
    }
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) {
        return std::nullopt;
    }
    return static_cast<int>(it - edges_.begin());
}

NetworkGraph complete_graph(int n) {
    if (n < 2) {
        throw InvalidSizeError("complete graph needs n >= 2, got n=" + std::to_string(n));
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            edges.push_back({i, j});
        }
    }
    return NetworkGraph(n, std::move(edges));
}

NetworkGraph remove_edge(const NetworkGraph& g, Edge edge) {
    auto idx = g.index_of(edge);
    if (!idx) {
        throw NotFoundError("edge " + edge_name(edge) + " is not in the graph");
    }
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    edges.erase(edges.begin() + *idx);
    return NetworkGraph(g.node_count(), std::move(edges));
}

bool is_connected(const NetworkGraph& g) {
    const int n = g.node_count();
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    int components = n;
    for (const auto& e : g.edges()) {
        int a = find(e.i - 1);
        int b = find(e.j - 1);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

bool is_tree(const NetworkGraph& g) { return g.edge_count() == g.node_count() - 1 && is_connected(g); }

RMatrix incidence_matrix(const NetworkGraph& g) {
    RMatrix h = RMatrix::Zero(g.node_count(), g.edge_count());
    for (int l = 0; l < g.edge_count(); ++l) {
        h(g.tails()[l], l) = 1.0;
        h(g.heads()[l], l) = -1.0;
    }
    return h;
}

CMatrix rigidity_matrix(const Framework& f) {
    const int n = f.graph.node_count();
    const int tau = f.dimension();
    if (f.realization.rows() != n) {
        throw InvalidSizeError("realization has " + std::to_string(f.realization.rows()) + " rows, graph has " +
                               std::to_string(n) + " nodes");
    }
    if (tau < 1) {
        throw InvalidSizeError("framework dimension must be >= 1");
    }
    CMatrix r = CMatrix::Zero(f.graph.edge_count(), static_cast<Eigen::Index>(n) * tau);
    for (int l = 0; l < f.graph.edge_count(); ++l) {
        const int a = f.graph.tails()[l];
        const int b = f.graph.heads()[l];
        for (int k = 0; k < tau; ++k) {
            const cplx d = f.realization(a, k) - f.realization(b, k);
            r(l, a * tau + k) = d;
            r(l, b * tau + k) = -d;
        }
    }
    return r;
}

int trivial_motion_count(int tau) {
    if (tau < 1) {
        throw InvalidSizeError("dimension must be >= 1");
    }
    return tau * (tau + 1) / 2;
}

int predicted_rank_minus_one_edge(int n, int tau) {
    if (tau < 1 || n < 4 || n < tau) {
        throw OutOfRegimeError("rank formula holds only for n >= 4 and 1 <= tau <= n (got n=" + std::to_string(n) +
                               ", tau=" + std::to_string(tau) + ")");
    }
    return n * tau - trivial_motion_count(tau);
}

double default_rank_tolerance(Eigen::Index rows, Eigen::Index cols) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

int numerical_rank(const CMatrix& m, std::optional<double> rel_tol) { return rank_from_svd(m, rel_tol); }

int numerical_rank(const RMatrix& m, std::optional<double> rel_tol) { return rank_from_svd(m, rel_tol); }

std::vector<int> a_to_rigidity_permutation(int n, int tau) {
    if (n < 1 || tau < 1) {
        throw InvalidSizeError("permutation needs n >= 1 and tau >= 1");
    }
    std::vector<int> p(static_cast<std::size_t>(n) * tau);
    for (int k = 0; k < tau; ++k) {
        for (int i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(k) * n + i] = i * tau + k;
        }
    }
    return p;
}

CMatrix permute_columns(const CMatrix& a_transposed, std::span<const int> permutation) {
    if (static_cast<Eigen::Index>(permutation.size()) != a_transposed.cols()) {
        throw InvalidSizeError("permutation length does not match column count");
    }
    CMatrix out(a_transposed.rows(), a_transposed.cols());
    for (std::size_t c = 0; c < permutation.size(); ++c) {
        out.col(permutation[c]) = a_transposed.col(static_cast<Eigen::Index>(c));
    }
    return out;
}

}  // namespace gridident
