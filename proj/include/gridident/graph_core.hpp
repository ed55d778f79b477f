#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridident/types.hpp"

namespace gridident {

/// Undirected edge between 1-based node labels, stored with i < j.
struct Edge {
    int i = 0;
    int j = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Node set 1..n plus an edge list kept in strictly increasing lexicographic order.
///
/// The constructor sorts its input and rejects self-loops, duplicates and
/// out-of-range labels; a pair given as (j, i) with j > i is normalised to (i, j).
class NetworkGraph {
  public:
    NetworkGraph() = default;
    NetworkGraph(int n, std::vector<Edge> edges);

    int node_count() const noexcept { return n_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(int l) const { return edges_.at(static_cast<std::size_t>(l)); }

    bool contains(Edge e) const;
    /// 0-based position of the edge in canonical order.
    std::optional<int> index_of(Edge e) const;

    /// 0-based tail (smaller label) / head (larger label) per edge, for the kernels.
    std::span<const std::int32_t> tails() const noexcept { return tails_; }
    std::span<const std::int32_t> heads() const noexcept { return heads_; }

    bool operator==(const NetworkGraph& other) const { return n_ == other.n_ && edges_ == other.edges_; }

  private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::int32_t> tails_;
    std::vector<std::int32_t> heads_;
};

NetworkGraph complete_graph(int n);
NetworkGraph remove_edge(const NetworkGraph& g, Edge edge);

bool is_connected(const NetworkGraph& g);
bool is_tree(const NetworkGraph& g);

/// n x e matrix with +1 at the smaller endpoint and -1 at the larger one.
RMatrix incidence_matrix(const NetworkGraph& g);

/// Graph plus one tau-dimensional point per node (row i of `realization` is node i+1).
struct Framework {
    NetworkGraph graph;
    CMatrix realization;

    int dimension() const noexcept { return static_cast<int>(realization.cols()); }
};

/// e x (n*tau) matrix, node-major columns: the node-i block of the row for
/// edge (i, j) is x_i - x_j and the node-j block is x_j - x_i.
CMatrix rigidity_matrix(const Framework& f);

/// tau translations plus tau(tau-1)/2 rotations.
int trivial_motion_count(int tau);

/// n*tau - tau(tau+1)/2; throws OutOfRegimeError unless n >= 4, n >= tau, tau >= 1.
int predicted_rank_minus_one_edge(int n, int tau);

/// Default relative tolerance max(rows, cols) * machine epsilon.
double default_rank_tolerance(Eigen::Index rows, Eigen::Index cols);

/// Number of singular values above rel_tol * sigma_max.
int numerical_rank(const CMatrix& m, std::optional<double> rel_tol = std::nullopt);
int numerical_rank(const RMatrix& m, std::optional<double> rel_tol = std::nullopt);

/// 0-based column permutation p with column c of A(v)^T equal to column p[c] of
/// R(x) when x = v: p[k*n + i] = i*tau + k.
std::vector<int> a_to_rigidity_permutation(int n, int tau);

/// Reorders columns of `a_transposed` (e x n*tau) according to the permutation.
CMatrix permute_columns(const CMatrix& a_transposed, std::span<const int> permutation);

}  // namespace gridident
