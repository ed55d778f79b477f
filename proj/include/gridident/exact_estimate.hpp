#pragma once

#include <optional>
#include <string>

#include "gridident/errors.hpp"
#include "gridident/graph_core.hpp"
#include "gridident/synth.hpp"
#include "gridident/types.hpp"

namespace gridident {

enum class PriorKind { none, tree, minus_one_edge, explicit_graph };

std::string prior_kind_name(PriorKind kind);

/// The hypothesis edge set an estimator works over, tagged with how it was obtained.
class PriorTopology {
  public:
    static PriorTopology complete(int n);
    /// Throws ValidationError unless `tree` is a spanning tree.
    static PriorTopology tree(NetworkGraph tree);
    static PriorTopology minus_one_edge(int n, Edge missing);
    static PriorTopology explicit_graph(NetworkGraph g);
    /// Picks the most specific kind the graph matches.
    static PriorTopology classify(NetworkGraph g);

    PriorKind kind() const noexcept { return kind_; }
    const NetworkGraph& graph() const noexcept { return graph_; }
    int node_count() const noexcept { return graph_.node_count(); }
    int unknowns() const noexcept { return graph_.edge_count(); }

  private:
    PriorTopology(PriorKind kind, NetworkGraph g) : kind_(kind), graph_(std::move(g)) {}

    PriorKind kind_;
    NetworkGraph graph_;
};

struct MinMeasurements {
    int tau = 0;
    bool heuristic = false;  // explicit graphs: ceil(e/n) lower bound only
};

/// none: n-1, tree: 1, minus_one_edge: n-2 (requires n >= 4).
MinMeasurements min_measurements(PriorKind kind, int n, int unknowns = 0);
MinMeasurements min_measurements(const PriorTopology& prior);

struct UniquenessDiagnostic {
    int rank = 0;
    int unknowns = 0;
    int deficiency = 0;
    bool unique = false;
};

UniquenessDiagnostic uniqueness_diagnostic(const CMatrix& A, int unknowns);

/// The linear system does not pin down a single solution.
class NonUniquenessError : public Error {
  public:
    NonUniquenessError(const std::string& what, UniquenessDiagnostic diag) : Error(what), diag_(diag) {}
    const UniquenessDiagnostic& diagnostic() const noexcept { return diag_; }

  private:
    UniquenessDiagnostic diag_;
};

struct ReducedMeasurements {
    CMatrix vbar;  // (n-1) x tau
    CMatrix ibar;  // (n-1) x tau
};

/// Drops the slack row and subtracts the slack voltage from the remaining
/// voltages. Without an explicit slack value each operating point uses its own
/// node-1 voltage.
ReducedMeasurements build_reduced_measurements(const MeasurementSet& ms,
                                               std::optional<cplx> slack_voltage = std::nullopt);

/// Solves ibar = Ybar * vbar. Square vbar: direct LU solve; tall: right
/// pseudo-inverse ibar vbar^H (vbar vbar^H)^-1. Throws NonUniquenessError when
/// vbar has rank below n-1.
CMatrix estimate_reduced(const CMatrix& vbar, const CMatrix& ibar);

/// Least-squares y for A y = i; throws NonUniquenessError when rank(A) < cols.
CVector estimate_vector_ls(const CMatrix& A, const CVector& currents);

/// Minimum-norm least-squares solution, no uniqueness requirement.
CVector minimum_norm_solve(const CMatrix& A, const CVector& rhs);

/// max |Ybar - Ybar^T| / max |Ybar|.
double symmetry_deviation(const CMatrix& Ybar);

}  // namespace gridident
