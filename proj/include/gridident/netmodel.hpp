#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridident/graph_core.hpp"
#include "gridident/types.hpp"

namespace gridident {

/// Graph plus one complex admittance per edge, in the graph's canonical edge order.
struct AdmittanceNetwork {
    NetworkGraph graph;
    CVector y;
    std::vector<std::string> labels;  // optional, one per node when present

    AdmittanceNetwork() = default;
    AdmittanceNetwork(NetworkGraph g, CVector admittances, std::vector<std::string> node_labels = {});

    int node_count() const noexcept { return graph.node_count(); }
    int edge_count() const noexcept { return graph.edge_count(); }
    /// Admittance of the edge, zero when the pair is not an edge.
    cplx admittance(Edge e) const;
};

/// Relative tolerance used by the structural checks on admittance matrices.
inline constexpr double kMatrixConsistencyTol = 1e-9;

/// Symmetric Y with off-diagonals -y_ij and zero row sums.
CMatrix matrix_from_vector(const AdmittanceNetwork& net);

/// Reads -Y(i,j) for every edge of g. Throws ConsistencyError when Y is not
/// symmetric or its rows do not sum to zero (relative to max |Y|).
CVector vector_from_matrix(const CMatrix& Y, const NetworkGraph& g);

/// Deletes row and column of the slack node (node 1).
CMatrix reduce_slack(const CMatrix& Y);

/// Symmetric zero-row-sum completion: first row/column -Ybar*1, corner 1^T Ybar 1.
CMatrix reconstruct_full(const CMatrix& Ybar);

enum class Phase { a = 0, b = 1, c = 2 };

char phase_char(Phase p);
Phase phase_from_char(char c);
/// Parses strings such as "abc" or "bc"; rejects repeats and unknown letters.
std::vector<Phase> phases_from_string(const std::string& s);
std::string phases_to_string(const std::vector<Phase>& phases);

struct Bus {
    std::string name;
    std::vector<Phase> phases;
};

/// Admittance between phase `from_phase` of the branch's first bus and phase
/// `to_phase` of its second bus. Cross-phase terms have from_phase != to_phase.
struct PhaseCoupling {
    Phase from_phase;
    Phase to_phase;
    cplx y;
};

struct Branch {
    std::string from_bus;
    std::string to_bus;
    std::vector<PhaseCoupling> couplings;
};

struct BusSpec {
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    const Bus* find_bus(const std::string& name) const;
};

using PhaseNode = std::pair<std::string, Phase>;

struct PhaseExpansion {
    AdmittanceNetwork network;
    std::map<PhaseNode, int> node_of;      // 1-based node label per (bus, phase)
    std::vector<PhaseNode> node_labels;    // inverse map, index = node - 1
};

/// One node per (bus, phase) in bus order, phases a-b-c within a bus. Couplings
/// landing on the same node pair add up (parallel admittances).
PhaseExpansion phase_expand(const BusSpec& spec);

}  // namespace gridident
