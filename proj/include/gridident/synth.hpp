#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridident/netmodel.hpp"
#include "gridident/types.hpp"

namespace gridident {

/// One synchronized snapshot of nodal voltages and injected currents.
struct OperatingPoint {
    CVector V;
    CVector I;
    int k = 1;  // 1-based measurement index
};

/// Gaussian noise with per-node standard deviation sigma_scale * |V^(1)_j|,
/// applied independently to the real and imaginary parts of V and I.
struct NoiseSpec {
    double sigma_scale = 0.001;
};

struct MeasurementSet {
    std::vector<OperatingPoint> points;
    bool noisy = false;
    bool surrogate = false;  // produced by averaging replicates
    std::optional<NoiseSpec> noise;
    std::uint64_t seed = 0;

    int tau() const noexcept { return static_cast<int>(points.size()); }
    int node_count() const noexcept { return points.empty() ? 0 : static_cast<int>(points.front().V.size()); }

    /// First tau points, same metadata.
    MeasurementSet prefix(int tau) const;
    /// n x tau voltage and current matrices (columns are operating points).
    CMatrix voltage_matrix() const;
    CMatrix current_matrix() const;
};

/// Unit magnitude, phase uniform in [-0.5, 0.5] degrees.
CVector default_base_voltages(int n, std::uint64_t seed);

/// I = Y V, evaluated both as a dense product and edge-wise; throws
/// ConsistencyError if the two disagree beyond 1e-12 relative.
CVector currents_from_voltages(const AdmittanceNetwork& net, const CVector& V);

/// `count` vectors V1 + delta, Re/Im of delta_j uniform in [-0.05|V1_j|, 0.05|V1_j|].
std::vector<CVector> perturb_voltages(const CVector& V1, int count, std::uint64_t seed);

/// tau noiseless operating points: V^(1) = base (default profile when absent),
/// later points perturbed from V^(1), currents from Kirchhoff.
MeasurementSet synthesize(const AdmittanceNetwork& net, int tau, std::uint64_t seed,
                          const std::optional<CVector>& base_voltages = std::nullopt);

/// Noisy copy of a noiseless set; the input is left untouched.
MeasurementSet add_noise(const MeasurementSet& ms, const NoiseSpec& spec, std::uint64_t seed);

/// Entrywise mean across replicate sets, per operating point.
MeasurementSet average_snapshots(std::span<const MeasurementSet> sets);

/// H diag(H^T V): column for edge (i, j) holds V_i - V_j at row i and V_j - V_i at row j.
CMatrix voltage_coefficient(const RMatrix& H, const CVector& V);
/// Same matrix built straight from the edge list.
CMatrix voltage_coefficient(const NetworkGraph& g, const CVector& V);

/// Row-stacked coefficient matrix A(v) (n*tau x e) and current stack.
struct StackedSystem {
    CMatrix A;
    CVector currents;
};

StackedSystem stack_coefficients(const MeasurementSet& ms, const NetworkGraph& hypothesis);
StackedSystem stack_coefficients(const MeasurementSet& ms, const RMatrix& H);

/// Random connected network: a random spanning tree plus each remaining pair
/// with probability `extra_edge_probability`. Admittances are 1/(r + jx) with
/// r in [0.02, 0.08] and x in [0.06, 0.24] per unit.
AdmittanceNetwork random_connected_network(int n, double extra_edge_probability, std::uint64_t seed);
AdmittanceNetwork random_tree_network(int n, std::uint64_t seed);

/// True when, for every node, no two operating points share a voltage value
/// or a current value.
bool entrywise_distinct(const MeasurementSet& ms);

}  // namespace gridident
