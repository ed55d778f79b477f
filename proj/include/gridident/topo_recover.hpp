#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridident/exact_estimate.hpp"
#include "gridident/netmodel.hpp"
#include "gridident/stls.hpp"
#include "gridident/synth.hpp"

namespace gridident {

inline constexpr double kDefaultAlpha = 1e-5;
inline constexpr double kDefaultRelativeFactor = 0.01;
/// Largest hypothesis the automatic method choice hands to the structured solver.
inline constexpr int kStlsUnknownLimit = 600;

/// Entries with |y_l| < alpha become exactly zero.
CVector threshold(const CVector& y, double alpha);

struct ThresholdPolicy {
    enum class Mode { absolute, relative_median, relative_max };
    Mode mode = Mode::absolute;
    double value = kDefaultAlpha;  // alpha itself, or the factor c for relative modes

    static ThresholdPolicy absolute(double alpha = kDefaultAlpha) { return {Mode::absolute, alpha}; }
    static ThresholdPolicy relative_median(double c = kDefaultRelativeFactor) { return {Mode::relative_median, c}; }
    static ThresholdPolicy relative_max(double c = kDefaultRelativeFactor) { return {Mode::relative_max, c}; }

    /// alpha for the given raw estimate.
    double resolve(const CVector& y) const;
};

enum class Method { automatic, exact, stls, plugin };

std::string method_name(Method m);
Method method_from_string(const std::string& s);

/// exact for noiseless data (or sigma = 0), stls up to kStlsUnknownLimit
/// unknowns, plugin beyond.
Method choose_method(Method requested, const MeasurementSet& ms, int unknowns);

struct Algorithm1Config {
    ThresholdPolicy threshold;
    Method method = Method::automatic;
    SolverConfig solver;
};

struct TopologyEstimate {
    CVector y_raw;   // before thresholding, hypothesis edge order
    CVector y_hat;   // after thresholding
    std::vector<Edge> edges_hat;
    NetworkGraph graph_hat;
    NetworkGraph hypothesis;
    double alpha = 0.0;
    int tau = 0;
    PriorKind prior = PriorKind::none;
    Method method = Method::exact;
    bool converged = true;  // false only when the structured solver stopped early
    int iterations = 0;
};

/// Estimate, threshold and read off the edge set without the measurement-count
/// check. Rank-deficient linear paths fall back to the minimum-norm solution, so
/// this also serves sweeps that deliberately go below the threshold.
TopologyEstimate estimate_topology(const PriorTopology& prior, const MeasurementSet& ms,
                                   const Algorithm1Config& cfg = {});

/// Estimate, threshold and read off the edge set. Throws
/// InsufficientMeasurementsError when ms has fewer points than the prior needs.
TopologyEstimate run_algorithm1(const PriorTopology& prior, const MeasurementSet& ms,
                                const Algorithm1Config& cfg = {});

/// Produces measurements over the augmented phase expansion.
using MeasurementBuilder = std::function<MeasurementSet(const PhaseExpansion& augmented, int tau)>;

/// Synthetic builder: the true spec is embedded into the augmented node set
/// (phases that do not exist are isolated nodes with zero injection), then
/// synthesized and, when sigma > 0, corrupted with noise.
MeasurementBuilder synthetic_phase_measurements(const BusSpec& truth, double sigma, std::uint64_t seed);

struct PhaseIdentification {
    std::vector<Phase> connected;
    std::vector<Phase> disconnected;
    PhaseExpansion augmented;
    TopologyEstimate estimate;
};

/// Assumes all three phases at `candidate_bus` are present, estimates over the
/// complete hypothesis of the augmented phase nodes with tau = n - 1, and calls
/// a phase disconnected when every estimated admittance touching it is zero
/// after thresholding.
PhaseIdentification identify_phases(const BusSpec& spec, const std::string& candidate_bus,
                                    const MeasurementBuilder& build, const Algorithm1Config& cfg = {});

struct TopologyScore {
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double total_abs_error = 0.0;
    double total_abs_error_conductance = 0.0;
    double total_abs_error_susceptance = 0.0;
};

/// Edge-set comparison plus sum |y_hat - y_true| over hypothesis and truth edges
/// (absent edges count as zero). Throws AlignmentError on differing node counts.
TopologyScore score_topology(const TopologyEstimate& est, const AdmittanceNetwork& truth);

}  // namespace gridident
