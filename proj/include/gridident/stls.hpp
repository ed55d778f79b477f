#pragma once

// Structured total least squares for noisy phasor data.
//
// Per operating point k the unknown noise vector is
//     s_k = [dV_re; dV_im; dI_re; dI_im]            (4n reals)
// and the realified Kirchhoff constraint is
//     g_k = (A_k + dA_k(dV)) [y_re; y_im] - (b_k + [dI_re; dI_im]) = 0
// with A_k = [[H D(H^T V_re), -H D(H^T V_im)], [H D(H^T V_im), H D(H^T V_re)]]
// and dA_k the same structure built from dV. The solver minimises
// 1/2 sum_k s_k^T W s_k subject to g_k = 0 by Newton's method on the KKT
// residual of the Lagrangian.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridident/exact_estimate.hpp"
#include "gridident/synth.hpp"
#include "gridident/types.hpp"

namespace gridident {

struct RealifiedBlock {
    RMatrix A;  // 2n x 2e
    RVector b;  // [I_re; I_im]
    RMatrix H;  // incidence matrix the structure was built from
};

RealifiedBlock realify(const RMatrix& H, const OperatingPoint& point);

/// Realified 2n x 2e matrix of H D(H^T x) for complex x.
RMatrix realified_coefficient(const RMatrix& H, const CVector& x);

/// g_k for the given noise vector (4n) and admittance parts.
RVector constraint_residual(const RealifiedBlock& block, const RVector& s, const RVector& y_re, const RVector& y_im);

struct SolverConfig {
    RMatrix W;             // 4n x 4n, empty means identity
    double tol = 1e-5;     // infinity norm of the full KKT residual
    int max_iter = 50;
    double damping = 0.0;  // initial diagonal shift of the reduced Newton system
    bool record_trace = false;
};

struct StlsTraceRow {
    int iter = 0;
    double kkt_residual = 0.0;
    double constraint_norm = 0.0;
    double step_norm = 0.0;
};

struct StlsSolution {
    CVector y;
    std::vector<RVector> s;  // one 4n vector per operating point
    int iterations = 0;
    double kkt_residual = 0.0;
    double initial_kkt_residual = 0.0;
    bool converged = false;
    std::vector<StlsTraceRow> trace;
};

/// Full KKT residual [W s_k + G^T l_k ; sum_k B_k^T l_k ; g_k] at a point, in the
/// solver's variable order (all s, then y, then all multipliers). Exposed for tests.
RVector stls_kkt_residual(const MeasurementSet& ms, const NetworkGraph& hypothesis, const RMatrix& W,
                          std::span<const RVector> s, const RVector& y, std::span<const RVector> multipliers);

/// Solves the structured problem for the prior's hypothesis graph. Starts from
/// the ordinary least-squares estimate (minimum-norm when rank deficient), s = 0,
/// multipliers = 0. Returns the iterate with the smallest KKT residual seen;
/// converged is false when that residual stays above tol. Throws
/// SolverFailureError when the Newton system stays singular after damping.
StlsSolution solve_stls(const MeasurementSet& ms, const PriorTopology& prior, const SolverConfig& cfg = {});

/// Averages replicate sets, stacks the coefficient matrix and solves ordinary
/// least squares. Throws NonUniquenessError on a rank-deficient system.
CVector plug_in_ols(std::span<const MeasurementSet> sets, const PriorTopology& prior);

std::string stls_trace_to_csv(const std::vector<StlsTraceRow>& trace);

}  // namespace gridident
