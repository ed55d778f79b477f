#pragma once

// Topology report (JSON)
//
//   {"edges": [{"i": 1, "j": 2, "y": [re, im]}, ...],
//    "score": {"precision": p, "recall": r, "f1": f, "total_abs_error": e},   (null without truth)
//    "alpha": a, "tau": t, "prior": "complete", "method": "exact"}
//
// Sweep results (CSV)
//
//   # min_measurements=12
//   tau,seed,total_abs_error_conductance,total_abs_error_susceptance,f1,runtime_s

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridident/topo_recover.hpp"

namespace gridident {

struct ReportEdge {
    Edge edge;
    cplx y;
};

struct TopologyReport {
    std::vector<ReportEdge> edges;
    std::optional<TopologyScore> score;  // precision, recall, f1, total_abs_error only
    double alpha = 0.0;
    int tau = 0;
    std::string prior;
    std::string method;
};

TopologyReport make_report(const TopologyEstimate& est, const std::optional<TopologyScore>& score);
std::string report_to_string(const TopologyReport& report);
TopologyReport parse_report(std::string_view text, const std::string& origin = "<string>");

struct SweepRow {
    int tau = 0;
    std::uint64_t seed = 0;
    double total_abs_error_conductance = 0.0;
    double total_abs_error_susceptance = 0.0;
    double f1 = 0.0;
    double runtime_s = 0.0;
};

struct SweepResult {
    int min_measurements = 0;
    std::vector<SweepRow> rows;
};

/// Rows sorted by (seed, tau); duplicate (tau, seed) pairs are rejected.
void sort_sweep_rows(std::vector<SweepRow>& rows);
std::string sweep_to_csv(const SweepResult& result);
SweepResult parse_sweep_csv(std::string_view text, const std::string& origin = "<string>");

}  // namespace gridident
