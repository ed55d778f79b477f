#pragma once

// Measurement CSV: header `k,node,V_re,V_im,I_re,I_im`, one row per
// (operating point, node), both 1-based, values printed with 17 significant
// digits so a write/read cycle reproduces every double exactly. An optional
// leading comment line `# seed=.. noisy=0|1 surrogate=0|1 sigma=..` carries the
// set's metadata.

#include <string>
#include <string_view>

#include "gridident/synth.hpp"

namespace gridident {

inline constexpr std::string_view kMeasurementCsvHeader = "k,node,V_re,V_im,I_re,I_im";

std::string measurements_to_csv(const MeasurementSet& ms);
MeasurementSet parse_measurements_csv(std::string_view text, const std::string& origin = "<string>");

void save_measurements(const std::string& path, const MeasurementSet& ms);
MeasurementSet load_measurements(const std::string& path);

}  // namespace gridident
