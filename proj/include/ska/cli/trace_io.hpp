#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ska/invariance.hpp"
#include "ska/metrics.hpp"

namespace ska::cli {

inline constexpr const char* kTraceHeader =
    "step,time,layer,entropy_step,entropy_cum,cosine,z_norm,flow_norm,net_step,net_cum";
inline constexpr const char* kMarkersHeader = "layer,kind,step,value";

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const TrajectoryTrace& trace);
// Parses a trace CSV back into rows (one per step, layers in order).
// Throws std::runtime_error with the offending line number.
std::vector<StepMetrics> read_trace_csv(std::istream& in);

// Kinds: entropy_minimum, flow_peak, net_zero_crossing.
void write_markers_csv(std::ostream& out, const TrajectoryTrace& trace);

void write_aligned_csv(std::ostream& out, const invariance::AlignedTable& table);
void write_invariance_report_csv(std::ostream& out, const invariance::InvarianceReport& report);

}  // namespace ska::cli
