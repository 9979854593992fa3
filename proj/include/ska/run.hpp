#pragma once

#include <optional>
#include <vector>

#include "ska/dataset.hpp"
#include "ska/dynamics.hpp"
#include "ska/metrics.hpp"

namespace ska {

struct BatchSpec {
  std::size_t size = 0;  // 0 = whole dataset
  data::BatchMode mode = data::BatchMode::full;
};

struct RunOptions {
  BatchSpec batch;
  std::vector<UnitSelection> record_units;  // empty = no per-unit recording
};

struct RunResult {
  TrajectoryTrace trace;
  std::optional<UnitRecording> units;
};

/// K = config.steps Euler steps followed by one final forward pass, so
/// forward passes happen at t = 0, dt, ..., K·dt and the trace holds rows
/// k = 1..K (row k compares pass k with pass k−1).
RunResult run(Network& net, const data::Dataset& ds, const RunOptions& options = {});

}  // namespace ska
