#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ska/dataset.hpp"
#include "ska/dynamics.hpp"
#include "ska/metrics.hpp"

namespace ska::invariance {

enum class Metric { entropy_step, cosine, z_norm, net_cum };
std::optional<Metric> parse_metric(const std::string& name) noexcept;
// "entropy_step_normalized" when normalized is set and the metric is
// entropy_step; otherwise the plain column name.
std::string metric_name(Metric m, bool normalized);
Column column_of(Metric m) noexcept;

struct InvarianceSpec {
  double total_time = 0.5;
  std::vector<double> eta_list{0.02, 0.01, 0.005, 0.001};
  NetworkConfig base;  // dt and steps are overwritten per family member
  // Per-member seed overrides, parallel to eta_list. Empty means every run
  // uses base.seed.
  std::vector<std::uint64_t> seeds;
  double tolerance = 0.02;
  double coarse_tolerance = 0.10;
  std::vector<Metric> metrics{Metric::entropy_step, Metric::cosine};
  bool normalize = true;
  bool pairwise = false;

  // K_i = round(T/η_i); throws when any K_i < 2 or the lists are malformed.
  std::vector<std::size_t> step_counts() const;
  void validate() const;
};

struct FamilyMember {
  double eta = 0.0;
  std::size_t steps = 0;
  double realized_time = 0.0;  // steps·eta
  TrajectoryTrace trace;
};

std::vector<FamilyMember> run_family(const InvarianceSpec& spec, const data::Dataset& ds);

// Divides entropy_step and net_step by the trace's dt. Every other column is
// left as it is.
TrajectoryTrace normalize_trace(const TrajectoryTrace& trace);

// Linear interpolation of (ts, vs) at t, clamped to the end values.
// ts must be strictly increasing.
double interpolate(const std::vector<double>& ts, const std::vector<double>& vs, double t);

struct AlignedSeries {
  std::string metric;
  std::size_t layer = 0;
  std::vector<std::vector<double>> values;  // values[trace][grid point]; NaN marks a gap
};

struct AlignedTable {
  std::vector<double> grid;
  std::vector<double> etas;  // one per trace
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> setups;  // setup fingerprint per trace
  std::size_t reference = 0;  // index of the smallest η
  std::vector<AlignedSeries> series;
};

// Resamples every requested column of every trace onto the time grid of
// the trace with the largest dt. Needs at least two traces whose time
// ranges overlap.
AlignedTable resample_common_grid(const std::vector<TrajectoryTrace>& traces,
                                  const std::vector<Column>& columns);
AlignedTable resample_common_grid(const std::vector<TrajectoryTrace>& traces,
                                  const std::vector<Metric>& metrics, bool normalized);

enum class Status { pass, fail, incomparable };
const char* to_string(Status s) noexcept;

struct TolerancePolicy {
  double fine = 0.02;    // finest non-reference config
  double coarse = 0.10;  // every coarser config

  static TolerancePolicy uniform(double tol) { return {tol, tol}; }
};

struct PairRow {
  std::string metric;
  std::size_t layer = 0;
  double eta = 0.0;
  double reference_eta = 0.0;
  double sup_deviation = 0.0;
  double reference_range = 0.0;
  std::optional<double> relative_deviation;  // absent when incomparable
  double tolerance = 0.0;
  Status status = Status::pass;
};

struct ConvergenceRow {
  std::string metric;
  std::size_t layer = 0;
  double eta_coarse = 0.0;  // 2η
  double eta_fine = 0.0;    // η
  std::optional<double> ratio;  // D(2η)/D(η)
};

struct InvarianceReport {
  double total_time = 0.0;
  double reference_eta = 0.0;
  bool incomparable_setup = false;
  std::string incomparable_reason;
  std::vector<PairRow> rows;           // each config against the reference
  std::vector<PairRow> pairwise_rows;  // every pair, filled when requested
  std::vector<ConvergenceRow> convergence;

  bool passed() const noexcept;  // no failing row and a comparable setup
};

InvarianceReport compare(const AlignedTable& table, const TolerancePolicy& policy,
                         bool pairwise = false);
InvarianceReport compare(const AlignedTable& table, double tolerance);

inline constexpr double kConvergenceLow = 1.6;
inline constexpr double kConvergenceHigh = 2.4;

// Per-layer Σ|H_coarse(t)| / Σ|H_fine(t)| over the coarse trace's own times
// inside [t_lo, t_hi], with the fine trace interpolated onto them.
struct ScalingRatio {
  std::vector<double> per_layer;
  double mean = 0.0;
};
ScalingRatio entropy_scaling_ratio(const TrajectoryTrace& coarse, const TrajectoryTrace& fine,
                                   double t_lo, double t_hi);

// Everything cmd_invariance produces, in one call.
struct FamilyResult {
  std::vector<FamilyMember> members;
  AlignedTable table;
  InvarianceReport report;
};
FamilyResult evaluate(const InvarianceSpec& spec, const data::Dataset& ds);

}  // namespace ska::invariance
