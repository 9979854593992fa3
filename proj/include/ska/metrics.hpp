#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ska/dynamics.hpp"
#include "ska/matrix.hpp"

namespace ska {

// Per-pass diagnostics. Every sum is a batch mean over the n samples.
double entropy_step(const Matrix& z, const Matrix& dd);
double net_step(const Matrix& d, const Matrix& g, const Matrix& dz);
// nullopt when either operand has zero norm.
std::optional<double> cosine_alignment(const Matrix& z, const Matrix& dd);

struct Flow {
  Matrix flow;
  double norm = 0.0;
};
Flow knowledge_flow(const Matrix& z_k, const Matrix& z_prev, double dt);

struct LayerMetrics {
  double entropy_step = 0.0;  // bits
  double entropy_cum = 0.0;
  std::optional<double> cosine;
  double z_norm = 0.0;
  double flow_norm = 0.0;  // per unit time
  double net_step = 0.0;
  double net_cum = 0.0;
};

struct StepMetrics {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<LayerMetrics> layers;
};

// Sequence-level marker finders. Indices are 0-based positions in `values`.
std::vector<double> find_zero_crossings(const std::vector<double>& values);
std::size_t find_entropy_minimum(const std::vector<double>& values);
std::size_t find_flow_peak(const std::vector<double>& values);

enum class Column { entropy_step, entropy_cum, cosine, z_norm, flow_norm, net_step, net_cum };
const char* to_string(Column c) noexcept;
std::optional<Column> parse_column(const std::string& name) noexcept;

struct LayerMarkers {
  std::size_t entropy_minimum_step = 0;
  std::vector<double> net_zero_crossings;  // fractional steps
  std::size_t flow_peak_step = 0;
};

class TrajectoryTrace {
 public:
  TrajectoryTrace() = default;
  TrajectoryTrace(NetworkConfig config, std::string dataset);
  // Rebuilds a trace from existing rows (step numbers must increase).
  TrajectoryTrace(NetworkConfig config, std::string dataset, std::vector<StepMetrics> rows);

  const NetworkConfig& config() const noexcept { return config_; }
  const std::string& dataset() const noexcept { return dataset_; }
  const std::vector<StepMetrics>& rows() const noexcept { return rows_; }
  std::size_t layer_count() const noexcept { return config_.layer_count(); }
  bool empty() const noexcept { return rows_.empty(); }

  // Appends one row from a forward-pass record. Records without deltas (the
  // first forward pass) are ignored. Rows must arrive in increasing step.
  void accumulate(const StepRecord& record, double dt);

  // One value per row; cosine gaps become NaN.
  std::vector<double> column(std::size_t layer, Column c) const;
  std::vector<double> times() const;

  // Marker steps are in the trace's own step numbering (row 0 is step
  // rows()[0].step). Require at least one row; crossings need two.
  std::vector<double> zero_crossings(std::size_t layer) const;
  std::size_t entropy_minimum(std::size_t layer) const;
  std::size_t flow_peak(std::size_t layer) const;
  LayerMarkers markers(std::size_t layer) const;

 private:
  void require_layer(std::size_t layer) const;

  NetworkConfig config_;
  std::string dataset_;
  std::vector<StepMetrics> rows_;
};

}  // namespace ska
