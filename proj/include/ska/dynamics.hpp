#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ska/dataset.hpp"
#include "ska/matrix.hpp"

namespace ska {

/// Network architecture plus the integration schedule.
///
/// `layer_sizes[0]` is the input dimension; each following entry is one
/// layer's unit count, so a typical MNIST stack is
/// {784, 256, 128, 64, 10}. `dt` is the time step (the learning rate read as
/// Δt) and `steps` the number of Euler steps K; their product is the total
/// integration time T.
struct NetworkConfig {
  std::vector<std::size_t> layer_sizes;
  double init_std_scale = 1.0;
  std::uint64_t seed = 42;
  double dt = 0.01;
  std::size_t steps = 50;

  double total_time() const noexcept { return dt * static_cast<double>(steps); }
  std::size_t layer_count() const noexcept {
    return layer_sizes.empty() ? 0 : layer_sizes.size() - 1;
  }
  // Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

// Logistic function in the two-branch form, so σ(z) stays strictly inside
// (0, 1) for |z| < 36.
double sigmoid(double z) noexcept;
Matrix sigmoid(const Matrix& z);

// Closed-form entropy gradient with respect to knowledge:
// G = −(1/ln 2)·Z ⊙ D ⊙ (1 − D).
Matrix entropy_gradient(const Matrix& z, const Matrix& d);
double entropy_gradient(double z) noexcept;

/// Per-layer state. `z`/`d` hold the latest forward pass; `prev_z`/`prev_d`
/// the one before it (absent until the second forward pass).
struct LayerState {
  Matrix weights;  // fan_out × fan_in
  std::optional<Matrix> z, d, prev_z, prev_d;
};

/// Everything one layer contributes to the metrics for one forward pass.
struct LayerRecord {
  Matrix z, d, gradient;
  std::optional<Matrix> dz, dd;  // absent on the first forward pass
};

struct StepRecord {
  std::size_t step = 0;  // index of the forward pass (0 = initial state)
  double time = 0.0;     // step·dt
  std::vector<LayerRecord> layers;

  bool has_deltas() const noexcept { return !layers.empty() && layers.front().dz.has_value(); }
};

/// (layer, unit, sample) triple naming one scalar knowledge value z.
struct UnitSelection {
  std::size_t layer = 0;
  std::size_t unit = 0;
  std::size_t sample = 0;

  friend bool operator==(const UnitSelection&, const UnitSelection&) = default;
};

/// Opt-in per-unit knowledge recording, one value per forward pass.
struct UnitRecording {
  double dt = 0.0;
  std::vector<UnitSelection> selections;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[selection][pass]
};

/// Forward-only SKA network. Single-owner mutable state; steps are strictly
/// sequential.
class Network {
 public:
  // Gaussian init with std init_std_scale/√fan_in, no biases.
  explicit Network(NetworkConfig config);

  const NetworkConfig& config() const noexcept { return config_; }
  const std::vector<LayerState>& layers() const noexcept { return layers_; }
  std::size_t step_index() const noexcept { return step_index_; }
  std::size_t forward_count() const noexcept { return forward_count_; }

  // Replaces one layer's weights (shape must match).
  void set_weights(std::size_t layer, Matrix weights);

  // Forward pass: Z¹ = X·W¹ᵀ, Dˡ = σ(Zˡ), Zˡ = Dˡ⁻¹·Wˡᵀ. Rotates the previous
  // snapshots before overwriting. Returns the per-layer record.
  StepRecord forward(const Matrix& x);

  // One explicit-Euler step: forward, gradients for every layer from that
  // pass, then W ← W − dt·outer_mean(G, input) for all layers at once.
  StepRecord step(const Matrix& x, double dt);
  StepRecord step(const Matrix& x) { return step(x, config_.dt); }

 private:
  NetworkConfig config_;
  std::vector<LayerState> layers_;
  std::vector<Matrix> inputs_;  // per-layer input of the latest forward pass
  std::size_t step_index_ = 0;
  std::size_t forward_count_ = 0;
};

}  // namespace ska
