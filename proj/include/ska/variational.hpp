#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ska/dynamics.hpp"

namespace ska::variational {

// One scalar unit's knowledge sampled at t_k = t0 + k·dt.
struct UnitTrajectory {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> z;

  std::size_t size() const noexcept { return z.size(); }
  std::size_t intervals() const noexcept { return z.empty() ? 0 : z.size() - 1; }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  double end_time() const noexcept { return time(intervals()); }
  // Throws std::invalid_argument on dt ≤ 0 or a non-finite sample.
  void validate() const;
};

// Samples f on [t0, t0 + n·dt] at n+1 points.
template <class F>
UnitTrajectory sample_path(F&& f, double t0, double dt, std::size_t n) {
  UnitTrajectory out{dt, t0, {}};
  out.z.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out.z.push_back(f(t0 + static_cast<double>(k) * dt));
  return out;
}

double sigmoid_prime(double z) noexcept;
double softplus(double z) noexcept;

// 𝓛(z, ż) = −z·σ'(z)·ż
double lagrangian(double z, double z_dot) noexcept;
// Canonical momentum ∂𝓛/∂ż = −z·σ'(z) and force ∂𝓛/∂z.
double momentum(double z) noexcept;
double force(double z, double z_dot) noexcept;

// Σ_k 𝓛(z_k, ż_k)·dt with backward-difference ż_k; needs ≥ 2 samples.
double action(const UnitTrajectory& traj);
// action / ln 2
double action_entropy(const UnitTrajectory& traj);
// −(1/ln 2)·Σ_k z_k·(σ(z_k) − σ(z_{k−1})), the single-unit entropy_cum.
double definition_entropy(const UnitTrajectory& traj);

// Euler–Lagrange residual at interior samples k = 1..n−1:
// (p(z_{k+1}) − p(z_{k−1}))/(2dt) − ∂𝓛/∂z(z_k, ż_k), ż_k central.
// Needs ≥ 3 samples.
std::vector<double> el_residual(const UnitTrajectory& traj);

double max_abs(const std::vector<double>& v);
// log2(coarse/fine); nullopt unless both are positive.
std::optional<double> convergence_order(double coarse, double fine);

// Single-unit cumulative Tensor Net Σ (σ(z_k) − G(z_k))·Δz_k for k = 1..n.
std::vector<double> unit_net_cum(const UnitTrajectory& traj);
// Times of its sign changes (linear interpolation between samples).
std::vector<double> net_crossing_times(const UnitTrajectory& traj);

// |∫σ(z)ż dt − H| up to `crossing_time`. The left side uses the exact
// antiderivative softplus(z(t*)) − softplus(z(t0)); H is the running action
// entropy. Both are linearly interpolated between samples.
double net_action_identity(const UnitTrajectory& traj, double crossing_time);

// Throws std::invalid_argument when recording was not enabled and
// std::out_of_range when a selection was not recorded.
std::vector<UnitTrajectory> extract_unit_trajectories(const std::optional<UnitRecording>& recording,
                                                       const std::vector<UnitSelection>& selection);

struct CrossingCheck {
  double time = 0.0;
  double residual = 0.0;
  double bound = 0.0;  // 10·dt·max|ż|
};

struct UnitAnalysis {
  UnitSelection selection;
  std::size_t samples = 0;
  double action = 0.0;
  double entropy_via_action = 0.0;
  double entropy_via_definition = 0.0;
  double el_residual_max = 0.0;
  double max_z_dot = 0.0;
  std::vector<CrossingCheck> crossings;
};

UnitAnalysis analyze(const UnitTrajectory& traj, const UnitSelection& selection);

struct HalvingResult {
  UnitSelection selection;
  double el_coarse = 0.0;
  double el_fine = 0.0;
  std::optional<double> el_order;
  // First crossing of each run; absent when either run has none.
  std::optional<double> identity_coarse;
  std::optional<double> identity_fine;
  std::optional<double> identity_ratio;
  std::optional<double> entropy_gap_coarse;  // |action − definition|
  std::optional<double> entropy_gap_fine;
};

HalvingResult compare_halving(const UnitAnalysis& coarse, const UnitAnalysis& fine);

struct VariationalReport {
  double dt = 0.0;
  double total_time = 0.0;
  std::vector<UnitAnalysis> units;
  std::optional<double> fine_dt;
  std::vector<UnitAnalysis> fine_units;
  std::vector<HalvingResult> halving;
};

}  // namespace ska::variational
