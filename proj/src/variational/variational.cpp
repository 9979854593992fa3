#include "ska/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ska/metrics.hpp"

namespace ska::variational {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

void require_samples(const UnitTrajectory& traj, std::size_t n, const char* op) {
  traj.validate();
  if (traj.size() < n)
    throw std::invalid_argument(std::string(op) + ": needs at least " + std::to_string(n) +
                                " samples, got " + std::to_string(traj.size()));
}

// Running action entropy at each sample (0 at the first).
std::vector<double> running_entropy(const UnitTrajectory& traj) {
  std::vector<double> h(traj.size(), 0.0);
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double z_dot = (traj.z[k] - traj.z[k - 1]) / traj.dt;
    sum += lagrangian(traj.z[k], z_dot) * traj.dt;
    h[k] = kInvLn2 * sum;
  }
  return h;
}

// Value of samples v (aligned with traj) at time t by linear interpolation.
double at_time(const UnitTrajectory& traj, const std::vector<double>& v, double t) {
  const double pos = (t - traj.t0) / traj.dt;
  const double last = static_cast<double>(traj.intervals());
  if (pos <= 0.0) return v.front();
  if (pos >= last) return v.back();
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(k);
  return f == 0.0 ? v[k] : v[k] + f * (v[k + 1] - v[k]);
}

}  // namespace

void UnitTrajectory::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("UnitTrajectory: dt must be positive");
  for (std::size_t k = 0; k < z.size(); ++k)
    if (!std::isfinite(z[k]))
      throw std::invalid_argument("UnitTrajectory: non-finite sample at " + std::to_string(k));
}

double sigmoid_prime(double z) noexcept {
  const double s = sigmoid(z);
  return s * (1.0 - s);
}

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double lagrangian(double z, double z_dot) noexcept { return -z * sigmoid_prime(z) * z_dot; }

double momentum(double z) noexcept { return -z * sigmoid_prime(z); }

double force(double z, double z_dot) noexcept {
  const double s = sigmoid(z);
  const double sp = s * (1.0 - s);
  return -z_dot * (sp + z * sp * (1.0 - 2.0 * s));
}

double action(const UnitTrajectory& traj) {
  require_samples(traj, 2, "action");
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k)
    sum += lagrangian(traj.z[k], (traj.z[k] - traj.z[k - 1]) / traj.dt) * traj.dt;
  return sum;
}

double action_entropy(const UnitTrajectory& traj) { return kInvLn2 * action(traj); }

double definition_entropy(const UnitTrajectory& traj) {
  require_samples(traj, 2, "definition_entropy");
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k)
    sum += traj.z[k] * (sigmoid(traj.z[k]) - sigmoid(traj.z[k - 1]));
  return -kInvLn2 * sum;
}

std::vector<double> el_residual(const UnitTrajectory& traj) {
  require_samples(traj, 3, "el_residual");
  std::vector<double> out;
  out.reserve(traj.size() - 2);
  const double two_dt = 2.0 * traj.dt;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double dp = (momentum(traj.z[k + 1]) - momentum(traj.z[k - 1])) / two_dt;
    const double z_dot = (traj.z[k + 1] - traj.z[k - 1]) / two_dt;
    out.push_back(dp - force(traj.z[k], z_dot));
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::optional<double> convergence_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

std::vector<double> unit_net_cum(const UnitTrajectory& traj) {
  require_samples(traj, 2, "unit_net_cum");
  std::vector<double> out;
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    sum += (sigmoid(traj.z[k]) - entropy_gradient(traj.z[k])) * (traj.z[k] - traj.z[k - 1]);
    out.push_back(sum);
  }
  return out;
}

std::vector<double> net_crossing_times(const UnitTrajectory& traj) {
  std::vector<double> out;
  // Position p in the cumulative sequence corresponds to sample p + 1.
  for (double p : find_zero_crossings(unit_net_cum(traj))) out.push_back(traj.time(0) + (p + 1.0) * traj.dt);
  return out;
}

double net_action_identity(const UnitTrajectory& traj, double crossing_time) {
  require_samples(traj, 2, "net_action_identity");
  if (!(crossing_time >= traj.t0 && crossing_time <= traj.end_time()))
    throw std::out_of_range("net_action_identity: crossing time " + std::to_string(crossing_time) +
                            " outside [" + std::to_string(traj.t0) + ", " +
                            std::to_string(traj.end_time()) + "]");
  const double z_star = at_time(traj, traj.z, crossing_time);
  const double lhs = softplus(z_star) - softplus(traj.z.front());
  const double h = at_time(traj, running_entropy(traj), crossing_time);
  return std::abs(lhs - h);
}

std::vector<UnitTrajectory> extract_unit_trajectories(const std::optional<UnitRecording>& recording,
                                                       const std::vector<UnitSelection>& selection) {
  if (!recording) throw std::invalid_argument("per-unit recording was not enabled for this run");
  std::vector<UnitTrajectory> out;
  for (const auto& s : selection) {
    const auto it = std::find(recording->selections.begin(), recording->selections.end(), s);
    if (it == recording->selections.end())
      throw std::out_of_range("unit (" + std::to_string(s.layer) + ", " + std::to_string(s.unit) +
                              ", " + std::to_string(s.sample) + ") was not recorded");
    const auto idx = static_cast<std::size_t>(it - recording->selections.begin());
    out.push_back(UnitTrajectory{recording->dt,
                                 recording->times.empty() ? 0.0 : recording->times.front(),
                                 recording->values[idx]});
  }
  return out;
}

UnitAnalysis analyze(const UnitTrajectory& traj, const UnitSelection& selection) {
  require_samples(traj, 3, "analyze");
  UnitAnalysis a;
  a.selection = selection;
  a.samples = traj.size();
  a.action = action(traj);
  a.entropy_via_action = kInvLn2 * a.action;
  a.entropy_via_definition = definition_entropy(traj);
  a.el_residual_max = max_abs(el_residual(traj));
  for (std::size_t k = 1; k < traj.size(); ++k)
    a.max_z_dot = std::max(a.max_z_dot, std::abs(traj.z[k] - traj.z[k - 1]) / traj.dt);
  for (double t : net_crossing_times(traj))
    a.crossings.push_back(CrossingCheck{t, net_action_identity(traj, t), 10.0 * traj.dt * a.max_z_dot});
  return a;
}

HalvingResult compare_halving(const UnitAnalysis& coarse, const UnitAnalysis& fine) {
  HalvingResult r;
  r.selection = coarse.selection;
  r.el_coarse = coarse.el_residual_max;
  r.el_fine = fine.el_residual_max;
  r.el_order = convergence_order(r.el_coarse, r.el_fine);
  r.entropy_gap_coarse = std::abs(coarse.entropy_via_action - coarse.entropy_via_definition);
  r.entropy_gap_fine = std::abs(fine.entropy_via_action - fine.entropy_via_definition);
  if (!coarse.crossings.empty() && !fine.crossings.empty()) {
    r.identity_coarse = coarse.crossings.front().residual;
    r.identity_fine = fine.crossings.front().residual;
    if (*r.identity_fine > 0.0) r.identity_ratio = *r.identity_coarse / *r.identity_fine;
  }
  return r;
}

}  // namespace ska::variational
