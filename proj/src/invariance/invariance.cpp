#include "ska/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ska/run.hpp"

namespace ska::invariance {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string setup_key(const TrajectoryTrace& t) {
  std::ostringstream os;
  os << "layers=";
  for (std::size_t s : t.config().layer_sizes) os << s << ',';
  os << " init=" << t.config().init_std_scale << " data=" << t.dataset();
  return os.str();
}

// Sup-norm distance over grid points where both series are defined, and
// the value range of `ref` over its defined points.
struct Deviation {
  double sup = 0.0;
  double range = 0.0;
  bool any = false;
};

Deviation deviation(const std::vector<double>& v, const std::vector<double>& ref) {
  Deviation d;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (std::isnan(ref[i])) continue;
    lo = std::min(lo, ref[i]);
    hi = std::max(hi, ref[i]);
    if (std::isnan(v[i])) continue;
    d.any = true;
    d.sup = std::max(d.sup, std::abs(v[i] - ref[i]));
  }
  d.range = hi >= lo ? hi - lo : 0.0;
  return d;
}

PairRow make_row(const AlignedSeries& s, std::size_t i, std::size_t ref, const AlignedTable& t,
                 double tolerance) {
  const Deviation d = deviation(s.values[i], s.values[ref]);
  PairRow row{s.metric, s.layer, t.etas[i], t.etas[ref], d.sup, d.range, std::nullopt, tolerance,
              Status::incomparable};
  if (d.any && d.range > 0.0) {
    row.relative_deviation = d.sup / d.range;
    row.status = *row.relative_deviation <= tolerance ? Status::pass : Status::fail;
  }
  return row;
}

bool is_halving(double coarse, double fine) {
  return std::abs(coarse - 2.0 * fine) <= 0.01 * coarse;
}

}  // namespace

std::optional<Metric> parse_metric(const std::string& name) noexcept {
  if (name == "entropy_step" || name == "entropy_step_normalized") return Metric::entropy_step;
  if (name == "cosine") return Metric::cosine;
  if (name == "z_norm") return Metric::z_norm;
  if (name == "net_cum") return Metric::net_cum;
  return std::nullopt;
}

std::string metric_name(Metric m, bool normalized) {
  if (m == Metric::entropy_step && normalized) return "entropy_step_normalized";
  return to_string(column_of(m));
}

Column column_of(Metric m) noexcept {
  switch (m) {
    case Metric::entropy_step: return Column::entropy_step;
    case Metric::cosine: return Column::cosine;
    case Metric::z_norm: return Column::z_norm;
    case Metric::net_cum: return Column::net_cum;
  }
  return Column::entropy_step;
}

std::vector<std::size_t> InvarianceSpec::step_counts() const {
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("invariance: total_time must be positive");
  if (eta_list.empty()) throw std::invalid_argument("invariance: eta_list is empty");
  std::vector<std::size_t> out;
  for (double eta : eta_list) {
    if (!(eta > 0.0) || !std::isfinite(eta))
      throw std::invalid_argument("invariance: every eta must be positive");
    const double k = std::round(total_time / eta);
    if (k < 2.0)
      throw std::invalid_argument("invariance: eta " + std::to_string(eta) + " gives K = " +
                                  std::to_string(static_cast<long long>(k)) + " < 2 steps");
    out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

void InvarianceSpec::validate() const {
  step_counts();
  if (!seeds.empty() && seeds.size() != eta_list.size())
    throw std::invalid_argument("invariance: seeds must match eta_list in length");
  if (!(tolerance > 0.0) || !(coarse_tolerance > 0.0))
    throw std::invalid_argument("invariance: tolerances must be positive");
  if (metrics.empty()) throw std::invalid_argument("invariance: no metrics selected");
  NetworkConfig probe = base;
  probe.dt = eta_list.front();
  probe.steps = 2;
  probe.validate();
}

std::vector<FamilyMember> run_family(const InvarianceSpec& spec, const data::Dataset& ds) {
  spec.validate();
  const auto ks = spec.step_counts();
  std::vector<FamilyMember> out;
  for (std::size_t i = 0; i < spec.eta_list.size(); ++i) {
    NetworkConfig cfg = spec.base;
    cfg.dt = spec.eta_list[i];
    cfg.steps = ks[i];
    if (!spec.seeds.empty()) cfg.seed = spec.seeds[i];
    Network net(cfg);
    RunResult r = run(net, ds, RunOptions{});
    out.push_back(FamilyMember{cfg.dt, cfg.steps, static_cast<double>(cfg.steps) * cfg.dt,
                               std::move(r.trace)});
  }
  return out;
}

TrajectoryTrace normalize_trace(const TrajectoryTrace& trace) {
  if (trace.empty()) throw std::invalid_argument("normalize_trace: empty trace");
  const double eta = trace.config().dt;
  std::vector<StepMetrics> rows = trace.rows();
  for (auto& row : rows)
    for (auto& m : row.layers) {
      m.entropy_step /= eta;
      m.net_step /= eta;
    }
  return TrajectoryTrace(trace.config(), trace.dataset(), std::move(rows));
}

double interpolate(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
  if (ts.empty() || ts.size() != vs.size())
    throw std::invalid_argument("interpolate: mismatched or empty series");
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  if (w == 0.0) return vs[lo];
  return vs[lo] + w * (vs[hi] - vs[lo]);
}

AlignedTable resample_common_grid(const std::vector<TrajectoryTrace>& traces,
                                  const std::vector<Column>& columns) {
  if (traces.size() < 2) throw std::invalid_argument("resample_common_grid: need at least 2 traces");
  std::size_t coarsest = 0, finest = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].empty()) throw std::invalid_argument("resample_common_grid: empty trace");
    if (traces[i].config().dt > traces[coarsest].config().dt) coarsest = i;
    if (traces[i].config().dt < traces[finest].config().dt) finest = i;
    if (traces[i].layer_count() != traces[0].layer_count())
      throw std::invalid_argument("resample_common_grid: traces differ in layer count");
  }
  AlignedTable table;
  table.grid = traces[coarsest].times();
  table.reference = finest;
  const double g0 = table.grid.front(), g1 = table.grid.back();
  std::vector<std::vector<double>> times;
  for (const auto& t : traces) {
    times.push_back(t.times());
    if (times.back().back() < g0 || times.back().front() > g1)
      throw std::invalid_argument("resample_common_grid: time ranges do not overlap");
    table.etas.push_back(t.config().dt);
    table.seeds.push_back(t.config().seed);
    table.setups.push_back(setup_key(t));
  }
  for (Column c : columns) {
    for (std::size_t l = 0; l < traces[0].layer_count(); ++l) {
      AlignedSeries s{to_string(c), l, {}};
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto vs = traces[i].column(l, c);
        std::vector<double> out;
        out.reserve(table.grid.size());
        for (double t : table.grid) out.push_back(interpolate(times[i], vs, t));
        s.values.push_back(std::move(out));
      }
      table.series.push_back(std::move(s));
    }
  }
  return table;
}

AlignedTable resample_common_grid(const std::vector<TrajectoryTrace>& traces,
                                  const std::vector<Metric>& metrics, bool normalized) {
  std::vector<Column> cols;
  for (Metric m : metrics) cols.push_back(column_of(m));
  AlignedTable table = resample_common_grid(traces, cols);
  std::size_t i = 0;
  for (Metric m : metrics)
    for (std::size_t l = 0; l < traces[0].layer_count(); ++l) table.series[i++].metric = metric_name(m, normalized);
  return table;
}

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::incomparable: return "incomparable";
  }
  return "unknown";
}

bool InvarianceReport::passed() const noexcept {
  if (incomparable_setup) return false;
  for (const auto& r : rows)
    if (r.status == Status::fail) return false;
  for (const auto& r : pairwise_rows)
    if (r.status == Status::fail) return false;
  return true;
}

InvarianceReport compare(const AlignedTable& table, const TolerancePolicy& policy, bool pairwise) {
  const std::size_t n = table.etas.size();
  if (n < 2 || table.reference >= n)
    throw std::invalid_argument("compare: aligned table needs at least 2 traces");
  InvarianceReport report;
  report.reference_eta = table.etas[table.reference];
  report.total_time = table.grid.empty() ? 0.0 : table.grid.back();
  for (std::size_t i = 1; i < table.seeds.size(); ++i) {
    if (table.seeds[i] != table.seeds[0]) {
      report.incomparable_setup = true;
      report.incomparable_reason = "runs use different seeds (" + std::to_string(table.seeds[0]) +
                                   " vs " + std::to_string(table.seeds[i]) + ")";
      return report;
    }
  }
  for (std::size_t i = 1; i < table.setups.size(); ++i) {
    if (table.setups[i] != table.setups[0]) {
      report.incomparable_setup = true;
      report.incomparable_reason = "runs differ in setup: " + table.setups[0] + " vs " + table.setups[i];
      return report;
    }
  }

  // The finest config other than the reference gets the tight tolerance.
  std::optional<std::size_t> finest_other;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == table.reference) continue;
    if (!finest_other || table.etas[i] < table.etas[*finest_other]) finest_other = i;
  }
  auto tolerance_for = [&](std::size_t i) {
    return i == finest_other ? policy.fine : policy.coarse;
  };

  for (const auto& s : table.series) {
    if (s.values.size() != n) throw std::invalid_argument("compare: ragged aligned table");
    std::vector<std::optional<double>> sup(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == table.reference) continue;
      PairRow row = make_row(s, i, table.reference, table, tolerance_for(i));
      if (row.status != Status::incomparable) sup[i] = row.sup_deviation;
      report.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == table.reference || j == table.reference) continue;
        if (!is_halving(table.etas[i], table.etas[j])) continue;
        ConvergenceRow c{s.metric, s.layer, table.etas[i], table.etas[j], std::nullopt};
        if (sup[i] && sup[j] && *sup[j] > 0.0) c.ratio = *sup[i] / *sup[j];
        report.convergence.push_back(c);
      }
    }
    if (pairwise) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const std::size_t fine = table.etas[j] < table.etas[i] ? j : i;
          const std::size_t other = fine == i ? j : i;
          report.pairwise_rows.push_back(make_row(s, other, fine, table, tolerance_for(other)));
        }
    }
  }
  return report;
}

InvarianceReport compare(const AlignedTable& table, double tolerance) {
  return compare(table, TolerancePolicy::uniform(tolerance));
}

ScalingRatio entropy_scaling_ratio(const TrajectoryTrace& coarse, const TrajectoryTrace& fine,
                                   double t_lo, double t_hi) {
  if (coarse.layer_count() != fine.layer_count())
    throw std::invalid_argument("entropy_scaling_ratio: traces differ in layer count");
  const auto tc = coarse.times(), tf = fine.times();
  ScalingRatio out;
  for (std::size_t l = 0; l < coarse.layer_count(); ++l) {
    const auto hc = coarse.column(l, Column::entropy_step);
    const auto hf = fine.column(l, Column::entropy_step);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < tc.size(); ++k) {
      if (tc[k] < t_lo || tc[k] > t_hi) continue;
      num += std::abs(hc[k]);
      den += std::abs(interpolate(tf, hf, tc[k]));
    }
    if (den == 0.0) throw std::invalid_argument("entropy_scaling_ratio: empty or zero window");
    out.per_layer.push_back(num / den);
  }
  double sum = 0.0;
  for (double r : out.per_layer) sum += r;
  out.mean = sum / static_cast<double>(out.per_layer.size());
  return out;
}

FamilyResult evaluate(const InvarianceSpec& spec, const data::Dataset& ds) {
  FamilyResult result;
  result.members = run_family(spec, ds);
  std::vector<TrajectoryTrace> traces;
  for (const auto& m : result.members)
    traces.push_back(spec.normalize ? normalize_trace(m.trace) : m.trace);
  if (traces.size() == 1) {
    result.report.total_time = spec.total_time;
    result.report.reference_eta = result.members.front().eta;
    return result;
  }
  result.table = resample_common_grid(traces, spec.metrics, spec.normalize);
  result.report = compare(result.table, TolerancePolicy{spec.tolerance, spec.coarse_tolerance},
                          spec.pairwise);
  result.report.total_time = spec.total_time;
  return result;
}

}  // namespace ska::invariance
