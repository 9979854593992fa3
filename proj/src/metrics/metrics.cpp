#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ska/metrics.hpp"

namespace ska {

namespace {
constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
}

double entropy_step(const Matrix& z, const Matrix& dd) {
  require_same_shape("entropy_step", z, dd);
  return -kInvLn2 * dot_flat(z, dd) / static_cast<double>(z.rows());
}

double net_step(const Matrix& d, const Matrix& g, const Matrix& dz) {
  require_same_shape("net_step", d, g);
  require_same_shape("net_step", d, dz);
  auto ds = d.flat(), gs = g.flat(), zs = dz.flat();
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) sum += (ds[i] - gs[i]) * zs[i];
  return sum / static_cast<double>(d.rows());
}

std::optional<double> cosine_alignment(const Matrix& z, const Matrix& dd) {
  try {
    return cosine_flat(z, dd);
  } catch (const UndefinedCosine&) {
    return std::nullopt;
  }
}

Flow knowledge_flow(const Matrix& z_k, const Matrix& z_prev, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("knowledge_flow: dt must be positive");
  Matrix flow = scale(sub(z_k, z_prev), 1.0 / dt);
  const double norm = frobenius_norm(flow);
  return Flow{std::move(flow), norm};
}

std::vector<double> find_zero_crossings(const std::vector<double>& values) {
  std::vector<double> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == 0.0) {
      out.push_back(static_cast<double>(k));
      continue;
    }
    if (k == 0 || values[k - 1] == 0.0) continue;
    const double a = values[k - 1], b = values[k];
    if ((a < 0.0) != (b < 0.0))
      out.push_back(static_cast<double>(k - 1) + std::abs(a) / (std::abs(a) + std::abs(b)));
  }
  return out;
}

std::size_t find_entropy_minimum(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("find_entropy_minimum: empty sequence");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[best]) best = k;
  return best;
}

std::size_t find_flow_peak(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("find_flow_peak: empty sequence");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

const char* to_string(Column c) noexcept {
  switch (c) {
    case Column::entropy_step: return "entropy_step";
    case Column::entropy_cum: return "entropy_cum";
    case Column::cosine: return "cosine";
    case Column::z_norm: return "z_norm";
    case Column::flow_norm: return "flow_norm";
    case Column::net_step: return "net_step";
    case Column::net_cum: return "net_cum";
  }
  return "unknown";
}

std::optional<Column> parse_column(const std::string& name) noexcept {
  for (Column c : {Column::entropy_step, Column::entropy_cum, Column::cosine, Column::z_norm,
                   Column::flow_norm, Column::net_step, Column::net_cum})
    if (name == to_string(c)) return c;
  return std::nullopt;
}

TrajectoryTrace::TrajectoryTrace(NetworkConfig config, std::string dataset)
    : config_(std::move(config)), dataset_(std::move(dataset)) {}

TrajectoryTrace::TrajectoryTrace(NetworkConfig config, std::string dataset,
                                 std::vector<StepMetrics> rows)
    : config_(std::move(config)), dataset_(std::move(dataset)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].layers.size() != layer_count())
      throw std::invalid_argument("trace row " + std::to_string(i) + " has the wrong layer count");
    if (i > 0 && rows_[i].step <= rows_[i - 1].step)
      throw std::invalid_argument("trace rows must have increasing steps");
  }
}

void TrajectoryTrace::accumulate(const StepRecord& record, double dt) {
  if (!record.has_deltas()) return;
  if (record.layers.size() != layer_count())
    throw std::invalid_argument("accumulate: record has " + std::to_string(record.layers.size()) +
                                " layers, trace expects " + std::to_string(layer_count()));
  if (!rows_.empty() && record.step <= rows_.back().step)
    throw std::invalid_argument("accumulate: step " + std::to_string(record.step) +
                                " does not follow " + std::to_string(rows_.back().step));
  StepMetrics row{record.step, record.time, {}};
  for (std::size_t l = 0; l < record.layers.size(); ++l) {
    const LayerRecord& lr = record.layers[l];
    if (!lr.dz || !lr.dd) throw std::invalid_argument("accumulate: layer record lacks deltas");
    LayerMetrics m;
    m.entropy_step = entropy_step(lr.z, *lr.dd);
    m.cosine = cosine_alignment(lr.z, *lr.dd);
    m.z_norm = frobenius_norm(lr.z);
    m.flow_norm = frobenius_norm(scale(*lr.dz, 1.0 / dt));
    m.net_step = net_step(lr.d, lr.gradient, *lr.dz);
    const LayerMetrics* prev = rows_.empty() ? nullptr : &rows_.back().layers[l];
    m.entropy_cum = (prev ? prev->entropy_cum : 0.0) + m.entropy_step;
    m.net_cum = (prev ? prev->net_cum : 0.0) + m.net_step;
    row.layers.push_back(m);
  }
  rows_.push_back(std::move(row));
}

void TrajectoryTrace::require_layer(std::size_t layer) const {
  if (layer >= layer_count())
    throw std::out_of_range("trace layer " + std::to_string(layer) + " of " +
                            std::to_string(layer_count()));
}

std::vector<double> TrajectoryTrace::column(std::size_t layer, Column c) const {
  require_layer(layer);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    const LayerMetrics& m = row.layers[layer];
    switch (c) {
      case Column::entropy_step: out.push_back(m.entropy_step); break;
      case Column::entropy_cum: out.push_back(m.entropy_cum); break;
      case Column::cosine:
        out.push_back(m.cosine.value_or(std::numeric_limits<double>::quiet_NaN()));
        break;
      case Column::z_norm: out.push_back(m.z_norm); break;
      case Column::flow_norm: out.push_back(m.flow_norm); break;
      case Column::net_step: out.push_back(m.net_step); break;
      case Column::net_cum: out.push_back(m.net_cum); break;
    }
  }
  return out;
}

std::vector<double> TrajectoryTrace::times() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.time);
  return out;
}

std::vector<double> TrajectoryTrace::zero_crossings(std::size_t layer) const {
  if (rows_.size() < 2) throw std::invalid_argument("zero_crossings: trace needs at least 2 rows");
  auto out = find_zero_crossings(column(layer, Column::net_cum));
  for (double& k : out) k += static_cast<double>(rows_.front().step);
  return out;
}

std::size_t TrajectoryTrace::entropy_minimum(std::size_t layer) const {
  if (rows_.empty()) throw std::invalid_argument("entropy_minimum: empty trace");
  return rows_[find_entropy_minimum(column(layer, Column::entropy_step))].step;
}

std::size_t TrajectoryTrace::flow_peak(std::size_t layer) const {
  if (rows_.empty()) throw std::invalid_argument("flow_peak: empty trace");
  return rows_[find_flow_peak(column(layer, Column::flow_norm))].step;
}

LayerMarkers TrajectoryTrace::markers(std::size_t layer) const {
  return LayerMarkers{entropy_minimum(layer),
                      rows_.size() >= 2 ? zero_crossings(layer) : std::vector<double>{},
                      flow_peak(layer)};
}

}  // namespace ska
