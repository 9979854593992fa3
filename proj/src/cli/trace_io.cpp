#include "ska/cli/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ska::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const TrajectoryTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& row : trace.rows()) {
    for (std::size_t l = 0; l < row.layers.size(); ++l) {
      const LayerMetrics& m = row.layers[l];
      out << row.step << ',' << format_number(row.time) << ',' << l << ','
          << format_number(m.entropy_step) << ',' << format_number(m.entropy_cum) << ','
          << (m.cosine ? format_number(*m.cosine) : std::string()) << ','
          << format_number(m.z_norm) << ',' << format_number(m.flow_norm) << ','
          << format_number(m.net_step) << ',' << format_number(m.net_cum) << '\n';
    }
  }
}

namespace {

double parse_double(const std::string& field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw std::runtime_error("trace CSV line " + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

std::size_t parse_index(const std::string& field, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw std::runtime_error("trace CSV line " + std::to_string(line) + ": bad index '" + field + "'");
  return v;
}

}  // namespace

std::vector<StepMetrics> read_trace_csv(std::istream& in) {
  std::string text;
  if (!std::getline(in, text) || text != kTraceHeader)
    throw std::runtime_error("trace CSV line 1: unexpected header");
  std::vector<StepMetrics> rows;
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!text.empty() && text.back() == ',') f.emplace_back();
    if (f.size() != 10)
      throw std::runtime_error("trace CSV line " + std::to_string(line) + ": expected 10 fields, got " +
                               std::to_string(f.size()));
    const std::size_t step = parse_index(f[0], line);
    const std::size_t layer = parse_index(f[2], line);
    if (rows.empty() || rows.back().step != step) {
      if (layer != 0)
        throw std::runtime_error("trace CSV line " + std::to_string(line) + ": step starts at layer " +
                                 std::to_string(layer));
      rows.push_back(StepMetrics{step, parse_double(f[1], line), {}});
    } else if (layer != rows.back().layers.size()) {
      throw std::runtime_error("trace CSV line " + std::to_string(line) + ": layers out of order");
    }
    LayerMetrics m;
    m.entropy_step = parse_double(f[3], line);
    m.entropy_cum = parse_double(f[4], line);
    if (!f[5].empty()) m.cosine = parse_double(f[5], line);
    m.z_norm = parse_double(f[6], line);
    m.flow_norm = parse_double(f[7], line);
    m.net_step = parse_double(f[8], line);
    m.net_cum = parse_double(f[9], line);
    rows.back().layers.push_back(m);
  }
  return rows;
}

void write_markers_csv(std::ostream& out, const TrajectoryTrace& trace) {
  out << kMarkersHeader << '\n';
  if (trace.empty()) return;
  const auto& rows = trace.rows();
  const std::size_t first = rows.front().step;
  for (std::size_t l = 0; l < trace.layer_count(); ++l) {
    const LayerMarkers mk = trace.markers(l);
    out << l << ",entropy_minimum," << mk.entropy_minimum_step << ','
        << format_number(rows[mk.entropy_minimum_step - first].layers[l].entropy_step) << '\n';
    out << l << ",flow_peak," << mk.flow_peak_step << ','
        << format_number(rows[mk.flow_peak_step - first].layers[l].flow_norm) << '\n';
    for (double k : mk.net_zero_crossings)
      out << l << ",net_zero_crossing," << format_number(k) << ','
          << format_number(k * trace.config().dt) << '\n';
  }
}

void write_aligned_csv(std::ostream& out, const invariance::AlignedTable& table) {
  out << "metric,layer,eta,time,value\n";
  for (const auto& s : table.series)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      for (std::size_t g = 0; g < table.grid.size(); ++g)
        out << s.metric << ',' << s.layer << ',' << format_number(table.etas[i]) << ','
            << format_number(table.grid[g]) << ',' << format_number(s.values[i][g]) << '\n';
}

void write_invariance_report_csv(std::ostream& out, const invariance::InvarianceReport& report) {
  out << "kind,metric,layer,eta,reference_eta,sup_deviation,reference_range,relative_deviation,"
         "tolerance,status\n";
  auto emit = [&](const char* kind, const invariance::PairRow& r) {
    out << kind << ',' << r.metric << ',' << r.layer << ',' << format_number(r.eta) << ','
        << format_number(r.reference_eta) << ',' << format_number(r.sup_deviation) << ','
        << format_number(r.reference_range) << ','
        << (r.relative_deviation ? format_number(*r.relative_deviation) : std::string()) << ','
        << format_number(r.tolerance) << ',' << invariance::to_string(r.status) << '\n';
  };
  for (const auto& r : report.rows) emit("reference", r);
  for (const auto& r : report.pairwise_rows) emit("pairwise", r);
}

}  // namespace ska::cli
