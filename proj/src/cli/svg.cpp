#include "ska/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <optional>

namespace ska::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_svg(const Chart& chart) {
  Range xr, yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(chart.title) << "</text>\n"
    << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    o << "<line x1=\"" << fixed(px(fx)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fixed(px(fx))
      << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"#333\"/>\n"
      << "<text x=\"" << fixed(px(fx)) << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n"
      << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(py(fy)) << "\" x2=\"" << kLeft
      << "\" y2=\"" << fixed(py(fy)) << "\" stroke=\"#333\"/>\n"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(py(fy) + 4)
      << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
  }
  if (yr.lo < 0.0 && yr.hi > 0.0)
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << fixed(py(0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
    << escape(chart.x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << kTop + ph / 2 << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const Series& s = chart.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += fixed(px(s.x[i])) + ',' + fixed(py(s.y[i]));
    }
    flush();
    for (std::size_t i : s.marks) {
      if (i >= s.x.size() || i >= s.y.size() || !std::isfinite(s.y[i])) continue;
      o << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i]))
        << "\" r=\"4\" fill=\"" << color << "\" stroke=\"black\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(si);
    o << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 32
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<NamedChart> trace_charts(const TrajectoryTrace& trace) {
  std::vector<double> steps;
  for (const auto& r : trace.rows()) steps.push_back(static_cast<double>(r.step));
  const std::size_t first = trace.rows().empty() ? 0 : trace.rows().front().step;

  auto per_layer = [&](Column yc, std::optional<Column> xc, bool mark_min, bool mark_peak) {
    std::vector<Series> out;
    for (std::size_t l = 0; l < trace.layer_count(); ++l) {
      Series s{"layer " + std::to_string(l + 1), xc ? trace.column(l, *xc) : steps,
               trace.column(l, yc), {}};
      if (!trace.empty()) {
        if (mark_min) s.marks.push_back(trace.entropy_minimum(l) - first);
        if (mark_peak) s.marks.push_back(trace.flow_peak(l) - first);
      }
      out.push_back(std::move(s));
    }
    return out;
  };

  return {
      {"entropy_vs_step.svg",
       {"Per-step entropy", "step k", "entropy (bits)", per_layer(Column::entropy_step, {}, true, false)}},
      {"cosine_vs_step.svg",
       {"Cosine alignment of Z and ΔD", "step k", "cosine", per_layer(Column::cosine, {}, false, false)}},
      {"flow_vs_znorm.svg",
       {"Knowledge flow against knowledge norm", "||Z||", "||Φ||",
        per_layer(Column::flow_norm, Column::z_norm, false, true)}},
      {"flow_vs_step.svg",
       {"Knowledge flow", "step k", "||Φ||", per_layer(Column::flow_norm, {}, false, true)}},
      {"net_vs_znorm.svg",
       {"Tensor Net against knowledge norm", "||Z||", "Net",
        per_layer(Column::net_cum, Column::z_norm, false, false)}},
      {"net_vs_step.svg",
       {"Tensor Net", "step k", "Net", per_layer(Column::net_cum, {}, false, false)}},
  };
}

}  // namespace ska::cli
