#include "ska/cli/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ska/cli/config.hpp"
#include "ska/cli/svg.hpp"
#include "ska/cli/trace_io.hpp"
#include "ska/run.hpp"
#include "ska/variational.hpp"

namespace ska::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw UsageError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw UsageError("cannot write " + path.string());
    artifacts_.push_back(name);
  }

  template <class F>
  void write_with(const std::string& name, F&& fill) {
    std::ostringstream os;
    fill(os);
    write(name, os.str());
  }

  const std::vector<std::string>& artifacts() const { return artifacts_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> artifacts_;
};

ExperimentConfig prepare(const CommandOptions& opts) {
  if (opts.config.empty()) throw UsageError("--config is required");
  if (opts.out.empty()) throw UsageError("--out is required");
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.seed) {
    cfg.network.seed = *opts.seed;
    cfg.data.blobs.seed = *opts.seed;
  }
  cfg.invariance.base = cfg.network;
  return cfg;
}

Network make_network(const ExperimentConfig& cfg, const NetworkConfig& net_cfg) {
  Network net(net_cfg);
  for (std::size_t l = 0; l < cfg.initial_weights.size(); ++l) net.set_weights(l, cfg.initial_weights[l]);
  return net;
}

RunOptions run_options(const ExperimentConfig& cfg) {
  return RunOptions{BatchSpec{cfg.data.batch, cfg.data.mode}, {}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json selection_json(const UnitSelection& s) { return json::array({s.layer, s.unit, s.sample}); }

void finish_manifest(Outputs& out, const std::string& command, const ExperimentConfig& cfg,
                     json resolved, json summary, std::chrono::steady_clock::time_point start) {
  json m;
  m["tool"] = "ska";
  m["version"] = SKA_VERSION;
  m["command"] = command;
  m["config"] = to_json(cfg);
  m["resolved"] = std::move(resolved);
  m["summary"] = std::move(summary);
  std::vector<std::string> artifacts = out.artifacts();
  artifacts.push_back(kManifest);
  m["artifacts"] = artifacts;
  m["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.write(kManifest, m.dump(2) + "\n");
}

json trace_summary(const TrajectoryTrace& trace) {
  json layers = json::array();
  for (std::size_t l = 0; l < trace.layer_count(); ++l) {
    const LayerMarkers mk = trace.markers(l);
    const LayerMetrics& last = trace.rows().back().layers[l];
    layers.push_back({{"layer", l + 1},
                      {"units", trace.config().layer_sizes[l + 1]},
                      {"entropy_minimum_step", mk.entropy_minimum_step},
                      {"flow_peak_step", mk.flow_peak_step},
                      {"net_zero_crossings", mk.net_zero_crossings},
                      {"final_net_cum", last.net_cum},
                      {"final_entropy_cum", last.entropy_cum},
                      {"final_z_norm", last.z_norm}});
  }
  return json{{"characteristic_time", trace.config().total_time()},
              {"rows", trace.rows().size()},
              {"layers", std::move(layers)}};
}

std::string eta_tag(double eta) { return format_number(eta); }

json report_json(const invariance::FamilyResult& r) {
  auto row_json = [](const invariance::PairRow& p) {
    return json{{"metric", p.metric},
                {"layer", p.layer},
                {"eta", p.eta},
                {"reference_eta", p.reference_eta},
                {"sup_deviation", p.sup_deviation},
                {"reference_range", p.reference_range},
                {"relative_deviation", optional_number(p.relative_deviation)},
                {"tolerance", p.tolerance},
                {"status", invariance::to_string(p.status)}};
  };
  json j;
  j["total_time"] = r.report.total_time;
  j["reference_eta"] = r.report.reference_eta;
  j["incomparable_setup"] = r.report.incomparable_setup;
  if (r.report.incomparable_setup) j["incomparable_reason"] = r.report.incomparable_reason;
  j["passed"] = r.report.passed();
  json members = json::array();
  for (const auto& m : r.members)
    members.push_back({{"eta", m.eta},
                       {"steps", m.steps},
                       {"realized_time", m.realized_time},
                       {"seed", m.trace.config().seed}});
  j["members"] = std::move(members);
  j["rows"] = json::array();
  for (const auto& p : r.report.rows) j["rows"].push_back(row_json(p));
  j["pairwise_rows"] = json::array();
  for (const auto& p : r.report.pairwise_rows) j["pairwise_rows"].push_back(row_json(p));
  j["convergence"] = json::array();
  for (const auto& c : r.report.convergence) {
    const bool in_band =
        c.ratio && *c.ratio >= invariance::kConvergenceLow && *c.ratio <= invariance::kConvergenceHigh;
    j["convergence"].push_back({{"metric", c.metric},
                                {"layer", c.layer},
                                {"eta_coarse", c.eta_coarse},
                                {"eta_fine", c.eta_fine},
                                {"ratio", optional_number(c.ratio)},
                                {"in_band", in_band}});
  }
  return j;
}

json unit_json(const variational::UnitAnalysis& a) {
  json crossings = json::array();
  for (const auto& c : a.crossings)
    crossings.push_back({{"time", c.time},
                         {"residual", c.residual},
                         {"bound", c.bound},
                         {"within_bound", c.residual <= c.bound}});
  return json{{"selection", selection_json(a.selection)},
              {"samples", a.samples},
              {"action", a.action},
              {"entropy_via_action", a.entropy_via_action},
              {"entropy_via_definition", a.entropy_via_definition},
              {"el_residual_max", a.el_residual_max},
              {"max_z_dot", a.max_z_dot},
              {"net_identity", std::move(crossings)}};
}

struct UnitRun {
  std::vector<variational::UnitTrajectory> trajectories;
  std::vector<variational::UnitAnalysis> analyses;
};

UnitRun run_units(const ExperimentConfig& cfg, const data::Dataset& ds, double dt, std::size_t steps) {
  NetworkConfig nc = cfg.network;
  nc.dt = dt;
  nc.steps = steps;
  Network net = make_network(cfg, nc);
  RunOptions ro = run_options(cfg);
  ro.record_units = cfg.variational.selections;
  RunResult r = run(net, ds, ro);
  UnitRun out;
  out.trajectories = variational::extract_unit_trajectories(r.units, cfg.variational.selections);
  for (std::size_t i = 0; i < out.trajectories.size(); ++i)
    out.analyses.push_back(variational::analyze(out.trajectories[i], cfg.variational.selections[i]));
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

}  // namespace

int cmd_train(const CommandOptions& opts, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = prepare(opts);
  const data::Dataset ds = build_dataset(cfg.data);
  Network net = make_network(cfg, cfg.network);
  const RunResult r = run(net, ds, run_options(cfg));

  Outputs out(opts.out);
  out.write_with("trace.csv", [&](std::ostream& os) { write_trace_csv(os, r.trace); });
  out.write_with("markers.csv", [&](std::ostream& os) { write_markers_csv(os, r.trace); });
  if (opts.svg)
    for (const auto& c : trace_charts(r.trace)) out.write(c.file, render_svg(c.chart));
  finish_manifest(out, "train", cfg,
                  {{"dt", cfg.network.dt},
                   {"steps", cfg.network.steps},
                   {"total_time", cfg.network.total_time()},
                   {"samples", ds.size()},
                   {"dataset", r.trace.dataset()}},
                  trace_summary(r.trace), start);
  log << "train: " << r.trace.rows().size() << " steps, T = " << format_number(cfg.network.total_time())
      << ", wrote " << out.artifacts().size() << " files to " << opts.out.string() << '\n';
  return kOk;
}

int cmd_invariance(const CommandOptions& opts, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = prepare(opts);
  if (cfg.data.mode != data::BatchMode::full)
    throw UsageError("invariance runs need data.mode 'full'");
  data::Dataset ds = build_dataset(cfg.data);
  if (cfg.data.batch > 0 && cfg.data.batch < ds.size()) {
    ds.inputs = data::take_batch(ds, cfg.data.batch, data::BatchMode::full, 0);
    if (ds.labels) ds.labels->resize(cfg.data.batch);
  }
  const invariance::FamilyResult result = invariance::evaluate(cfg.invariance, ds);

  Outputs out(opts.out);
  json members = json::array();
  for (std::size_t i = 0; i < result.members.size(); ++i) {
    const auto& m = result.members[i];
    const std::string name = "trace_" + std::to_string(i) + "_eta" + eta_tag(m.eta) + ".csv";
    out.write_with(name, [&](std::ostream& os) { write_trace_csv(os, m.trace); });
    members.push_back({{"eta", m.eta},
                       {"steps", m.steps},
                       {"realized_time", m.realized_time},
                       {"trace", name}});
  }
  if (!result.table.series.empty())
    out.write_with("aligned.csv", [&](std::ostream& os) { write_aligned_csv(os, result.table); });
  out.write_with("invariance_report.csv",
                 [&](std::ostream& os) { write_invariance_report_csv(os, result.report); });
  const json report = report_json(result);
  out.write("invariance_report.json", report.dump(2) + "\n");
  if (opts.svg) {
    for (const auto& s : result.table.series) {
      Chart chart{s.metric + ", layer " + std::to_string(s.layer + 1) + ", resampled", "time t",
                  s.metric, {}};
      for (std::size_t i = 0; i < s.values.size(); ++i)
        chart.series.push_back(Series{"eta " + eta_tag(result.table.etas[i]), result.table.grid,
                                      s.values[i], {}});
      out.write("invariance_" + s.metric + "_layer" + std::to_string(s.layer + 1) + ".svg",
                render_svg(chart));
    }
  }
  json summary{{"passed", result.report.passed()},
               {"incomparable_setup", result.report.incomparable_setup},
               {"report", "invariance_report.json"}};
  finish_manifest(out, "invariance", cfg,
                  {{"total_time", cfg.invariance.total_time},
                   {"members", std::move(members)},
                   {"samples", ds.size()}},
                  std::move(summary), start);

  if (result.report.incomparable_setup) {
    log << "invariance: incomparable setup: " << result.report.incomparable_reason << '\n';
    return kUsageError;
  }
  std::size_t failed = 0;
  for (const auto& r : result.report.rows) failed += r.status == invariance::Status::fail;
  for (const auto& r : result.report.pairwise_rows) failed += r.status == invariance::Status::fail;
  log << "invariance: " << result.members.size() << " runs, " << result.report.rows.size()
      << " comparisons, " << failed << " failed\n";
  return result.report.passed() ? kOk : kComparisonFailed;
}

int cmd_variational(const CommandOptions& opts, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = prepare(opts);
  const data::Dataset ds = build_dataset(cfg.data);
  const double dt = cfg.network.dt;
  const UnitRun coarse = run_units(cfg, ds, dt, cfg.network.steps);

  json report;
  report["dt"] = dt;
  report["steps"] = cfg.network.steps;
  report["total_time"] = cfg.network.total_time();
  report["selections"] = json::array();
  for (const auto& s : cfg.variational.selections) report["selections"].push_back(selection_json(s));
  report["units"] = json::array();
  for (const auto& a : coarse.analyses) report["units"].push_back(unit_json(a));
  if (cfg.variational.dt_halving) {
    const UnitRun fine = run_units(cfg, ds, dt / 2.0, cfg.network.steps * 2);
    report["fine"]["dt"] = dt / 2.0;
    report["fine"]["steps"] = cfg.network.steps * 2;
    report["fine"]["units"] = json::array();
    for (const auto& a : fine.analyses) report["fine"]["units"].push_back(unit_json(a));
    report["halving"] = json::array();
    for (std::size_t i = 0; i < coarse.analyses.size(); ++i) {
      const auto h = variational::compare_halving(coarse.analyses[i], fine.analyses[i]);
      report["halving"].push_back({{"selection", selection_json(h.selection)},
                                   {"el_residual_coarse", h.el_coarse},
                                   {"el_residual_fine", h.el_fine},
                                   {"el_order", optional_number(h.el_order)},
                                   {"net_identity_coarse", optional_number(h.identity_coarse)},
                                   {"net_identity_fine", optional_number(h.identity_fine)},
                                   {"net_identity_ratio", optional_number(h.identity_ratio)},
                                   {"entropy_gap_coarse", optional_number(h.entropy_gap_coarse)},
                                   {"entropy_gap_fine", optional_number(h.entropy_gap_fine)}});
    }
  }

  Outputs out(opts.out);
  out.write_with("unit_trajectories.csv", [&](std::ostream& os) {
    os << "layer,unit,sample,time,z\n";
    for (std::size_t i = 0; i < coarse.trajectories.size(); ++i) {
      const auto& s = cfg.variational.selections[i];
      const auto& t = coarse.trajectories[i];
      for (std::size_t k = 0; k < t.size(); ++k)
        os << s.layer << ',' << s.unit << ',' << s.sample << ',' << format_number(t.time(k)) << ','
           << format_number(t.z[k]) << '\n';
    }
  });
  out.write("variational_report.json", report.dump(2) + "\n");
  finish_manifest(out, "variational-check", cfg,
                  {{"dt", dt}, {"steps", cfg.network.steps}, {"total_time", cfg.network.total_time()}},
                  {{"report", "variational_report.json"}, {"units", coarse.analyses.size()}}, start);
  log << "variational-check: " << coarse.analyses.size() << " units analysed\n";
  return kOk;
}

int cmd_report(const fs::path& dir, std::ostream& out) {
  const fs::path path = dir / kManifest;
  if (!fs::exists(path)) throw UsageError("no " + std::string(kManifest) + " in " + dir.string());
  const json m = read_json(path);
  const std::string command = m.value("command", "");
  out << "command: " << command << "\n";
  if (command == "train") {
    const json& s = m.at("summary");
    out << "characteristic time T = " << format_number(s.at("characteristic_time").get<double>())
        << " (dt = " << format_number(m.at("resolved").at("dt").get<double>())
        << ", K = " << m.at("resolved").at("steps").get<std::size_t>() << ")\n";
    out << "layers: " << s.at("layers").size() << "\n";
    for (const auto& l : s.at("layers")) {
      out << "  layer " << l.at("layer").get<std::size_t>() << " (" << l.at("units").get<std::size_t>()
          << " units): entropy minimum at step " << l.at("entropy_minimum_step").get<std::size_t>()
          << ", flow peak at step " << l.at("flow_peak_step").get<std::size_t>()
          << ", Net zero-crossings:";
      if (l.at("net_zero_crossings").empty()) out << " none";
      for (const auto& k : l.at("net_zero_crossings")) out << ' ' << format_number(k.get<double>());
      out << ", final Net " << format_number(l.at("final_net_cum").get<double>()) << "\n";
    }
    return kOk;
  }
  if (command == "invariance") {
    const json r = read_json(dir / m.at("summary").at("report").get<std::string>());
    out << "characteristic time T = " << format_number(r.at("total_time").get<double>())
        << ", reference eta = " << format_number(r.at("reference_eta").get<double>()) << "\n";
    for (const auto& row : r.at("rows")) {
      out << "  " << row.at("metric").get<std::string>() << " layer "
          << row.at("layer").get<std::size_t>() + 1 << " eta "
          << format_number(row.at("eta").get<double>()) << ": ";
      if (row.at("relative_deviation").is_null()) out << "incomparable";
      else
        out << "relative deviation " << format_number(row.at("relative_deviation").get<double>())
            << " (tolerance " << format_number(row.at("tolerance").get<double>()) << ") "
            << row.at("status").get<std::string>();
      out << "\n";
    }
    for (const auto& c : r.at("convergence")) {
      out << "  convergence " << c.at("metric").get<std::string>() << " layer "
          << c.at("layer").get<std::size_t>() + 1 << " D(" << format_number(c.at("eta_coarse").get<double>())
          << ")/D(" << format_number(c.at("eta_fine").get<double>()) << ") = ";
      if (c.at("ratio").is_null()) out << "n/a\n";
      else out << format_number(c.at("ratio").get<double>()) << "\n";
    }
    if (r.at("incomparable_setup").get<bool>())
      out << "FAIL: incomparable setup (" << r.value("incomparable_reason", "") << ")\n";
    else
      out << (r.at("passed").get<bool>() ? "PASS" : "FAIL") << "\n";
    return kOk;
  }
  if (command == "variational-check") {
    const json r = read_json(dir / m.at("summary").at("report").get<std::string>());
    out << "dt = " << format_number(r.at("dt").get<double>())
        << ", T = " << format_number(r.at("total_time").get<double>()) << "\n";
    for (const auto& u : r.at("units")) {
      const auto& s = u.at("selection");
      out << "  unit (" << s[0] << ", " << s[1] << ", " << s[2] << "): max EL residual "
          << format_number(u.at("el_residual_max").get<double>()) << ", action entropy "
          << format_number(u.at("entropy_via_action").get<double>()) << ", Net crossings "
          << u.at("net_identity").size() << "\n";
    }
    if (r.contains("halving"))
      for (const auto& h : r.at("halving")) {
        out << "  halving: EL order ";
        out << (h.at("el_order").is_null() ? std::string("n/a") : format_number(h.at("el_order").get<double>()));
        out << ", Net identity ratio ";
        out << (h.at("net_identity_ratio").is_null() ? std::string("n/a")
                                                     : format_number(h.at("net_identity_ratio").get<double>()));
        out << "\n";
      }
    return kOk;
  }
  throw UsageError("manifest has unknown command '" + command + "'");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured knowledge accumulation experiments"};
  app.set_version_flag("--version", std::string(SKA_VERSION));
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  fs::path report_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "experiment config (JSON) or a previous manifest.json")
        ->required();
    sub->add_option("--out", opts.out, "output directory")->required();
    sub->add_flag("--svg,!--no-svg", opts.svg, "write SVG charts (default on)");
    sub->add_option("--seed", seed, "override the config seed");
  };
  CLI::App* train = app.add_subcommand("train", "run one SKA trajectory");
  CLI::App* inv = app.add_subcommand("invariance", "run an (eta, K) family at fixed eta*K and compare");
  CLI::App* var = app.add_subcommand("variational-check", "check the variational identities on recorded units");
  CLI::App* rep = app.add_subcommand("report", "summarise an output directory");
  add_common(train);
  add_common(inv);
  add_common(var);
  rep->add_option("--out,dir", report_dir, "output directory holding manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  for (CLI::App* sub : {train, inv, var})
    if (sub->parsed() && sub->count("--seed")) opts.seed = seed;

  try {
    if (train->parsed()) return cmd_train(opts, out);
    if (inv->parsed()) return cmd_invariance(opts, out);
    if (var->parsed()) return cmd_variational(opts, out);
    return cmd_report(report_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace ska::cli
