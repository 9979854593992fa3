#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ska/cli/commands.hpp"
#include "ska/cli/config.hpp"
#include "ska/cli/svg.hpp"
#include "ska/cli/trace_io.hpp"

namespace fs = std::filesystem;
namespace cli = ska::cli;

namespace {

const fs::path kConfigs = SKA_CONFIG_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ska_cli_" + name);
  fs::remove_all(p);
  return p;
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ska");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("ska_cli_cfg_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

cli::ConfigError config_error(const std::string& text) {
  try {
    cli::parse_config(text, "test.json");
  } catch (const cli::ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ConfigError";
  return cli::ConfigError("", "", 0, "");
}

const char* kTinyInvariance = R"({
  "seed": 3,
  "network": { "layer_sizes": [6, 4, 2] },
  "data": { "source": "synthetic", "n": 16, "d": 6, "classes": 2 },
  "invariance": { "eta_list": [0.05, 0.05], "total_time": 0.5 }
})";

}  // namespace

TEST(Config, MinimalExampleParses) {
  const auto cfg = cli::load_config(kConfigs / "minimal.json");
  EXPECT_EQ(cfg.network.layer_sizes, (std::vector<std::size_t>{16, 8, 4}));
  EXPECT_EQ(cfg.network.steps, 5u);
  EXPECT_EQ(cfg.network.seed, 7u);
  EXPECT_EQ(cfg.data.blobs.seed, 7u);
  EXPECT_EQ(cfg.data.blobs.d, 16u);
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const auto e = config_error("{\n  \"network\": { \"layer_sizes\": [2, 1] },\n  \"run\": { \"dtt\": 0.1 }\n}");
  EXPECT_EQ(e.key(), "run.dtt");
  EXPECT_EQ(e.line(), 3u);
  EXPECT_NE(std::string(e.what()).find("test.json:3"), std::string::npos);
}

TEST(Config, TypeAndRangeErrors) {
  EXPECT_EQ(config_error(R"({"network": {"layer_sizes": "wide"}})").key(), "network.layer_sizes");
  EXPECT_EQ(config_error(R"({"network": {"layer_sizes": [2, 1]}, "run": {"dt": -1}})").key(), "run.dt");
  EXPECT_EQ(config_error(R"({"network": {"layer_sizes": [2, 1]}, "data": {"source": "cifar"}})").key(),
            "data.source");
  EXPECT_EQ(config_error(R"({"network": {"layer_sizes": [1, 1]}, "data": {"source": "inline", "inputs": [[1.5]]}})")
                .key(),
            "data.inputs");
  const auto syntax = config_error("{\n\"network\": [1,\n");
  EXPECT_EQ(syntax.key(), "");
  EXPECT_GT(syntax.line(), 0u);
}

TEST(Config, ResolvedEchoRoundTrips) {
  const auto cfg = cli::load_config(kConfigs / "invariance_synthetic.json");
  const auto echo = cli::to_json(cfg);
  const auto again = cli::parse_config(echo.dump(), "echo");
  EXPECT_EQ(cli::to_json(again), echo);
}

TEST(TraceIo, NumbersRoundTrip) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.125, 0.0})
    EXPECT_EQ(std::stod(cli::format_number(v)), v);
  EXPECT_EQ(cli::format_number(0.5), "0.5");
}

TEST(TraceIo, CsvRoundTrip) {
  ska::NetworkConfig cfg{{2, 2, 1}, 1.0, 1, 0.1, 2};
  std::vector<ska::StepMetrics> rows;
  for (std::size_t k = 1; k <= 2; ++k) {
    ska::StepMetrics row{k, 0.1 * k, {}};
    for (std::size_t l = 0; l < 2; ++l) {
      ska::LayerMetrics m{-0.1 * k, -0.3 / k, std::nullopt, 1.5, 2.5, 1e-17, -3.0};
      if (l == 0) m.cosine = 0.75;
      row.layers.push_back(m);
    }
    rows.push_back(row);
  }
  const ska::TrajectoryTrace trace(cfg, "x", rows);
  std::stringstream ss;
  cli::write_trace_csv(ss, trace);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, cli::kTraceHeader);
  ss.seekg(0);
  const auto back = cli::read_trace_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].time, rows[k].time);
    for (std::size_t l = 0; l < 2; ++l) {
      EXPECT_EQ(back[k].layers[l].entropy_cum, rows[k].layers[l].entropy_cum);
      EXPECT_EQ(back[k].layers[l].net_step, rows[k].layers[l].net_step);
      EXPECT_EQ(back[k].layers[l].cosine, rows[k].layers[l].cosine);
    }
  }
}

TEST(TraceIo, MalformedCsvReportsLine) {
  std::istringstream in(std::string(cli::kTraceHeader) + "\n1,0.1,0,0,0,,1,1,0,0\n2,0.2,0,zero,0,,1,1,0,0\n");
  try {
    cli::read_trace_csv(in);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Svg, ChartIsWellFormed) {
  cli::Chart chart;
  chart.title = "a < b & c";
  chart.x_label = "step";
  chart.y_label = "value";
  chart.series.push_back(cli::Series{"s", {0, 1, 2}, {1, std::nan(""), 3}, {}});
  const std::string svg = cli::render_svg(chart);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Cli, TrainWritesArtifactsAndRerunsByteIdentically) {
  const auto out = fresh_dir("train");
  auto r = invoke({"train", "--config", (kConfigs / "minimal.json").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string trace = slurp(out / "trace.csv");
  std::size_t lines = 0;
  for (char c : trace) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 5u * 2u);
  EXPECT_EQ(trace.rfind(cli::kTraceHeader, 0), 0u);
  EXPECT_TRUE(fs::exists(out / "markers.csv"));
  EXPECT_TRUE(fs::exists(out / "entropy_vs_step.svg"));
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest.at("command"), "train");

  const auto again = fresh_dir("train_again");
  ASSERT_EQ(invoke({"train", "--config", (kConfigs / "minimal.json").string(), "--out", again.string(), "--no-svg"}).code, 0);
  EXPECT_EQ(slurp(again / "trace.csv"), trace);
  EXPECT_FALSE(fs::exists(again / "entropy_vs_step.svg"));

  const auto from_manifest = fresh_dir("train_manifest");
  ASSERT_EQ(invoke({"train", "--config", (out / "manifest.json").string(), "--out", from_manifest.string()}).code, 0);
  EXPECT_EQ(slurp(from_manifest / "trace.csv"), trace);
  EXPECT_EQ(slurp(from_manifest / "markers.csv"), slurp(out / "markers.csv"));

  const auto reseeded = fresh_dir("train_seed");
  ASSERT_EQ(invoke({"train", "--config", (kConfigs / "minimal.json").string(), "--out", reseeded.string(), "--seed", "8"}).code, 0);
  EXPECT_NE(slurp(reseeded / "trace.csv"), trace);

  r = invoke({"report", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(r.out.empty());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"train", "--out", "x"}).code, 2);
  EXPECT_EQ(invoke({"train", "--config", "/nonexistent.json", "--out", fresh_dir("missing").string()}).code, 2);
  const auto bad = write_config("bad", R"({"network": {"layer_sizes": [2, 1]}, "bogus": 1})");
  const auto r = invoke({"train", "--config", bad.string(), "--out", fresh_dir("bad").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
  const auto empty = fresh_dir("empty");
  fs::create_directories(empty);
  EXPECT_EQ(invoke({"report", empty.string()}).code, 2);
}

TEST(Cli, InvarianceIdenticalEtasPass) {
  const auto cfg = write_config("inv_same", kTinyInvariance);
  const auto out = fresh_dir("inv_same");
  const auto r = invoke({"invariance", "--config", cfg.string(), "--out", out.string(), "--no-svg"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  for (const char* f : {"aligned.csv", "invariance_report.csv", "invariance_report.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto report = invoke({"report", out.string()});
  EXPECT_NE(report.out.find("PASS"), std::string::npos);
}

TEST(Cli, InvarianceRowCountAndFailureCode) {
  auto j = nlohmann::json::parse(kTinyInvariance);
  j["invariance"]["eta_list"] = {0.05, 0.025, 0.0125};
  j["invariance"]["tolerance"] = 1e-12;
  j["invariance"]["coarse_tolerance"] = 1e-12;
  j["invariance"]["metrics"] = {"entropy_step_normalized", "cosine", "z_norm"};
  const auto cfg = write_config("inv_fail", j.dump());
  const auto out = fresh_dir("inv_fail");
  EXPECT_EQ(invoke({"invariance", "--config", cfg.string(), "--out", out.string()}).code, 1);
  const auto report = nlohmann::json::parse(slurp(out / "invariance_report.json"));
  EXPECT_EQ(report.at("rows").size(), 2u * 3u * 2u);
  EXPECT_TRUE(fs::exists(out / "invariance_cosine_layer1.svg"));
  EXPECT_NE(invoke({"report", out.string()}).out.find("FAIL"), std::string::npos);
}

TEST(Cli, InvarianceSeedMismatchExitsTwo) {
  auto j = nlohmann::json::parse(kTinyInvariance);
  j["invariance"]["eta_list"] = {0.05, 0.025};
  j["invariance"]["seeds"] = {1, 2};
  const auto cfg = write_config("inv_seeds", j.dump());
  EXPECT_EQ(invoke({"invariance", "--config", cfg.string(), "--out", fresh_dir("inv_seeds").string(), "--no-svg"}).code, 2);
}

TEST(Cli, VariationalCheckOnScalarConfig) {
  const auto out = fresh_dir("var");
  const auto r = invoke({"variational-check", "--config", (kConfigs / "variational_scalar.json").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(out / "variational_report.json"));
  EXPECT_FALSE(report.empty());
  EXPECT_TRUE(fs::exists(out / "unit_trajectories.csv"));
  EXPECT_EQ(invoke({"report", out.string()}).code, 0);
}
