#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "ska/invariance.hpp"

namespace inv = ska::invariance;
using ska::Column;

namespace {

// One-layer trace whose entropy_step column holds f(t_k) at t_k = k·dt.
ska::TrajectoryTrace synthetic_trace(double dt, std::size_t steps, const std::function<double(std::size_t)>& f,
                                     std::uint64_t seed = 42) {
  ska::NetworkConfig cfg{{1, 1}, 1.0, seed, dt, steps};
  std::vector<ska::StepMetrics> rows;
  for (std::size_t k = 1; k <= steps; ++k) {
    ska::StepMetrics row{k, static_cast<double>(k) * dt, {ska::LayerMetrics{}}};
    row.layers[0].entropy_step = f(k);
    rows.push_back(row);
  }
  return ska::TrajectoryTrace(cfg, "synthetic", std::move(rows));
}

ska::TrajectoryTrace euler_trace(double eta, double lambda, double horizon) {
  const auto steps = static_cast<std::size_t>(std::llround(horizon / eta));
  return synthetic_trace(eta, steps, [=](std::size_t k) { return std::pow(1.0 + lambda * eta, static_cast<double>(k)); });
}

ska::data::Dataset small_dataset() {
  return ska::data::Dataset{oracle::random_matrix(8, 6, 3, 0, 1), std::nullopt, 0, ska::data::Source::inline_values};
}

}  // namespace

TEST(FamilySetup, StepCounts) {
  inv::InvarianceSpec spec;
  spec.eta_list = {0.02, 0.01, 0.005, 0.0033, 0.0025, 0.001};
  EXPECT_EQ(spec.step_counts(), (std::vector<std::size_t>{25, 50, 100, 152, 200, 500}));
  spec.eta_list = {0.4};
  EXPECT_THROW(spec.step_counts(), std::invalid_argument);
  spec.eta_list = {0.01, -0.01};
  EXPECT_THROW(spec.step_counts(), std::invalid_argument);
}

TEST(FamilySetup, ValidateChecksSeedsAndBase) {
  inv::InvarianceSpec spec;
  spec.base = ska::NetworkConfig{{4, 2}, 1.0, 1, 0.1, 1};
  EXPECT_NO_THROW(spec.validate());
  spec.seeds = {1, 2};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.seeds.clear();
  spec.metrics.clear();
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Metric, Names) {
  EXPECT_EQ(inv::parse_metric("entropy_step_normalized"), inv::Metric::entropy_step);
  EXPECT_EQ(inv::metric_name(inv::Metric::entropy_step, true), "entropy_step_normalized");
  EXPECT_EQ(inv::metric_name(inv::Metric::entropy_step, false), "entropy_step");
  EXPECT_EQ(inv::metric_name(inv::Metric::cosine, true), "cosine");
  EXPECT_FALSE(inv::parse_metric("flow").has_value());
}

TEST(Normalize, DividesPerStepColumnsByEta) {
  const auto t = synthetic_trace(0.25, 2, [](std::size_t k) { return static_cast<double>(k); });
  const auto n = inv::normalize_trace(t);
  EXPECT_EQ(n.column(0, Column::entropy_step), (std::vector<double>{4.0, 8.0}));
  EXPECT_EQ(n.times(), t.times());
  EXPECT_EQ(n.column(0, Column::entropy_cum), t.column(0, Column::entropy_cum));
}

TEST(Interpolate, IdentityOnKnots) {
  const std::vector<double> ts{0.1, 0.2, 0.35}, vs{3.0, -1.0, 7.5};
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_EQ(inv::interpolate(ts, vs, ts[i]), vs[i]);
  EXPECT_EQ(inv::interpolate(ts, vs, 0.0), 3.0);
  EXPECT_EQ(inv::interpolate(ts, vs, 1.0), 7.5);
}

TEST(Interpolate, ExactForLinearAndBoundedForQuadratic) {
  std::vector<double> ts, lin, quad;
  const double h = 0.05;
  for (int i = 0; i <= 20; ++i) {
    const double t = h * i;
    ts.push_back(t);
    lin.push_back(2.0 * t - 1.0);
    quad.push_back(t * t);
  }
  for (double t = 0.013; t < 1.0; t += 0.031) {
    EXPECT_NEAR(inv::interpolate(ts, lin, t), 2.0 * t - 1.0, 1e-14);
    // |error| ≤ h²/8·max|f''| for linear interpolation.
    EXPECT_LE(std::abs(inv::interpolate(ts, quad, t) - t * t), h * h / 8.0 * 2.0 + 1e-15);
  }
}

TEST(Compare, IdenticalTracesAreZeroDeviation) {
  auto f = [](std::size_t k) { return std::sin(0.1 * static_cast<double>(k)); };
  const auto table = inv::resample_common_grid({synthetic_trace(0.02, 25, f), synthetic_trace(0.02, 25, f)},
                                               std::vector<Column>{Column::entropy_step});
  const auto report = inv::compare(table, 0.02);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(*report.rows[0].relative_deviation, 0.0);
  EXPECT_TRUE(report.passed());
}

TEST(Compare, BoundaryDeviationPasses) {
  const auto ref = synthetic_trace(0.25, 4, [](std::size_t k) { return static_cast<double>(k % 2); });
  auto other = synthetic_trace(0.5, 2, [](std::size_t k) { return static_cast<double>(k % 2) + 0.25; });
  const auto table = inv::resample_common_grid({ref, other}, std::vector<Column>{Column::entropy_step});
  EXPECT_EQ(table.grid, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(table.reference, 0u);
  auto report = inv::compare(table, inv::TolerancePolicy::uniform(1.25));
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].status, inv::Status::incomparable);  // reference is constant on the grid

  const auto ref2 = synthetic_trace(0.25, 4, [](std::size_t k) { return static_cast<double>(k); });
  const auto other2 = synthetic_trace(0.5, 2, [](std::size_t k) { return 2.0 * static_cast<double>(k) + 0.5; });
  const auto t2 = inv::resample_common_grid({ref2, other2}, std::vector<Column>{Column::entropy_step});
  report = inv::compare(t2, inv::TolerancePolicy::uniform(0.25));
  EXPECT_EQ(*report.rows[0].relative_deviation, 0.25);
  EXPECT_EQ(report.rows[0].status, inv::Status::pass);
  report = inv::compare(t2, inv::TolerancePolicy::uniform(0.2499));
  EXPECT_EQ(report.rows[0].status, inv::Status::fail);
  EXPECT_FALSE(report.passed());
}

TEST(Compare, EulerFamilyConvergesAtFirstOrder) {
  std::vector<ska::TrajectoryTrace> traces;
  for (double eta : {0.02, 0.01, 0.005, 0.001}) traces.push_back(euler_trace(eta, -3.0, 0.5));
  const auto table = inv::resample_common_grid(traces, std::vector<Column>{Column::entropy_step});
  EXPECT_EQ(table.reference, 3u);
  EXPECT_EQ(table.grid.size(), 25u);
  const auto report = inv::compare(table, inv::TolerancePolicy{});
  ASSERT_EQ(report.convergence.size(), 2u);
  for (const auto& c : report.convergence) {
    ASSERT_TRUE(c.ratio.has_value());
    EXPECT_NEAR(*c.ratio, 2.0, 0.5);
    EXPECT_GE(*c.ratio, inv::kConvergenceLow);
    EXPECT_LE(*c.ratio, inv::kConvergenceHigh);
  }
  // Tolerance assignment: 0.005 is the finest non-reference config.
  for (const auto& r : report.rows) EXPECT_EQ(r.tolerance, r.eta == 0.005 ? 0.02 : 0.10);
}

TEST(Compare, ZeroRangeIsIncomparable) {
  auto flat = [](std::size_t) { return 1.0; };
  const auto table = inv::resample_common_grid({synthetic_trace(0.02, 25, flat), synthetic_trace(0.01, 50, flat)},
                                               std::vector<Column>{Column::entropy_step});
  const auto report = inv::compare(table, 0.02);
  EXPECT_EQ(report.rows[0].status, inv::Status::incomparable);
  EXPECT_FALSE(report.rows[0].relative_deviation.has_value());
  EXPECT_TRUE(report.passed());
}

TEST(Compare, NanCosinePointsAreSkipped) {
  ska::NetworkConfig cfg{{1, 1}, 1.0, 42, 0.5, 2};
  auto make = [&](double dt, std::size_t n, bool gap) {
    cfg.dt = dt;
    cfg.steps = n;
    std::vector<ska::StepMetrics> rows;
    for (std::size_t k = 1; k <= n; ++k) {
      ska::StepMetrics row{k, static_cast<double>(k) * dt, {ska::LayerMetrics{}}};
      if (!(gap && k == 1)) row.layers[0].cosine = static_cast<double>(k) * dt;
      rows.push_back(row);
    }
    return ska::TrajectoryTrace(cfg, "s", std::move(rows));
  };
  const auto table = inv::resample_common_grid({make(0.5, 2, true), make(0.25, 4, false)},
                                               std::vector<Column>{Column::cosine});
  EXPECT_TRUE(std::isnan(table.series[0].values[0][0]));
  const auto report = inv::compare(table, 0.02);
  EXPECT_EQ(*report.rows[0].relative_deviation, 0.0);
}

TEST(Compare, MismatchedSeedsAreIncomparableSetup) {
  auto f = [](std::size_t k) { return static_cast<double>(k); };
  const auto table = inv::resample_common_grid({synthetic_trace(0.02, 25, f, 1), synthetic_trace(0.01, 50, f, 2)},
                                               std::vector<Column>{Column::entropy_step});
  const auto report = inv::compare(table, 0.02);
  EXPECT_TRUE(report.incomparable_setup);
  EXPECT_NE(report.incomparable_reason.find("seed"), std::string::npos);
  EXPECT_FALSE(report.passed());
}

TEST(Compare, ResultDoesNotDependOnTraceOrder) {
  std::vector<ska::TrajectoryTrace> traces;
  for (double eta : {0.02, 0.01, 0.005}) traces.push_back(euler_trace(eta, 2.0, 0.5));
  const auto forward = inv::compare(inv::resample_common_grid(traces, std::vector<Column>{Column::entropy_step}), 0.02);
  std::swap(traces[0], traces[2]);
  const auto reversed = inv::compare(inv::resample_common_grid(traces, std::vector<Column>{Column::entropy_step}), 0.02);
  ASSERT_EQ(forward.rows.size(), reversed.rows.size());
  for (const auto& r : forward.rows) {
    const auto it = std::find_if(reversed.rows.begin(), reversed.rows.end(), [&](const auto& o) { return o.eta == r.eta; });
    ASSERT_NE(it, reversed.rows.end());
    EXPECT_EQ(it->relative_deviation, r.relative_deviation);
  }
}

TEST(Compare, PairwiseRowsCoverEveryPair) {
  std::vector<ska::TrajectoryTrace> traces;
  for (double eta : {0.02, 0.01, 0.005, 0.001}) traces.push_back(euler_trace(eta, 1.0, 0.5));
  const auto report = inv::compare(inv::resample_common_grid(traces, std::vector<Column>{Column::entropy_step}),
                                   inv::TolerancePolicy{}, true);
  EXPECT_EQ(report.pairwise_rows.size(), 6u);
  EXPECT_EQ(report.rows.size(), 3u);
}

TEST(Resample, NeedsTwoTraces) {
  EXPECT_THROW(inv::resample_common_grid({euler_trace(0.1, 1.0, 0.5)}, std::vector<Column>{Column::entropy_step}),
               std::invalid_argument);
}

TEST(Family, SingleEtaGivesNoRows) {
  inv::InvarianceSpec spec;
  spec.base = ska::NetworkConfig{{6, 4, 2}, 1.0, 3, 0.1, 1};
  spec.eta_list = {0.1};
  const auto res = inv::evaluate(spec, small_dataset());
  EXPECT_EQ(res.members.size(), 1u);
  EXPECT_TRUE(res.report.rows.empty());
  EXPECT_TRUE(res.report.passed());
}

TEST(Family, RepeatedEtaIsExactlyInvariant) {
  inv::InvarianceSpec spec;
  spec.base = ska::NetworkConfig{{6, 4, 2}, 1.0, 3, 0.1, 1};
  spec.eta_list = {0.05, 0.05};
  spec.metrics = {inv::Metric::entropy_step, inv::Metric::cosine, inv::Metric::z_norm, inv::Metric::net_cum};
  const auto res = inv::evaluate(spec, small_dataset());
  EXPECT_EQ(res.report.rows.size(), 4u * 2u);
  for (const auto& r : res.report.rows) EXPECT_EQ(r.sup_deviation, 0.0);
  EXPECT_TRUE(res.report.passed());
  EXPECT_EQ(res.members[0].steps, 10u);
}

TEST(Family, DifferentSeedsAreRejected) {
  inv::InvarianceSpec spec;
  spec.base = ska::NetworkConfig{{6, 4, 2}, 1.0, 3, 0.1, 1};
  spec.eta_list = {0.05, 0.025};
  spec.seeds = {1, 2};
  EXPECT_TRUE(inv::evaluate(spec, small_dataset()).report.incomparable_setup);
}

TEST(Scaling, RatioOfUnnormalizedEntropyTracksEtaRatio) {
  const auto coarse = synthetic_trace(0.02, 25, [](std::size_t k) { return 0.02 * std::exp(-0.02 * k); });
  const auto fine = synthetic_trace(0.01, 50, [](std::size_t k) { return 0.01 * std::exp(-0.01 * k); });
  const auto r = inv::entropy_scaling_ratio(coarse, fine, 0.1, 0.5);
  EXPECT_NEAR(r.mean, 2.0, 1e-12);
}
