//  Copyright 2026 The GEACL Simulator Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "geacl/metrics.hpp"

namespace geacl {
namespace {

/// One tracked key, `holders[r]` agents holding value 7 at round r.
Trace coverage_trace(std::size_t n, const std::vector<std::size_t>& holders) {
  Trace t;
  t.initial_agents = n;
  t.keys.push_back({"k", false});
  t.events.push_back({0, EventKind::Inject, 1, 0, 0, 2, 1, 0.0, {}});
  for (std::size_t r = 0; r < holders.size(); ++r) {
    RoundSample s;
    s.round = r;
    s.tick = r * t.round_len;
    for (std::uint64_t i = 1; i <= n; ++i) s.alive.push_back(i);
    std::vector<std::uint64_t> row(n, 0);
    for (std::size_t i = 0; i < holders[r]; ++i) row[i] = 7;
    s.fingerprints.push_back(row);
    s.vectors.push_back(std::vector<std::vector<double>>(n));
    t.samples.push_back(std::move(s));
  }
  return t;
}

TEST(Propagation, AllInformedAtInjection) {
  Trace t = coverage_trace(3, {3, 3});
  EXPECT_EQ(propagation_latency(t, 0), 0u);
  EXPECT_EQ(full_convergence_time(t, 0), 0u);
}

TEST(Propagation, HandBuiltCurve) {
  Trace t = coverage_trace(4, {1, 2, 4});
  EXPECT_EQ(propagation_latency(t, 0), 2u);
  EXPECT_EQ(full_convergence_time(t, 0), 2u);
  EXPECT_EQ(divergence_window(t, 0), 2u);
  EXPECT_DOUBLE_EQ(propagation_coverage(t, 0, 1), 0.5);
}

TEST(Propagation, SingleAgent) {
  Trace t = coverage_trace(1, {1});
  EXPECT_EQ(full_convergence_time(t, 0), 0u);
  EXPECT_EQ(divergence_window(t, 0), 0u);
}

TEST(Propagation, UnreachedReportsCoverage) {
  Trace t = coverage_trace(4, {1, 2, 2});
  EXPECT_FALSE(propagation_latency(t, 0).has_value());
  EXPECT_DOUBLE_EQ(key_propagation(t, 0).final_coverage, 0.5);
}

TEST(Redundancy, MinimalIsOne) {
  Trace t = coverage_trace(2, {1, 2});
  t.events.push_back({1, EventKind::EnvelopeTx, 1, 2, 0, 0, 0, 0.0, {}});
  EXPECT_DOUBLE_EQ(*redundancy_overhead(t, 0), 1.0);
  Trace lonely = coverage_trace(2, {1, 1});
  EXPECT_FALSE(redundancy_overhead(lonely, 0).has_value());
}

TEST(Divergence, CountsDisagreeingPairs) {
  Trace t;
  for (int k = 0; k < 4; ++k) t.keys.push_back({"k" + std::to_string(k), false});
  RoundSample s;
  s.alive = {1, 2};
  s.fingerprints = {{5, 5}, {1, 2}, {0, 3}, {4, 9}};
  s.vectors.assign(4, std::vector<std::vector<double>>(2));
  EXPECT_DOUBLE_EQ(semantic_divergence(t, s), 3.0);
  s.fingerprints = {{5, 5}, {1, 1}, {3, 3}, {4, 4}};
  EXPECT_DOUBLE_EQ(semantic_divergence(t, s), 0.0);
}

TEST(Divergence, EtaOfGeometricSeries) {
  std::vector<double> d;
  for (int i = 0; i < 10; ++i) d.push_back(100.0 * std::pow(0.5, i));
  d.push_back(0.0);
  EtaFit f = estimate_eta(d);
  ASSERT_TRUE(f.eta.has_value());
  EXPECT_NEAR(*f.eta, 0.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EtaFit zero = estimate_eta({0.0, 0.0});
  EXPECT_FALSE(zero.eta.has_value());
  EXPECT_TRUE(zero.converged_at_start);
}

TEST(Fits, LineFitExact) {
  LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Fits, LogisticRecovery) {
  const double n = 100, beta = 1.0;
  std::vector<double> informed;
  for (int t = 0; t <= 20; ++t) informed.push_back(n / (1 + (n - 1) * std::exp(-beta * t)));
  BetaFit f = fit_beta(informed, n);
  EXPECT_NEAR(f.beta, 1.0, 0.01);
  EXPECT_GE(f.r_squared, 0.999);
  EXPECT_FALSE(f.degenerate);
}

TEST(Fits, SingleAgentIsDegenerate) {
  EXPECT_TRUE(fit_beta({1, 1, 1}, 1).degenerate);
}

TEST(Fits, NonMonotoneCurveIsFlagged) {
  BetaFit f = fit_beta({1, 3, 8, 6, 14, 16, 16}, 16);
  EXPECT_TRUE(f.non_monotone);
}

TEST(Report, JsonAndCsvAreStable) {
  Trace t = coverage_trace(4, {1, 2, 4});
  MetricsReport r = compute_report(t, "synthetic", "GossipAugmented");
  EXPECT_EQ(report_json(r, {}), report_json(compute_report(t, "synthetic", "GossipAugmented"), {}));
  std::string csv = report_csv(r, {});
  EXPECT_EQ(csv.rfind("scenario,mode,seed,metric,value\n", 0), 0u);
  EXPECT_EQ(r.summary({}).size(), core_summary_names().size());
}

TEST(Report, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace geacl
