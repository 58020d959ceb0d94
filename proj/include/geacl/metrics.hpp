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

#ifndef GEACL_METRICS_HPP_
#define GEACL_METRICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geacl/trace.hpp"

namespace geacl {

// ---------------------------------------------------------------------------
// Fits

struct LineFit {
  double intercept{0.0};
  double slope{0.0};
  double r_squared{0.0};
  std::size_t points{0};
};

/// Ordinary least squares y = a + b x. R² is 1 for a perfect fit and for
/// constant y fitted exactly.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct BetaFit {
  double beta{0.0};
  double r_squared{0.0};
  bool degenerate{false};    // N <= 1 or fewer than 3 points
  bool non_monotone{false};  // fitted on the running-max envelope
  /// (N - I(t)) / N for each point of the fitted curve.
  std::vector<double> uninformed_fraction;
};

/// Least-squares fit of I(t) = N / (1 + (N-1) e^{-beta t}) to informed
/// counts sampled at t = 0, 1, 2, ...
BetaFit fit_beta(const std::vector<double>& informed, double n);

struct EtaFit {
  std::optional<double> eta;       // absent when D never exceeds 0
  double r_squared{0.0};           // of log D(t) against t over D > 0
  bool converged_at_start{false};
  std::size_t pairs{0};            // consecutive pairs used
};

/// eta_hat = 1 - geometric mean of D(t+1)/D(t) over consecutive pairs where
/// both values are positive.
EtaFit estimate_eta(const std::vector<double>& d);

// ---------------------------------------------------------------------------
// Trace-level metrics

/// Per-key divergence distance contributed by a pair of agents.
double pair_distance(std::uint64_t fa, std::uint64_t fb, const std::vector<double>* va,
                     const std::vector<double>* vb, bool is_vector);
double cosine_distance(const std::vector<double>& a, const std::vector<double>& b);

/// D over the given tracked keys (all when empty) for one snapshot.
double semantic_divergence(const Trace& trace, const RoundSample& sample,
                           const std::vector<std::size_t>& keys = {});
std::vector<double> divergence_series(const Trace& trace, const std::vector<std::size_t>& keys = {});

struct KeyPropagation {
  std::string key;
  std::size_t key_index{0};
  std::uint64_t injection_round{0};
  std::uint64_t final_fingerprint{0};
  /// informed[j] = alive agents holding the final value j rounds after injection.
  std::vector<std::uint64_t> informed;
  std::vector<std::uint64_t> alive;
  std::optional<std::uint64_t> pl;   // rounds, q = 0.95
  std::optional<std::uint64_t> fct;  // rounds
  std::optional<std::uint64_t> dw;   // rounds
  double final_coverage{0.0};
  std::uint64_t transmissions{0};
  std::optional<double> ro;
};

/// Index of the first sample at or after the key's injection.
std::uint64_t injection_round(const Trace& trace, std::size_t key);
/// Most common non-absent fingerprint at the last sample (ties -> smaller).
std::uint64_t final_fingerprint(const Trace& trace, std::size_t key);

KeyPropagation key_propagation(const Trace& trace, std::size_t key);
std::optional<std::uint64_t> propagation_latency(const Trace& trace, std::size_t key,
                                                 double q = 0.95);
std::optional<std::uint64_t> full_convergence_time(const Trace& trace, std::size_t key);
std::optional<std::uint64_t> divergence_window(const Trace& trace, std::size_t key);
/// Informed fraction at the sample for absolute round `deadline` (clamped).
double propagation_coverage(const Trace& trace, std::size_t key, std::uint64_t deadline);
std::optional<double> redundancy_overhead(const Trace& trace, std::size_t key);

struct MparPoint {
  std::uint64_t round{0};
  double initiations{0.0};  // gossip messages initiated per alive agent
  double replies{0.0};
};
std::vector<MparPoint> mpar(const Trace& trace);

struct FailureStats {
  std::uint64_t crashes{0};
  std::uint64_t expected_detections{0};
  std::uint64_t detections{0};
  std::uint64_t false_confirmations{0};
  std::optional<double> mean_rounds;  // per (crash, observer) detection delay
  std::optional<double> max_rounds;   // crash -> last live observer marks Failed
};
FailureStats failure_propagation_delay(const Trace& trace);

/// Mean Decision age (ticks); absent without decisions.
std::optional<double> staleness_index(const Trace& trace);
/// Injected tracked keys that reached every agent alive at the end.
std::optional<double> availability_under_churn(const Trace& trace);
/// Keys injected before the last partition healed that reached every alive
/// agent by the end of the run.
std::optional<double> network_partition_recovery(const Trace& trace);
/// Rounds after the last heal until every pre-heal key was everywhere.
std::optional<std::uint64_t> partition_recovery_rounds(const Trace& trace);
/// Mean final coverage over tracked keys.
std::optional<double> partition_resilience(const Trace& trace);

// ---------------------------------------------------------------------------
// Report

struct TrafficTotals {
  std::uint64_t messages{0};
  std::uint64_t bytes{0};
  std::uint64_t gossip_messages{0};
  std::uint64_t gossip_bytes{0};
  std::uint64_t shuffle_messages{0};
  std::uint64_t direct_messages{0};
  std::uint64_t direct_bytes{0};
  std::uint64_t initiations{0};
  std::uint64_t replies{0};
  std::uint64_t envelope_transmissions{0};
  std::uint64_t dropped{0};
  std::uint64_t partition_blocked{0};
  std::uint64_t dead_receiver{0};
};
TrafficTotals traffic(const Trace& trace);

struct MetricsReport {
  std::string scenario;
  std::string mode;
  std::string protocol;  // gossip mode name, or "Direct" for baseline runs
  std::uint64_t seed{0};
  bool timed_out{false};
  std::string trace_hash;
  std::uint64_t environment_hash{0};
  std::uint64_t rounds{0};

  std::vector<KeyPropagation> keys;
  std::vector<double> divergence;
  EtaFit eta;
  std::optional<BetaFit> beta;  // first tracked key
  std::vector<MparPoint> mpar_series;
  double mpar_initiations{0.0};
  double mpar_replies{0.0};
  TrafficTotals traffic;
  FailureStats failures;
  std::optional<double> staleness;
  std::optional<double> auc;
  std::optional<double> npr;
  std::optional<std::uint64_t> npr_rounds;
  std::optional<double> partition_resilience;
  std::optional<double> sde_proxy;
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, double> scenario_metrics;

  /// Fixed-order scalar summary: names depend only on `scenario_metric_names`.
  std::vector<std::pair<std::string, std::optional<double>>> summary(
      const std::vector<std::string>& scenario_metric_names) const;
};

/// Every field is a pure function of the trace.
MetricsReport compute_report(const Trace& trace, const std::string& scenario,
                             const std::string& mode);

/// Core summary column names (before scenario-specific ones).
const std::vector<std::string>& core_summary_names();

/// Full report as pretty-printed JSON.
std::string report_json(const MetricsReport& report,
                        const std::vector<std::string>& scenario_metric_names);
/// Long-format CSV: header "scenario,mode,seed,metric,value", one row per
/// summary metric; absent values are empty.
std::string report_csv(const MetricsReport& report,
                       const std::vector<std::string>& scenario_metric_names,
                       bool with_header = true);
/// Shortest round-trip decimal text for a double (shared by JSON and CSV).
std::string format_number(double v);

}  // namespace geacl

#endif  // GEACL_METRICS_HPP_
