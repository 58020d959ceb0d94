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

#ifndef GEACL_SCENARIOS_HPP_
#define GEACL_SCENARIOS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "geacl/metrics.hpp"
#include "geacl/simnet.hpp"

namespace geacl {

enum class RunMode { BaselineDirect, GossipAugmented };

std::string_view to_string(RunMode m);
std::optional<RunMode> parse_run_mode(std::string_view name);

enum class ScenarioKind { Synthetic, Factory, Disaster, Walkthrough };

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario(std::string_view name);

/// Rumor-spreading workload on an arbitrary population.
struct SyntheticParams {
  std::size_t injections{1};  // keys "syn/<i>", one writer each
  std::uint64_t inject_round{0};
  std::optional<std::uint64_t> inject_agent;  // drawn per key when unset
  PriorityClass priority{PriorityClass::Routine};
  std::uint32_t ttl_rounds{64};
  /// Competing writes to "burst/<k>" keys at inject_round: every agent writes
  /// each key once before any agent writes twice.
  std::size_t burst_writes{0};
  std::size_t burst_keys{1};
  std::uint64_t horizon_rounds{200};
  /// Stop once every tracked key is everywhere and D = 0 (after min_rounds).
  bool stop_when_converged{true};
  std::uint64_t min_rounds{0};
};

/// Agents publishing a shared false claim (same key and value).
struct AdversaryParams {
  std::vector<std::uint64_t> agents;
  std::uint64_t inject_round{1};
  std::string claim_key{"claim/false"};
  PriorityClass priority{PriorityClass::High};
};

struct SlowdownEvent {
  std::uint64_t round{0};
  std::uint64_t agent{0};
  double factor{0.5};
};

struct MachineFailure {
  std::uint64_t round{0};
  std::uint64_t agent{0};
};

struct FactoryParams {
  std::size_t machines{5};
  std::uint64_t coordinator{1};  // baseline star centre
  std::uint64_t poll_interval_rounds{5};
  double arrival_rate{0.05};     // tasks per tick, Bernoulli
  double service_per_round{0.2};  // tasks per round at speed 100
  double base_speed{100.0};
  std::uint64_t arm{1};
  std::uint64_t material{2};
  std::uint64_t inspector{3};
  std::uint64_t planner{4};
  std::uint64_t workstation{5};  // "WS4" in the alert
  std::uint64_t defect_spike_round{20};
  std::uint64_t spike_jitter_rounds{5};
  std::uint64_t load_shock_round{40};
  std::uint64_t load_shock_tasks{20};
  std::uint64_t load_shock_agent{2};
  std::uint64_t redistribution_window_rounds{10};
  std::uint64_t offload_threshold{2};
  std::vector<SlowdownEvent> slowdowns;
  std::vector<MachineFailure> failures{{70, 5}};
  std::uint64_t horizon_rounds{100};
};

struct LinkOutageSpec {
  std::uint64_t start_round{0};
  std::uint64_t end_round{0};
  std::uint64_t a{0};
  std::uint64_t b{0};
};

struct DisasterParams {
  std::size_t drones{4};
  std::size_t robots{6};
  std::uint32_t width{20};
  std::uint32_t height{20};
  std::uint32_t drone_speed{2};
  double drone_range{4.0};
  std::uint32_t robot_speed{1};
  double robot_range{2.0};
  std::uint32_t sensing_range{1};
  std::size_t hazards{12};
  std::size_t survivors{6};
  std::size_t blocked_cells{30};
  std::size_t waypoints{6};  // per patrol route
  std::size_t random_outages{4};
  std::uint64_t outage_rounds{15};
  std::vector<LinkOutageSpec> outages;
  /// Baseline partners; empty means a ring over agent ids.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> baseline_pairs;
  std::uint64_t horizon_rounds{200};
};

struct RunConfig {
  ScenarioKind scenario{ScenarioKind::Synthetic};
  RunMode mode{RunMode::GossipAugmented};
  SimConfig sim;
  AdversaryParams adversaries;
  SyntheticParams synthetic;
  FactoryParams factory;
  DisasterParams disaster;
};

/// Defaults for a scenario before any config file is applied.
RunConfig default_config(ScenarioKind kind);

struct ScenarioOutcome {
  Trace trace;
  MetricsReport report;
  std::vector<std::string> metric_names;  // scenario-specific summary columns
};

/// Scenario-specific metric names; fixed per scenario.
const std::vector<std::string>& scenario_metric_names(ScenarioKind kind);

ScenarioOutcome run_synthetic(const RunConfig& config);
ScenarioOutcome run_factory(const RunConfig& config);
ScenarioOutcome run_disaster(const RunConfig& config);

struct WalkthroughStep {
  std::string id;
  bool passed{false};
  std::string detail;
};

struct WalkthroughResult {
  ScenarioOutcome outcome;
  std::vector<WalkthroughStep> steps;
  bool passed() const;
};

/// Four-agent factory replay with per-step checks. Steps are evaluated, not
/// thrown; callers decide how to fail.
WalkthroughResult run_walkthrough(std::uint64_t seed = 1);

/// Dispatches on config.scenario (the walkthrough ignores most settings).
ScenarioOutcome run_scenario(const RunConfig& config);

}  // namespace geacl

#endif  // GEACL_SCENARIOS_HPP_
