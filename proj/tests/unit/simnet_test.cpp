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

#include <chrono>
#include <cmath>

#include "geacl/metrics.hpp"
#include "geacl/simnet.hpp"

namespace geacl {
namespace {

SimConfig base_config(std::size_t n, std::uint64_t seed = 1) {
  SimConfig c;
  c.seed = seed;
  c.n_agents = n;
  c.agent.heartbeats = false;
  c.max_ticks = 400;
  return c;
}

std::vector<AgentId> range_ids(std::uint64_t lo, std::uint64_t hi) {
  std::vector<AgentId> out;
  for (std::uint64_t i = lo; i <= hi; ++i) out.push_back(AgentId{i});
  return out;
}

TEST(EventQueue, TiesPopInInsertionOrder) {
  EventQueue<int> q;
  q.push(5, 1);
  q.push(3, 2);
  q.push(5, 3);
  EXPECT_EQ(q.pop().event, 2);
  EXPECT_EQ(q.pop().event, 1);
  EXPECT_EQ(q.pop().event, 3);
}

TEST(Simnet, ConstantLatency) {
  SimConfig c = base_config(4);
  c.latency.constant = 3;
  Simulation sim(c);
  sim.inject(AgentId{1}, "k", 1.0, PriorityClass::Routine);
  sim.run([](const Simulation&, std::uint64_t r) { return r >= 5; });
  std::size_t delivered = 0;
  for (const auto& e : sim.trace().events) {
    if (e.kind != EventKind::Deliver) continue;
    EXPECT_EQ(e.tick, e.c + 3);
    ++delivered;
  }
  EXPECT_GT(delivered, 0u);
}

TEST(Simnet, PartitionBlocksCrossTraffic) {
  SimConfig c = base_config(64);
  c.faults.partitions.push_back({0, 200, {range_ids(1, 32), range_ids(33, 64)}});
  Simulation sim(c);
  EXPECT_TRUE(sim.partitioned(AgentId{5}, AgentId{40}, 10));
  EXPECT_FALSE(sim.linked(AgentId{5}, AgentId{40}, 10));
  EXPECT_TRUE(sim.linked(AgentId{5}, AgentId{6}, 10));
  EXPECT_TRUE(sim.linked(AgentId{5}, AgentId{40}, 200));
}

TEST(Simnet, HealedPartitionDeliversOnlyAfterHeal) {
  SimConfig c = base_config(16);
  const Tick heal = 150;
  c.faults.partitions.push_back({20, heal, {range_ids(1, 8), range_ids(9, 16)}});
  Simulation sim(c);
  sim.run([](const Simulation&, std::uint64_t r) { return r >= 30; });
  auto block = [](std::uint64_t id) { return id <= 8 ? 0 : 1; };
  bool crossed = false;
  for (const auto& e : sim.trace().events) {
    if (e.kind != EventKind::Deliver || block(e.agent) == block(e.peer)) continue;
    if (e.c >= 20) {
      EXPECT_GE(e.tick, heal);
      crossed = true;
    }
  }
  EXPECT_TRUE(crossed);
}

TEST(Simnet, RandomDropRate) {
  SimConfig c = base_config(32);
  c.drop_p = 0.3;
  Simulation sim(c);
  sim.run([](const Simulation&, std::uint64_t r) { return r >= 40; });
  double sends = 0, drops = 0;
  for (const auto& e : sim.trace().events) {
    if (e.kind == EventKind::Send) ++sends;
    if (e.kind == EventKind::Drop && e.b == static_cast<std::uint64_t>(DropReason::Random)) ++drops;
  }
  ASSERT_GE(sends, 2000);
  const double sigma = std::sqrt(0.3 * 0.7 / sends);
  EXPECT_NEAR(drops / sends, 0.3, 3 * sigma);
}

TEST(Simnet, SameSeedSameTrace) {
  auto run = [](std::uint64_t seed) {
    SimConfig c = base_config(24, seed);
    c.drop_p = 0.1;
    c.latency = {LatencyModel::Kind::Uniform, 1, 1, 4};
    Simulation sim(c);
    sim.track("k");
    sim.inject(AgentId{3}, "k", 2.0, PriorityClass::High);
    sim.run();
    return trace_hash(sim.trace());
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Simnet, TimeoutFlagWhenPredicateNeverHolds) {
  SimConfig c = base_config(4);
  c.max_ticks = 100;
  Simulation sim(c);
  RunResult r = sim.run([](const Simulation&, std::uint64_t) { return false; });
  EXPECT_TRUE(r.timed_out);
  EXPECT_TRUE(sim.trace().timed_out);
}

TEST(Simnet, CrashedAgentStopsReceiving) {
  SimConfig c = base_config(8);
  c.faults.crashes.push_back({50, AgentId{2}});
  Simulation sim(c);
  sim.run([](const Simulation&, std::uint64_t r) { return r >= 20; });
  EXPECT_FALSE(sim.alive(AgentId{2}));
  EXPECT_EQ(sim.alive_ids().size(), 7u);
  for (const auto& e : sim.trace().events) {
    if (e.kind == EventKind::Deliver && e.peer == 2) EXPECT_LT(e.tick, 50u);
  }
}

TEST(Simnet, FaultScheduleValidation) {
  FaultSchedule f;
  f.partitions.push_back({10, 5, {range_ids(1, 2), range_ids(3, 4)}});
  EXPECT_THROW(f.validate(4), Error);
  FaultSchedule overlap;
  overlap.partitions.push_back({0, 5, {range_ids(1, 3), range_ids(3, 4)}});
  EXPECT_THROW(overlap.validate(4), Error);
}

TEST(Simnet, PermanentPartitionBoundsCoverage) {
  SimConfig c = base_config(64);
  c.max_ticks = 1000;
  c.faults.partitions.push_back({0, 100000, {range_ids(1, 40), range_ids(41, 64)}});
  Simulation sim(c);
  sim.track("k");
  sim.inject(AgentId{1}, "k", 1.0, PriorityClass::Routine, 200);
  sim.run([](const Simulation&, std::uint64_t r) { return r >= 60; });
  EXPECT_DOUBLE_EQ(propagation_coverage(sim.trace(), 0, 50), 0.625);
  EXPECT_DOUBLE_EQ(propagation_coverage(sim.trace(), 0, 60), 0.625);
}

TEST(Simnet, SixtyFourAgentsRunQuickly) {
  SimConfig c = base_config(64);
  c.max_ticks = 5000;
  c.agent.heartbeats = true;
  Simulation sim(c);
  sim.track("k");
  sim.inject(AgentId{1}, "k", 1.0, PriorityClass::Routine);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r = sim.run();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(r.rounds, 400u);
  EXPECT_LT(secs, 30.0);
}

}  // namespace
}  // namespace geacl
