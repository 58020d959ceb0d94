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

#ifndef GEACL_SIMNET_HPP_
#define GEACL_SIMNET_HPP_

#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "geacl/core.hpp"
#include "geacl/dissemination.hpp"
#include "geacl/trace.hpp"

namespace geacl {

// ---------------------------------------------------------------------------
// Event queue

/// Min-queue on (tick, insertion sequence): a total, deterministic order.
template <typename E>
class EventQueue {
 public:
  struct Item {
    Tick tick;
    std::uint64_t seq;
    E event;
  };

  void push(Tick tick, E event) { heap_.push(Item{tick, next_seq_++, std::move(event)}); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  Tick next_tick() const { return heap_.top().tick; }

  Item pop() {
    Item item = std::move(const_cast<Item&>(heap_.top()));
    heap_.pop();
    return item;
  }

 private:
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.tick != b.tick) return a.tick > b.tick;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Item, std::vector<Item>, Later> heap_;
  std::uint64_t next_seq_{0};
};

// ---------------------------------------------------------------------------
// Network model

struct Topology {
  enum class Kind { Complete, RandomEdges, Grid, Explicit };

  Kind kind{Kind::Complete};
  double p{0.1};  // RandomEdges
  std::uint32_t width{10};
  std::uint32_t height{10};
  double comm_range{1.0};  // Grid default; agents may override
  std::vector<std::pair<AgentId, AgentId>> edges;  // Explicit

  static Topology complete() { return {}; }
};

std::string_view to_string(Topology::Kind k);

struct PartitionWindow {
  Tick start{0};
  Tick end{0};
  std::vector<std::vector<AgentId>> blocks;
};

struct LinkOutage {
  Tick start{0};
  Tick end{0};
  AgentId a;
  AgentId b;
};

struct FaultSchedule {
  std::vector<PartitionWindow> partitions;
  std::vector<std::pair<Tick, AgentId>> crashes;
  std::vector<Tick> joins;  // each join adds one fresh agent
  std::vector<LinkOutage> link_outages;

  /// Throws Error(kConfig) for malformed windows or overlapping blocks.
  void validate(std::size_t n_agents) const;
};

struct LatencyModel {
  enum class Kind { Constant, Uniform };

  Kind kind{Kind::Constant};
  Tick constant{1};
  Tick min_ticks{1};
  Tick max_ticks{1};

  Tick minimum() const { return kind == Kind::Constant ? constant : min_ticks; }
  Tick draw(Rng& rng) const;
};

/// Request/response traffic of the direct-messaging baseline.
struct DirectMessage {
  AgentId sender;
  std::string topic;
  bool is_reply{false};
  std::uint64_t request_id{0};
  std::vector<Envelope> envelopes;
};

std::size_t encoded_size(const DirectMessage& msg);

using NetMessage = std::variant<GossipMessage, ShuffleMessage, DirectMessage>;

struct SimConfig {
  std::uint64_t seed{1};
  std::size_t n_agents{8};
  AgentConfig agent;
  Topology topology;
  FaultSchedule faults;
  LatencyModel latency;
  double drop_p{0.0};
  Tick max_ticks{10000};
  /// BaselineDirect runs switch the whole gossip substrate off.
  bool gossip_enabled{true};
};

// ---------------------------------------------------------------------------
// Simulation

class Simulation;

/// Scenario hooks invoked from inside the event loop.
class ScenarioDriver {
 public:
  virtual ~ScenarioDriver() = default;
  virtual void on_start(Simulation&) {}
  /// Before the round's snapshot and agent rounds.
  virtual void on_round_start(Simulation&, std::uint64_t /*round*/, Tick /*now*/) {}
  /// After every alive agent has run its round.
  virtual void on_round_end(Simulation&, std::uint64_t /*round*/, Tick /*now*/) {}
  /// An envelope entered `agent`'s store from the network (New or Updated).
  virtual void on_learn(Simulation&, AgentId /*agent*/, const Envelope&, Tick /*now*/) {}
  virtual void on_commit(Simulation&, AgentId /*agent*/, const Envelope&, Tick /*now*/) {}
  virtual void on_direct(Simulation&, AgentId /*to*/, const DirectMessage&, Tick /*now*/) {}
  virtual void on_failure_detected(Simulation&, AgentId /*observer*/, AgentId /*peer*/,
                                   Tick /*now*/) {}
  virtual void on_scenario_event(Simulation&, std::uint64_t /*code*/, Tick /*now*/) {}
};

struct RunResult {
  Tick end_tick{0};
  std::uint64_t rounds{0};
  bool timed_out{false};
};

class Simulation {
 public:
  Simulation(SimConfig config, std::shared_ptr<const Signer> signer = nullptr);

  void set_driver(ScenarioDriver* driver) { driver_ = driver; }

  /// Runs until `stop` holds at a round boundary or max_ticks passes.
  /// A stop predicate that never held sets the timeout flag.
  RunResult run(const std::function<bool(const Simulation&, std::uint64_t)>& stop = {});

  // Agents -------------------------------------------------------------
  std::size_t agent_count() const { return slots_.size(); }
  std::vector<AgentId> agent_ids() const;
  std::vector<AgentId> alive_ids() const;
  bool alive(AgentId id) const;
  GossipAgent& agent(AgentId id);
  const GossipAgent& agent(AgentId id) const;

  // Scenario helpers ---------------------------------------------------
  /// Local write at `agent` that is tracked by the metrics layer.
  Envelope inject(AgentId agent, const std::string& key, Value value, PriorityClass priority,
                  std::uint32_t ttl_rounds);
  Envelope inject(AgentId agent, const std::string& key, Value value, PriorityClass priority);
  std::size_t track(const std::string& key, bool is_vector = false);
  void send_direct(AgentId from, AgentId to, DirectMessage msg, bool initiation);
  void schedule_scenario_event(Tick tick, std::uint64_t code);
  void record(TraceEvent event);
  void note(AgentId agent, std::string text);
  void scenario_metric(const std::string& name, double value);
  void decision(AgentId agent, const std::string& what, double info_age_ticks);
  /// Folds scenario environment draws into the paired-run fairness hash.
  void environment(std::uint64_t value);

  /// Grid positions (cells); only meaningful for Grid topologies.
  void set_position(AgentId id, int x, int y);
  std::pair<int, int> position(AgentId id) const;
  void set_comm_range(AgentId id, double range);
  /// Whether a message from `a` could reach `b` at `now`.
  bool linked(AgentId a, AgentId b, Tick now) const;
  std::vector<AgentId> neighbors(AgentId id, Tick now) const;
  bool partitioned(AgentId a, AgentId b, Tick now) const;

  Tick now() const { return now_; }
  std::uint64_t round() const { return round_; }
  Tick round_len() const { return config_.agent.gossip.round_len; }
  const SimConfig& config() const { return config_; }
  const Trace& trace() const { return trace_; }
  Trace& trace() { return trace_; }
  Rng& scenario_rng() { return scenario_rng_; }
  Rng& environment_rng() { return environment_rng_; }
  const Signer* signer() const { return signer_.get(); }

  /// Appends a snapshot of every tracked key (normally done at round start).
  void sample();
  /// Appends aggregate counters to the trace; called once when a run ends.
  void finalize();

 private:
  struct Slot {
    std::unique_ptr<GossipAgent> agent;
    bool alive{true};
    int x{0};
    int y{0};
    double range{1.0};
  };

  struct RoundStart {
    std::uint64_t round;
  };
  struct AgentRound {
    AgentId agent;
    std::uint64_t round;
  };
  struct Deliver {
    AgentId from;
    AgentId to;
    Tick sent;
    NetMessage msg;
  };
  struct FaultEdge {
    enum class What { Crash, Join, PartitionStart, PartitionEnd, LinkDown, LinkUp } what;
    std::uint64_t index;
  };
  struct RoundEnd {
    std::uint64_t round;
  };
  struct ScenarioEvent {
    std::uint64_t code;
  };
  using Event = std::variant<RoundStart, AgentRound, RoundEnd, Deliver, FaultEdge, ScenarioEvent>;

  AgentId add_agent();
  void bootstrap_view(AgentId id);
  void refresh_contact_view(AgentId id);
  void send(AgentId from, AgentId to, NetMessage msg, bool initiation);
  void handle(RoundStart& e);
  void handle(AgentRound& e);
  void handle(RoundEnd& e);
  void handle(Deliver& e);
  void handle(FaultEdge& e);
  void handle(ScenarioEvent& e);
  void dispatch_gossip_out(AgentId from, std::vector<Outgoing>& out, bool initiation);
  Slot& slot(AgentId id);
  const Slot& slot(AgentId id) const;

  SimConfig config_;
  std::shared_ptr<const Signer> signer_;
  ScenarioDriver* driver_{nullptr};
  std::vector<Slot> slots_;
  std::set<std::pair<AgentId, AgentId>> edges_;  // RandomEdges/Explicit, (small, large)
  EventQueue<Event> queue_;
  Rng network_rng_;
  Rng topology_rng_;
  Rng scenario_rng_;
  Rng environment_rng_;
  Trace trace_;
  Tick now_{0};
  std::uint64_t round_{0};
  std::map<std::string, std::size_t> tracked_index_;
  const std::function<bool(const Simulation&, std::uint64_t)>* stop_{nullptr};
  bool stopped_{false};
  bool started_{false};
  bool finalized_{false};
};

}  // namespace geacl

#endif  // GEACL_SIMNET_HPP_
