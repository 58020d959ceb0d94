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

#include "geacl/simnet.hpp"

#include <algorithm>
#include <cmath>

namespace geacl {

std::string_view to_string(Topology::Kind k) {
  switch (k) {
    case Topology::Kind::Complete:
      return "Complete";
    case Topology::Kind::RandomEdges:
      return "RandomEdges";
    case Topology::Kind::Grid:
      return "Grid";
    case Topology::Kind::Explicit:
      return "Explicit";
  }
  return "Complete";
}

void FaultSchedule::validate(std::size_t n_agents) const {
  auto bad = [](const std::string& why) { throw Error(Error::Code::kConfig, why); };
  for (const auto& p : partitions) {
    if (p.start >= p.end) bad("partition window needs start < end");
    std::set<AgentId> seen;
    for (const auto& block : p.blocks) {
      for (auto a : block) {
        if (!seen.insert(a).second) bad("partition blocks must be disjoint");
      }
    }
  }
  for (const auto& [tick, agent] : crashes) {
    if (agent.value == 0 || agent.value > n_agents + joins.size()) bad("crash names unknown agent");
  }
  for (const auto& o : link_outages) {
    if (o.start >= o.end) bad("link outage needs start < end");
    if (o.a == o.b) bad("link outage needs two distinct agents");
  }
}

Tick LatencyModel::draw(Rng& rng) const {
  if (kind == Kind::Constant) return constant;
  return rng.uniform_between(min_ticks, max_ticks);
}

std::size_t encoded_size(const DirectMessage& msg) {
  std::size_t n = 1 + 8 + 4 + msg.topic.size() + 1 + 8 + 4;
  for (const auto& env : msg.envelopes) n += encoded_size(env);
  return n;
}

namespace {

std::pair<AgentId, AgentId> ordered(AgentId a, AgentId b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::optional<std::size_t> tracked_at(const std::map<std::string, std::size_t>& index,
                                      const std::string& key) {
  auto it = index.find(key);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Simulation::Simulation(SimConfig config, std::shared_ptr<const Signer> signer)
    : config_(std::move(config)),
      signer_(std::move(signer)),
      network_rng_(Rng::derive(config_.seed, streams::kNetwork)),
      topology_rng_(Rng::derive(config_.seed, streams::kTopology)),
      scenario_rng_(Rng::derive(config_.seed, streams::kScenario)),
      environment_rng_(Rng::derive(config_.seed, streams::kEnvironment)) {
  if (config_.n_agents == 0) throw Error(Error::Code::kConfig, "need at least one agent");
  if (!(config_.drop_p >= 0.0 && config_.drop_p <= 1.0)) {
    throw Error(Error::Code::kConfig, "drop_p must lie in [0, 1]");
  }
  if (config_.latency.minimum() == 0 ||
      (config_.latency.kind == LatencyModel::Kind::Uniform &&
       config_.latency.max_ticks < config_.latency.min_ticks)) {
    throw Error(Error::Code::kConfig, "latency must be >= 1 tick with min <= max");
  }
  if (!config_.agent.gossip.valid()) throw Error(Error::Code::kConfig, "invalid gossip config");
  config_.faults.validate(config_.n_agents);

  trace_.seed = config_.seed;
  trace_.initial_agents = config_.n_agents;
  trace_.round_len = config_.agent.gossip.round_len;

  for (std::size_t i = 0; i < config_.n_agents; ++i) add_agent();

  const auto& topo = config_.topology;
  if (topo.kind == Topology::Kind::RandomEdges) {
    for (std::size_t i = 1; i <= config_.n_agents; ++i) {
      for (std::size_t j = i + 1; j <= config_.n_agents; ++j) {
        if (topology_rng_.bernoulli(topo.p)) edges_.insert({AgentId{i}, AgentId{j}});
      }
    }
  } else if (topo.kind == Topology::Kind::Explicit) {
    for (const auto& [a, b] : topo.edges) {
      if (a == b) throw Error(Error::Code::kConfig, "topology edges may not be self-loops");
      edges_.insert(ordered(a, b));
    }
  } else if (topo.kind == Topology::Kind::Grid) {
    if (!(topo.comm_range >= 1.0)) throw Error(Error::Code::kConfig, "grid range must be >= 1");
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      slots_[i].x = static_cast<int>(i % std::max<std::uint32_t>(1, topo.width));
      slots_[i].y = static_cast<int>(i / std::max<std::uint32_t>(1, topo.width));
      slots_[i].range = topo.comm_range;
    }
  }

  for (std::size_t i = 1; i <= config_.n_agents; ++i) bootstrap_view(AgentId{i});

  using W = FaultEdge::What;
  const auto& f = config_.faults;
  for (std::size_t i = 0; i < f.crashes.size(); ++i) queue_.push(f.crashes[i].first, FaultEdge{W::Crash, i});
  for (std::size_t i = 0; i < f.joins.size(); ++i) queue_.push(f.joins[i], FaultEdge{W::Join, i});
  for (std::size_t i = 0; i < f.partitions.size(); ++i) {
    queue_.push(f.partitions[i].start, FaultEdge{W::PartitionStart, i});
    queue_.push(f.partitions[i].end, FaultEdge{W::PartitionEnd, i});
  }
  for (std::size_t i = 0; i < f.link_outages.size(); ++i) {
    queue_.push(f.link_outages[i].start, FaultEdge{W::LinkDown, i});
    queue_.push(f.link_outages[i].end, FaultEdge{W::LinkUp, i});
  }
  queue_.push(0, RoundStart{0});
}

AgentId Simulation::add_agent() {
  const AgentId id{slots_.size() + 1};
  Slot s;
  s.agent = std::make_unique<GossipAgent>(id, config_.agent, Rng::derive(config_.seed, id.value),
                                          signer_.get());
  s.range = config_.topology.comm_range;
  slots_.push_back(std::move(s));
  return id;
}

void Simulation::bootstrap_view(AgentId id) {
  auto& a = agent(id);
  if (config_.topology.kind == Topology::Kind::Grid) {
    refresh_contact_view(id);
    return;
  }
  std::vector<AgentId> candidates;
  for (const auto& s : slots_) {
    const auto other = s.agent->id();
    if (other == id || !s.alive) continue;
    if (config_.topology.kind == Topology::Kind::Complete || edges_.contains(ordered(id, other))) {
      candidates.push_back(other);
    }
  }
  if (config_.topology.kind != Topology::Kind::Complete) {
    a.set_reachable(std::set<AgentId>(candidates.begin(), candidates.end()));
  }
  try {
    a.set_view(init_view(id, candidates, config_.agent.view_capacity, &a.rng()));
  } catch (const Error& e) {
    if (e.code() != Error::Code::kIsolatedAgent) throw;
    a.set_view(PartialView(id, config_.agent.view_capacity));
  }
}

void Simulation::refresh_contact_view(AgentId id) {
  auto& a = agent(id);
  auto peers = neighbors(id, now_);
  for (std::size_t i = 0; i + 1 < peers.size(); ++i) {
    const auto j = i + static_cast<std::size_t>(a.rng().uniform(peers.size() - i));
    std::swap(peers[i], peers[j]);
  }
  a.set_view(replace_entries(a.view(), peers));
}

// ---------------------------------------------------------------------------
// Accessors

Simulation::Slot& Simulation::slot(AgentId id) {
  if (id.value == 0 || id.value > slots_.size()) {
    throw Error(Error::Code::kInvalidArgument, "unknown agent " + std::to_string(id.value));
  }
  return slots_[id.value - 1];
}

const Simulation::Slot& Simulation::slot(AgentId id) const {
  if (id.value == 0 || id.value > slots_.size()) {
    throw Error(Error::Code::kInvalidArgument, "unknown agent " + std::to_string(id.value));
  }
  return slots_[id.value - 1];
}

std::vector<AgentId> Simulation::agent_ids() const {
  std::vector<AgentId> out;
  for (const auto& s : slots_) out.push_back(s.agent->id());
  return out;
}

std::vector<AgentId> Simulation::alive_ids() const {
  std::vector<AgentId> out;
  for (const auto& s : slots_) {
    if (s.alive) out.push_back(s.agent->id());
  }
  return out;
}

bool Simulation::alive(AgentId id) const {
  return id.value >= 1 && id.value <= slots_.size() && slots_[id.value - 1].alive;
}

GossipAgent& Simulation::agent(AgentId id) { return *slot(id).agent; }
const GossipAgent& Simulation::agent(AgentId id) const { return *slot(id).agent; }

void Simulation::set_position(AgentId id, int x, int y) {
  auto& s = slot(id);
  s.x = x;
  s.y = y;
}

std::pair<int, int> Simulation::position(AgentId id) const {
  const auto& s = slot(id);
  return {s.x, s.y};
}

void Simulation::set_comm_range(AgentId id, double range) { slot(id).range = range; }

bool Simulation::partitioned(AgentId a, AgentId b, Tick now) const {
  for (const auto& p : config_.faults.partitions) {
    if (now < p.start || now >= p.end) continue;
    int block_a = -1;
    int block_b = -1;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      const auto& blk = p.blocks[i];
      if (std::find(blk.begin(), blk.end(), a) != blk.end()) block_a = static_cast<int>(i);
      if (std::find(blk.begin(), blk.end(), b) != blk.end()) block_b = static_cast<int>(i);
    }
    if (block_a >= 0 && block_b >= 0 && block_a != block_b) return true;
  }
  return false;
}

bool Simulation::linked(AgentId a, AgentId b, Tick now) const {
  if (a == b || a.value == 0 || b.value == 0 || a.value > slots_.size() ||
      b.value > slots_.size()) {
    return false;
  }
  if (partitioned(a, b, now)) return false;
  for (const auto& o : config_.faults.link_outages) {
    if (now >= o.start && now < o.end && ordered(o.a, o.b) == ordered(a, b)) return false;
  }
  switch (config_.topology.kind) {
    case Topology::Kind::Complete:
      return true;
    case Topology::Kind::RandomEdges:
    case Topology::Kind::Explicit:
      return edges_.contains(ordered(a, b));
    case Topology::Kind::Grid: {
      const auto& sa = slot(a);
      const auto& sb = slot(b);
      const double dx = sa.x - sb.x;
      const double dy = sa.y - sb.y;
      const double r = std::min(sa.range, sb.range);
      return dx * dx + dy * dy <= r * r;
    }
  }
  return false;
}

std::vector<AgentId> Simulation::neighbors(AgentId id, Tick now) const {
  std::vector<AgentId> out;
  for (const auto& s : slots_) {
    if (s.alive && linked(id, s.agent->id(), now)) out.push_back(s.agent->id());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario helpers

std::size_t Simulation::track(const std::string& key, bool is_vector) {
  if (auto idx = tracked_at(tracked_index_, key)) return *idx;
  const auto idx = trace_.keys.size();
  trace_.keys.push_back({key, is_vector});
  tracked_index_.emplace(key, idx);
  return idx;
}

Envelope Simulation::inject(AgentId id, const std::string& key, Value value,
                            PriorityClass priority, std::uint32_t ttl_rounds) {
  const auto idx = track(key, std::holds_alternative<Embedding>(value));
  auto env = agent(id).put(key, std::move(value), priority, ttl_rounds, now_);
  record({now_, EventKind::Inject, id.value, 0, idx, static_cast<std::uint64_t>(priority),
          env.seq, 0.0, {}});
  return env;
}

Envelope Simulation::inject(AgentId id, const std::string& key, Value value,
                            PriorityClass priority) {
  return inject(id, key, std::move(value), priority, config_.agent.filter.ttl(priority));
}

void Simulation::send_direct(AgentId from, AgentId to, DirectMessage msg, bool initiation) {
  if (!alive(from)) return;
  send(from, to, NetMessage{std::move(msg)}, initiation);
}

void Simulation::schedule_scenario_event(Tick tick, std::uint64_t code) {
  queue_.push(std::max(tick, now_), ScenarioEvent{code});
}

void Simulation::record(TraceEvent event) { trace_.events.push_back(std::move(event)); }

void Simulation::note(AgentId agent, std::string text) {
  record({now_, EventKind::Note, agent.value, 0, 0, 0, 0, 0.0, std::move(text)});
}

void Simulation::scenario_metric(const std::string& name, double value) {
  record({now_, EventKind::ScenarioMetric, 0, 0, 0, 0, 0, value, name});
}

void Simulation::decision(AgentId agent, const std::string& what, double info_age_ticks) {
  record({now_, EventKind::Decision, agent.value, 0, 0, 0, 0, info_age_ticks, what});
}

void Simulation::environment(std::uint64_t value) {
  trace_.environment_hash = mix64(trace_.environment_hash ^ mix64(value));
}

// ---------------------------------------------------------------------------
// Event loop

RunResult Simulation::run(const std::function<bool(const Simulation&, std::uint64_t)>& stop) {
  if (!started_) {
    started_ = true;
    if (driver_ != nullptr) driver_->on_start(*this);
  }
  stop_ = stop ? &stop : nullptr;
  stopped_ = false;

  while (!queue_.empty() && !stopped_) {
    if (queue_.next_tick() > config_.max_ticks) break;
    auto item = queue_.pop();
    now_ = item.tick;
    std::visit([this](auto& e) { handle(e); }, item.event);
  }

  RunResult result;
  result.end_tick = now_;
  result.rounds = round_;
  result.timed_out = stop_ != nullptr && !stopped_;
  trace_.timed_out = result.timed_out;
  stop_ = nullptr;
  finalize();
  return result;
}

void Simulation::sample() {
  RoundSample s;
  s.round = round_;
  s.tick = now_;
  std::vector<const GossipAgent*> alive;
  for (const auto& slot : slots_) {
    if (!slot.alive) continue;
    s.alive.push_back(slot.agent->id().value);
    alive.push_back(slot.agent.get());
  }
  s.fingerprints.resize(trace_.keys.size());
  s.vectors.resize(trace_.keys.size());
  for (std::size_t k = 0; k < trace_.keys.size(); ++k) {
    const auto& tk = trace_.keys[k];
    auto& row = s.fingerprints[k];
    row.reserve(alive.size());
    if (tk.is_vector) s.vectors[k].resize(alive.size());
    for (std::size_t i = 0; i < alive.size(); ++i) {
      const auto* entry = alive[i]->store().get(tk.key);
      row.push_back(entry == nullptr ? 0 : value_fingerprint(*entry));
      if (tk.is_vector && entry != nullptr) {
        if (const auto* v = std::get_if<Embedding>(&entry->envelope.value)) {
          s.vectors[k][i] = v->components;
        }
      }
    }
  }
  trace_.samples.push_back(std::move(s));
}

void Simulation::handle(RoundStart& e) {
  round_ = e.round;
  if (driver_ != nullptr) driver_->on_round_start(*this, e.round, now_);
  sample();
  if (stop_ != nullptr && (*stop_)(*this, e.round)) {
    stopped_ = true;
    return;
  }
  for (const auto& s : slots_) {
    if (s.alive) queue_.push(now_, AgentRound{s.agent->id(), e.round});
  }
  queue_.push(now_, RoundEnd{e.round});
  const Tick next = now_ + round_len();
  if (next <= config_.max_ticks) queue_.push(next, RoundStart{e.round + 1});
}

void Simulation::handle(AgentRound& e) {
  if (!alive(e.agent) || !config_.gossip_enabled) return;
  if (config_.topology.kind == Topology::Kind::Grid) refresh_contact_view(e.agent);
  auto& a = agent(e.agent);
  auto out = a.on_round(e.round, now_);

  for (const auto& t : out.transitions) {
    record({now_, EventKind::Transition, e.agent.value, t.peer.value,
            static_cast<std::uint64_t>(t.from), static_cast<std::uint64_t>(t.to), 0, 0.0, {}});
    if (t.to == PeerStatus::Failed && driver_ != nullptr) {
      driver_->on_failure_detected(*this, e.agent, t.peer, now_);
    }
  }
  if (out.isolated) record({now_, EventKind::Isolated, e.agent.value, 0, 0, 0, 0, 0.0, {}});
  dispatch_gossip_out(e.agent, out.gossip, true);
  if (out.shuffle) send(e.agent, out.shuffle->to, NetMessage{std::move(out.shuffle->msg)}, true);
}

void Simulation::handle(RoundEnd& e) {
  if (driver_ != nullptr) driver_->on_round_end(*this, e.round, now_);
}

void Simulation::dispatch_gossip_out(AgentId from, std::vector<Outgoing>& out, bool initiation) {
  for (auto& o : out) {
    if (!trace_.keys.empty()) {
      for (const auto& env : o.msg.envelopes) {
        if (auto idx = tracked_at(tracked_index_, env.key)) {
          record({now_, EventKind::EnvelopeTx, from.value, o.to.value, *idx,
                  static_cast<std::uint64_t>(o.msg.kind), 0, 0.0, {}});
        }
      }
    }
    send(from, o.to, NetMessage{std::move(o.msg)}, initiation);
  }
}

void Simulation::send(AgentId from, AgentId to, NetMessage msg, bool initiation) {
  std::uint64_t channel = 0;
  std::uint64_t subtype = 0;
  std::size_t bytes = 0;
  std::size_t n_env = 0;
  if (const auto* g = std::get_if<GossipMessage>(&msg)) {
    channel = static_cast<std::uint64_t>(Channel::Gossip);
    subtype = static_cast<std::uint64_t>(g->kind);
    bytes = encoded_size(*g);
    n_env = g->envelopes.size();
  } else if (const auto* s = std::get_if<ShuffleMessage>(&msg)) {
    channel = static_cast<std::uint64_t>(Channel::Shuffle);
    subtype = s->is_reply ? 1 : 0;
    bytes = encoded_size(*s);
  } else {
    const auto& d = std::get<DirectMessage>(msg);
    channel = static_cast<std::uint64_t>(Channel::Direct);
    subtype = d.is_reply ? 1 : 0;
    bytes = encoded_size(d);
    n_env = d.envelopes.size();
  }
  record({now_, EventKind::Send, from.value, to.value, channel,
          subtype | (initiation ? kInitiationFlag : 0), bytes, static_cast<double>(n_env), {}});

  if (config_.drop_p > 0.0 && network_rng_.bernoulli(config_.drop_p)) {
    record({now_, EventKind::Drop, from.value, to.value, channel,
            static_cast<std::uint64_t>(DropReason::Random), 0, 0.0, {}});
    return;
  }
  if (!linked(from, to, now_)) {
    record({now_, EventKind::Drop, from.value, to.value, channel,
            static_cast<std::uint64_t>(DropReason::Blocked), 0, 0.0, {}});
    return;
  }
  const Tick latency = config_.latency.draw(network_rng_);
  queue_.push(now_ + latency, Deliver{from, to, now_, std::move(msg)});
}

void Simulation::handle(Deliver& e) {
  const auto channel = static_cast<std::uint64_t>(e.msg.index());
  if (!alive(e.to)) {
    record({now_, EventKind::Drop, e.from.value, e.to.value, channel,
            static_cast<std::uint64_t>(DropReason::DeadReceiver), 0, 0.0, {}});
    return;
  }
  record({now_, EventKind::Deliver, e.from.value, e.to.value, channel, 0, e.sent, 0.0, {}});

  if (auto* g = std::get_if<GossipMessage>(&e.msg)) {
    if (!config_.gossip_enabled) return;
    auto out = agent(e.to).on_gossip(*g, now_);
    if (out.protocol_error) {
      record({now_, EventKind::ProtocolError, e.to.value, e.from.value, 0, 0, 0, 0.0, {}});
      return;
    }
    for (const auto& env : out.committed) {
      const auto idx = tracked_at(tracked_index_, env.key);
      record({now_, EventKind::Commit, e.to.value, env.origin.value, idx ? *idx : kNoKey, 0, 0,
              0.0, {}});
      if (driver_ != nullptr) driver_->on_commit(*this, e.to, env, now_);
    }
    if (driver_ != nullptr) {
      for (const auto& env : out.admitted) driver_->on_learn(*this, e.to, env, now_);
    }
    dispatch_gossip_out(e.to, out.replies, false);
  } else if (auto* s = std::get_if<ShuffleMessage>(&e.msg)) {
    if (!config_.gossip_enabled) return;
    if (auto reply = agent(e.to).on_shuffle(*s)) {
      send(e.to, reply->to, NetMessage{std::move(reply->msg)}, false);
    }
  } else if (driver_ != nullptr) {
    driver_->on_direct(*this, e.to, std::get<DirectMessage>(e.msg), now_);
  }
}

void Simulation::handle(FaultEdge& e) {
  using W = FaultEdge::What;
  const auto& f = config_.faults;
  switch (e.what) {
    case W::Crash: {
      const auto id = f.crashes[e.index].second;
      if (id.value <= slots_.size() && slot(id).alive) {
        slot(id).alive = false;
        record({now_, EventKind::Crash, id.value, 0, 0, 0, 0, 0.0, {}});
      }
      break;
    }
    case W::Join: {
      const auto id = add_agent();
      if (config_.topology.kind == Topology::Kind::RandomEdges) {
        for (const auto& s : slots_) {
          const auto other = s.agent->id();
          if (other != id && topology_rng_.bernoulli(config_.topology.p)) {
            edges_.insert(ordered(id, other));
          }
        }
      }
      bootstrap_view(id);
      record({now_, EventKind::Join, id.value, 0, 0, 0, 0, 0.0, {}});
      break;
    }
    case W::PartitionStart:
      record({now_, EventKind::PartitionStart, 0, 0, e.index, 0, 0, 0.0, {}});
      break;
    case W::PartitionEnd:
      record({now_, EventKind::PartitionEnd, 0, 0, e.index, 0, 0, 0.0, {}});
      break;
    case W::LinkDown:
    case W::LinkUp: {
      const auto& o = f.link_outages[e.index];
      record({now_, e.what == W::LinkDown ? EventKind::LinkDown : EventKind::LinkUp, o.a.value,
              o.b.value, e.index, 0, 0, 0.0, {}});
      break;
    }
  }
}

void Simulation::handle(ScenarioEvent& e) {
  if (driver_ != nullptr) driver_->on_scenario_event(*this, e.code, now_);
}

void Simulation::finalize() {
  if (finalized_) return;
  finalized_ = true;
  AgentCounters total;
  for (const auto& s : slots_) {
    const auto& c = s.agent->counters();
    total.apply_new += c.apply_new;
    total.apply_updated += c.apply_updated;
    total.duplicates += c.duplicates;
    total.rejected += c.rejected;
    total.verify_fail += c.verify_fail;
    total.protocol_error += c.protocol_error;
    total.held += c.held;
    total.corroboration_commits += c.corroboration_commits;
    total.corroboration_expired += c.corroboration_expired;
    total.critical_overflow += c.critical_overflow;
    total.isolated_rounds += c.isolated_rounds;
  }
  const std::pair<const char*, std::uint64_t> rows[] = {
      {"apply_new", total.apply_new},
      {"apply_updated", total.apply_updated},
      {"duplicates", total.duplicates},
      {"rejected", total.rejected},
      {"verify_fail", total.verify_fail},
      {"protocol_error", total.protocol_error},
      {"held", total.held},
      {"corroboration_commits", total.corroboration_commits},
      {"corroboration_expired", total.corroboration_expired},
      {"critical_overflow", total.critical_overflow},
      {"isolated_rounds", total.isolated_rounds},
  };
  for (const auto& [name, value] : rows) {
    record({now_, EventKind::Counter, 0, 0, 0, 0, value, 0.0, name});
  }
}

}  // namespace geacl
