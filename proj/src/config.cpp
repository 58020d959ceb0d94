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

#include "geacl/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace geacl {

using nlohmann::json;

std::map<std::string, std::size_t> key_lines(const std::string& text) {
  struct Frame {
    bool object;
    std::string key;
    std::size_t index;
    bool expect_key;
  };
  std::map<std::string, std::size_t> out;
  std::vector<Frame> stack;
  std::size_t line = 1;

  auto path_of = [&]() {
    std::string p;
    for (const auto& f : stack) {
      if (f.object) {
        if (!p.empty()) p += '.';
        p += f.key;
      } else {
        p += '[' + std::to_string(f.index) + ']';
      }
    }
    return p;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      const std::size_t start_line = line;
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          s += text[++i];
        } else {
          if (text[i] == '\n') ++line;
          s += text[i];
        }
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        out.emplace(path_of(), start_line);
      }
    } else if (c == '{') {
      stack.push_back({true, {}, 0, true});
    } else if (c == '[') {
      stack.push_back({false, {}, 0, false});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',' && !stack.empty()) {
      if (stack.back().object) {
        stack.back().expect_key = true;
      } else {
        ++stack.back().index;
      }
    }
  }
  return out;
}

namespace {

struct Context {
  std::string source;
  std::map<std::string, std::size_t> lines;
  std::set<std::string> overridden;

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::string where = source;
    if (overridden.contains(path)) {
      where = "--override " + path;
    } else if (auto it = lines.find(path); it != lines.end()) {
      where += ":" + std::to_string(it->second);
    } else {
      // Nearest enclosing field that has a line.
      std::string p = path;
      while (!p.empty()) {
        const auto cut = p.find_last_of(".[");
        p = cut == std::string::npos ? std::string() : p.substr(0, cut);
        if (auto up = lines.find(p); up != lines.end()) {
          where += ":" + std::to_string(up->second);
          break;
        }
      }
    }
    throw Error(Error::Code::kConfig, where + ": " + what);
  }
};

std::string join(const std::string& base, const std::string& name) {
  return base.empty() ? name : base + "." + name;
}

class Reader {
 public:
  Reader(const json& j, std::string path, const Context& ctx)
      : j_(j), path_(std::move(path)), ctx_(ctx) {
    if (!j_.is_object()) ctx_.fail(path_, "expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) ctx_.fail(join(path_, k), "unknown field '" + join(path_, k) + "'");
    }
  }

  bool has(const std::string& name) {
    seen_.insert(name);
    return j_.contains(name);
  }
  const json& at(const std::string& name) { return j_.at(name); }
  std::string path(const std::string& name) const { return join(path_, name); }
  const Context& ctx() const { return ctx_; }

  template <typename T, typename Convert>
  void with(const std::string& name, T& out, Convert convert) {
    if (has(name)) out = convert(at(name), path(name), ctx_);
  }

 private:
  const json& j_;
  std::string path_;
  const Context& ctx_;
  std::set<std::string> seen_;
};

std::uint64_t as_u64(const json& j, const std::string& p, const Context& c) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  c.fail(p, "'" + p + "' must be a non-negative integer");
}

std::uint32_t as_u32(const json& j, const std::string& p, const Context& c) {
  const auto v = as_u64(j, p, c);
  if (v > 0xFFFFFFFFULL) c.fail(p, "'" + p + "' is out of range");
  return static_cast<std::uint32_t>(v);
}

std::size_t as_size(const json& j, const std::string& p, const Context& c) {
  return static_cast<std::size_t>(as_u64(j, p, c));
}

double as_double(const json& j, const std::string& p, const Context& c) {
  if (!j.is_number()) c.fail(p, "'" + p + "' must be a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& p, const Context& c) {
  if (!j.is_boolean()) c.fail(p, "'" + p + "' must be true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& p, const Context& c) {
  if (!j.is_string()) c.fail(p, "'" + p + "' must be a string");
  return j.get<std::string>();
}

PriorityClass as_priority(const json& j, const std::string& p, const Context& c) {
  if (auto v = parse_priority(as_string(j, p, c))) return *v;
  c.fail(p, "'" + p + "' must be one of Low, Routine, High, Critical");
}

GossipMode as_gossip_mode(const json& j, const std::string& p, const Context& c) {
  if (auto v = parse_gossip_mode(as_string(j, p, c))) return *v;
  c.fail(p, "'" + p + "' must be one of Push, Pull, PushPull, AntiEntropyOnly");
}

const json& as_array(const json& j, const std::string& p, const Context& c) {
  if (!j.is_array()) c.fail(p, "'" + p + "' must be an array");
  return j;
}

template <typename T, typename Convert>
std::vector<T> as_list(const json& j, const std::string& p, const Context& c, Convert convert) {
  std::vector<T> out;
  const auto& arr = as_array(j, p, c);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(convert(arr[i], p + "[" + std::to_string(i) + "]", c));
  }
  return out;
}

std::array<double, 4> as_priority_doubles(const json& j, const std::string& p, const Context& c,
                                          std::array<double, 4> out) {
  Reader r(j, p, c);
  for (auto prio : kAllPriorities) {
    r.with(std::string(to_string(prio)), out[priority_index(prio)], as_double);
  }
  return out;
}

std::array<std::uint32_t, 4> as_priority_u32(const json& j, const std::string& p,
                                             const Context& c, std::array<std::uint32_t, 4> out) {
  Reader r(j, p, c);
  for (auto prio : kAllPriorities) {
    r.with(std::string(to_string(prio)), out[priority_index(prio)], as_u32);
  }
  return out;
}

void read_gossip(Reader& top, GossipConfig& g) {
  if (!top.has("gossip")) return;
  Reader r(top.at("gossip"), top.path("gossip"), top.ctx());
  r.with("mode", g.mode, as_gossip_mode);
  r.with("fanout", g.fanout, as_u32);
  r.with("round_len", g.round_len, as_u64);
  r.with("suppression_k", g.suppression_k, as_u32);
  r.with("delta_cap", g.delta_cap, as_u32);
  r.with("critical_suppression_multiplier", g.critical_suppression_multiplier, as_u32);
  r.with("repair_interval", g.repair_interval, as_u32);
}

void read_filter(Reader& top, AgentConfig& a) {
  if (!top.has("filter")) return;
  Reader r(top.at("filter"), top.path("filter"), top.ctx());
  r.with("enabled", a.filter_enabled, as_bool);
  r.with("gamma", a.filter.gamma, as_double);
  r.with("budget", a.filter.budget, as_size);
  if (r.has("weights")) {
    a.filter.priority_weight =
        as_priority_doubles(r.at("weights"), r.path("weights"), r.ctx(), a.filter.priority_weight);
  }
  if (r.has("ttl_rounds")) {
    a.filter.ttl_rounds =
        as_priority_u32(r.at("ttl_rounds"), r.path("ttl_rounds"), r.ctx(), a.filter.ttl_rounds);
  }
}

void read_health(Reader& top, AgentConfig& a) {
  if (!top.has("health")) return;
  Reader r(top.at("health"), top.path("health"), top.ctx());
  r.with("heartbeats", a.heartbeats, as_bool);
  r.with("t_suspect", a.health.t_suspect, as_u32);
  r.with("t_confirm", a.health.t_confirm, as_u32);
  r.with("ttl_margin", a.health.ttl_margin, as_u32);
}

void read_membership(Reader& top, AgentConfig& a) {
  if (!top.has("membership")) return;
  Reader r(top.at("membership"), top.path("membership"), top.ctx());
  r.with("view_capacity", a.view_capacity, as_size);
  r.with("shuffle_len", a.shuffle_len, as_size);
  r.with("shuffle_enabled", a.shuffle_enabled, as_bool);
  r.with("blend_alpha", a.blend_alpha, as_double);
}

void read_trust(Reader& top, RunConfig& cfg) {
  if (!top.has("trust")) return;
  auto& t = cfg.sim.agent.trust;
  Reader r(top.at("trust"), top.path("trust"), top.ctx());
  r.with("signing", t.signing, as_bool);
  r.with("reputation", t.reputation, as_bool);
  r.with("reputation_biased_sampling", t.reputation_biased_sampling, as_bool);
  r.with("publish_interval", t.publish_interval, as_u32);
  if (r.has("corroboration")) {
    Reader c(r.at("corroboration"), r.path("corroboration"), r.ctx());
    c.with("enabled", t.corroboration.enabled, as_bool);
    c.with("k", t.corroboration.k, as_u32);
    c.with("applies_to", t.corroboration.applies_to, as_priority);
    c.with("timeout_rounds", t.corroboration.timeout_rounds, as_u32);
  }
  if (r.has("reputation_params")) {
    Reader c(r.at("reputation_params"), r.path("reputation_params"), r.ctx());
    c.with("prior", t.params.prior, as_double);
    c.with("verify_fail_factor", t.params.verify_fail_factor, as_double);
    c.with("expired_sole_source_factor", t.params.expired_sole_source_factor, as_double);
    c.with("confirm_bonus", t.params.confirm_bonus, as_double);
  }
  if (r.has("adversaries")) {
    Reader c(r.at("adversaries"), r.path("adversaries"), r.ctx());
    auto& adv = cfg.adversaries;
    if (c.has("agents")) adv.agents = as_list<std::uint64_t>(c.at("agents"), c.path("agents"), c.ctx(), as_u64);
    c.with("inject_round", adv.inject_round, as_u64);
    c.with("claim_key", adv.claim_key, as_string);
    c.with("priority", adv.priority, as_priority);
  }
}

void read_network(Reader& top, SimConfig& sim) {
  if (!top.has("network")) return;
  Reader r(top.at("network"), top.path("network"), top.ctx());
  r.with("drop_p", sim.drop_p, as_double);
  if (r.has("topology")) {
    Reader t(r.at("topology"), r.path("topology"), r.ctx());
    auto& topo = sim.topology;
    if (t.has("kind")) {
      const auto k = as_string(t.at("kind"), t.path("kind"), t.ctx());
      if (k == "Complete") {
        topo.kind = Topology::Kind::Complete;
      } else if (k == "RandomEdges") {
        topo.kind = Topology::Kind::RandomEdges;
      } else if (k == "Grid") {
        topo.kind = Topology::Kind::Grid;
      } else if (k == "Explicit") {
        topo.kind = Topology::Kind::Explicit;
      } else {
        t.ctx().fail(t.path("kind"), "topology kind must be Complete, RandomEdges, Grid or Explicit");
      }
    }
    t.with("p", topo.p, as_double);
    t.with("width", topo.width, as_u32);
    t.with("height", topo.height, as_u32);
    t.with("comm_range", topo.comm_range, as_double);
    if (t.has("edges")) {
      topo.edges.clear();
      const auto& arr = as_array(t.at("edges"), t.path("edges"), t.ctx());
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = t.path("edges") + "[" + std::to_string(i) + "]";
        const auto ids = as_list<std::uint64_t>(arr[i], p, t.ctx(), as_u64);
        if (ids.size() != 2) t.ctx().fail(p, "each edge is a pair of agent ids");
        topo.edges.emplace_back(AgentId{ids[0]}, AgentId{ids[1]});
      }
    }
  }
  if (r.has("latency")) {
    Reader l(r.at("latency"), r.path("latency"), r.ctx());
    auto& lat = sim.latency;
    if (l.has("kind")) {
      const auto k = as_string(l.at("kind"), l.path("kind"), l.ctx());
      if (k == "Constant") {
        lat.kind = LatencyModel::Kind::Constant;
      } else if (k == "Uniform") {
        lat.kind = LatencyModel::Kind::Uniform;
      } else {
        l.ctx().fail(l.path("kind"), "latency kind must be Constant or Uniform");
      }
    }
    l.with("constant", lat.constant, as_u64);
    l.with("min_ticks", lat.min_ticks, as_u64);
    l.with("max_ticks", lat.max_ticks, as_u64);
  }
}

std::vector<AgentId> as_block(const json& j, const std::string& p, const Context& c) {
  std::vector<AgentId> out;
  if (j.is_object()) {
    Reader r(j, p, c);
    std::uint64_t from = 0;
    std::uint64_t to = 0;
    if (!r.has("from") || !r.has("to")) c.fail(p, "a block range needs 'from' and 'to'");
    from = as_u64(r.at("from"), r.path("from"), c);
    to = as_u64(r.at("to"), r.path("to"), c);
    if (from == 0 || to < from) c.fail(p, "block range needs 1 <= from <= to");
    for (auto i = from; i <= to; ++i) out.push_back(AgentId{i});
    return out;
  }
  for (auto v : as_list<std::uint64_t>(j, p, c, as_u64)) out.push_back(AgentId{v});
  return out;
}

// Fault times are written in rounds and stored in ticks.
void read_faults(Reader& top, SimConfig& sim) {
  if (!top.has("faults")) return;
  const Tick L = sim.agent.gossip.round_len;
  Reader r(top.at("faults"), top.path("faults"), top.ctx());
  auto& f = sim.faults;
  if (r.has("partitions")) {
    f.partitions.clear();
    const auto& arr = as_array(r.at("partitions"), r.path("partitions"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = r.path("partitions") + "[" + std::to_string(i) + "]";
      Reader w(arr[i], p, r.ctx());
      PartitionWindow win;
      std::uint64_t start = 0;
      std::uint64_t end = 0;
      w.with("start_round", start, as_u64);
      w.with("end_round", end, as_u64);
      win.start = start * L;
      win.end = end * L;
      if (w.has("blocks")) {
        const auto& blocks = as_array(w.at("blocks"), w.path("blocks"), w.ctx());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          win.blocks.push_back(as_block(blocks[b], w.path("blocks") + "[" + std::to_string(b) + "]", w.ctx()));
        }
      }
      f.partitions.push_back(std::move(win));
    }
  }
  if (r.has("crashes")) {
    f.crashes.clear();
    const auto& arr = as_array(r.at("crashes"), r.path("crashes"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader w(arr[i], r.path("crashes") + "[" + std::to_string(i) + "]", r.ctx());
      std::uint64_t round = 0;
      std::uint64_t agent = 0;
      w.with("round", round, as_u64);
      w.with("agent", agent, as_u64);
      f.crashes.emplace_back(round * L, AgentId{agent});
    }
  }
  if (r.has("joins")) {
    f.joins.clear();
    for (auto round : as_list<std::uint64_t>(r.at("joins"), r.path("joins"), r.ctx(), as_u64)) {
      f.joins.push_back(round * L);
    }
  }
  if (r.has("link_outages")) {
    f.link_outages.clear();
    const auto& arr = as_array(r.at("link_outages"), r.path("link_outages"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader w(arr[i], r.path("link_outages") + "[" + std::to_string(i) + "]", r.ctx());
      std::uint64_t start = 0;
      std::uint64_t end = 0;
      std::uint64_t a = 0;
      std::uint64_t b = 0;
      w.with("start_round", start, as_u64);
      w.with("end_round", end, as_u64);
      w.with("a", a, as_u64);
      w.with("b", b, as_u64);
      f.link_outages.push_back({start * L, end * L, AgentId{a}, AgentId{b}});
    }
  }
}

void read_synthetic(Reader& top, SyntheticParams& s) {
  if (!top.has("synthetic")) return;
  Reader r(top.at("synthetic"), top.path("synthetic"), top.ctx());
  r.with("injections", s.injections, as_size);
  r.with("inject_round", s.inject_round, as_u64);
  if (r.has("inject_agent")) {
    if (r.at("inject_agent").is_null()) {
      s.inject_agent.reset();
    } else {
      s.inject_agent = as_u64(r.at("inject_agent"), r.path("inject_agent"), r.ctx());
    }
  }
  r.with("priority", s.priority, as_priority);
  r.with("ttl_rounds", s.ttl_rounds, as_u32);
  r.with("burst_writes", s.burst_writes, as_size);
  r.with("burst_keys", s.burst_keys, as_size);
  r.with("horizon_rounds", s.horizon_rounds, as_u64);
  r.with("stop_when_converged", s.stop_when_converged, as_bool);
  r.with("min_rounds", s.min_rounds, as_u64);
}

void read_factory(Reader& top, FactoryParams& f) {
  if (!top.has("factory")) return;
  Reader r(top.at("factory"), top.path("factory"), top.ctx());
  r.with("machines", f.machines, as_size);
  r.with("coordinator", f.coordinator, as_u64);
  r.with("poll_interval_rounds", f.poll_interval_rounds, as_u64);
  r.with("arrival_rate", f.arrival_rate, as_double);
  r.with("service_per_round", f.service_per_round, as_double);
  r.with("base_speed", f.base_speed, as_double);
  r.with("arm", f.arm, as_u64);
  r.with("material", f.material, as_u64);
  r.with("inspector", f.inspector, as_u64);
  r.with("planner", f.planner, as_u64);
  r.with("workstation", f.workstation, as_u64);
  r.with("defect_spike_round", f.defect_spike_round, as_u64);
  r.with("spike_jitter_rounds", f.spike_jitter_rounds, as_u64);
  r.with("load_shock_round", f.load_shock_round, as_u64);
  r.with("load_shock_tasks", f.load_shock_tasks, as_u64);
  r.with("load_shock_agent", f.load_shock_agent, as_u64);
  r.with("redistribution_window_rounds", f.redistribution_window_rounds, as_u64);
  r.with("offload_threshold", f.offload_threshold, as_u64);
  r.with("horizon_rounds", f.horizon_rounds, as_u64);
  if (r.has("slowdowns")) {
    f.slowdowns.clear();
    const auto& arr = as_array(r.at("slowdowns"), r.path("slowdowns"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader w(arr[i], r.path("slowdowns") + "[" + std::to_string(i) + "]", r.ctx());
      SlowdownEvent e;
      w.with("round", e.round, as_u64);
      w.with("agent", e.agent, as_u64);
      w.with("factor", e.factor, as_double);
      f.slowdowns.push_back(e);
    }
  }
  if (r.has("failures")) {
    f.failures.clear();
    const auto& arr = as_array(r.at("failures"), r.path("failures"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader w(arr[i], r.path("failures") + "[" + std::to_string(i) + "]", r.ctx());
      MachineFailure e;
      w.with("round", e.round, as_u64);
      w.with("agent", e.agent, as_u64);
      f.failures.push_back(e);
    }
  }
}

void read_disaster(Reader& top, DisasterParams& d) {
  if (!top.has("disaster")) return;
  Reader r(top.at("disaster"), top.path("disaster"), top.ctx());
  r.with("drones", d.drones, as_size);
  r.with("robots", d.robots, as_size);
  r.with("width", d.width, as_u32);
  r.with("height", d.height, as_u32);
  r.with("drone_speed", d.drone_speed, as_u32);
  r.with("drone_range", d.drone_range, as_double);
  r.with("robot_speed", d.robot_speed, as_u32);
  r.with("robot_range", d.robot_range, as_double);
  r.with("sensing_range", d.sensing_range, as_u32);
  r.with("hazards", d.hazards, as_size);
  r.with("survivors", d.survivors, as_size);
  r.with("blocked_cells", d.blocked_cells, as_size);
  r.with("waypoints", d.waypoints, as_size);
  r.with("random_outages", d.random_outages, as_size);
  r.with("outage_rounds", d.outage_rounds, as_u64);
  r.with("horizon_rounds", d.horizon_rounds, as_u64);
  if (r.has("outages")) {
    d.outages.clear();
    const auto& arr = as_array(r.at("outages"), r.path("outages"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader w(arr[i], r.path("outages") + "[" + std::to_string(i) + "]", r.ctx());
      LinkOutageSpec o;
      w.with("start_round", o.start_round, as_u64);
      w.with("end_round", o.end_round, as_u64);
      w.with("a", o.a, as_u64);
      w.with("b", o.b, as_u64);
      d.outages.push_back(o);
    }
  }
  if (r.has("baseline_pairs")) {
    d.baseline_pairs.clear();
    const auto& arr = as_array(r.at("baseline_pairs"), r.path("baseline_pairs"), r.ctx());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = r.path("baseline_pairs") + "[" + std::to_string(i) + "]";
      const auto ids = as_list<std::uint64_t>(arr[i], p, r.ctx(), as_u64);
      if (ids.size() != 2) r.ctx().fail(p, "each baseline pair names two agents");
      d.baseline_pairs.emplace_back(ids[0], ids[1]);
    }
  }
}

void apply_override(json& doc, const std::string& spec, Context& ctx) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(Error::Code::kConfig, "--override " + spec + ": expected KEY=VALUE");
  }
  const std::string path = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const auto part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(Error::Code::kConfig, "--override " + spec + ": empty path segment");
    if (!node->is_object()) {
      throw Error(Error::Code::kConfig, "--override " + spec + ": '" + part + "' is not inside an object");
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
  ctx.overridden.insert(path);
}

void validate(const RunConfig& cfg, const Context& ctx) {
  auto bad = [&](const std::string& path, const std::string& what) { ctx.fail(path, what); };
  const auto& g = cfg.sim.agent.gossip;
  if (!g.valid()) bad("gossip", "gossip settings need fanout >= 1, round_len >= 1, delta_cap >= 1");
  if (!cfg.sim.agent.filter.valid()) bad("filter", "filter weights must increase with priority and gamma lie in (0, 1]");
  if (!cfg.sim.agent.health.valid()) bad("health", "health needs 1 <= t_suspect < t_confirm");
  if (cfg.sim.n_agents == 0) bad("n_agents", "n_agents must be >= 1");
  if (!(cfg.sim.drop_p >= 0.0 && cfg.sim.drop_p <= 1.0)) bad("network.drop_p", "drop_p must lie in [0, 1]");
  if (cfg.sim.agent.trust.corroboration.k == 0) bad("trust.corroboration.k", "k must be >= 1");
  for (auto a : cfg.adversaries.agents) {
    if (a == 0 || a > cfg.sim.n_agents) bad("trust.adversaries.agents", "adversary " + std::to_string(a) + " is not an agent");
  }
  if (cfg.scenario == ScenarioKind::Factory) {
    const auto& f = cfg.factory;
    if (f.machines < 2) bad("factory.machines", "factory needs at least two machines");
    for (auto id : {f.coordinator, f.arm, f.material, f.inspector, f.planner, f.workstation, f.load_shock_agent}) {
      if (id == 0 || id > f.machines) bad("factory", "factory role names agent " + std::to_string(id) + " outside 1.." + std::to_string(f.machines));
    }
    if (f.poll_interval_rounds == 0) bad("factory.poll_interval_rounds", "poll interval must be >= 1");
    if (!(f.arrival_rate >= 0.0 && f.arrival_rate <= 1.0)) bad("factory.arrival_rate", "arrival_rate must lie in [0, 1]");
  }
  if (cfg.scenario == ScenarioKind::Disaster) {
    const auto& d = cfg.disaster;
    if (d.drones == 0 || d.robots == 0) bad("disaster", "disaster needs at least one drone and one robot");
    if (d.width == 0 || d.height == 0) bad("disaster", "grid must be non-empty");
    if (d.blocked_cells + d.hazards + d.survivors + d.drones + d.robots >
        static_cast<std::size_t>(d.width) * d.height) {
      bad("disaster", "grid too small for the requested cells");
    }
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source,
                           const std::vector<std::string>& overrides) {
  Context ctx;
  ctx.source = source;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) {
      if (text[i] == '\n') ++line;
    }
    std::string what = e.what();
    if (const auto cut = what.find("] "); cut != std::string::npos) what = what.substr(cut + 2);
    throw Error(Error::Code::kConfig, source + ":" + std::to_string(line) + ": malformed JSON: " + what);
  }
  if (!doc.is_object()) throw Error(Error::Code::kConfig, source + ":1: config must be a JSON object");
  ctx.lines = key_lines(text);
  for (const auto& o : overrides) apply_override(doc, o, ctx);

  if (!doc.contains("scenario")) ctx.fail("", "missing required field 'scenario'");
  const auto name = as_string(doc.at("scenario"), "scenario", ctx);
  const auto kind = parse_scenario(name);
  if (!kind) ctx.fail("scenario", "scenario must be one of synthetic, factory, disaster, walkthrough");
  RunConfig cfg = default_config(*kind);

  {
    Reader top(doc, "", ctx);
    top.has("scenario");
    if (top.has("mode")) {
      const auto m = as_string(top.at("mode"), "mode", ctx);
      if (auto rm = parse_run_mode(m)) {
        cfg.mode = *rm;
      } else if (auto gm = parse_gossip_mode(m)) {
        cfg.mode = RunMode::GossipAugmented;
        cfg.sim.agent.gossip.mode = *gm;
      } else {
        ctx.fail("mode", "mode must be BaselineDirect, GossipAugmented or a gossip mode name");
      }
    }
    top.with("seed", cfg.sim.seed, as_u64);
    if (top.has("n_agents")) {
      if (*kind != ScenarioKind::Synthetic) ctx.fail("n_agents", "n_agents applies to the synthetic scenario only");
      cfg.sim.n_agents = as_size(top.at("n_agents"), "n_agents", ctx);
    }
    top.with("max_ticks", cfg.sim.max_ticks, as_u64);
    read_gossip(top, cfg.sim.agent.gossip);
    read_filter(top, cfg.sim.agent);
    read_health(top, cfg.sim.agent);
    read_membership(top, cfg.sim.agent);
    read_trust(top, cfg);
    read_network(top, cfg.sim);
    read_faults(top, cfg.sim);
    read_synthetic(top, cfg.synthetic);
    read_factory(top, cfg.factory);
    read_disaster(top, cfg.disaster);
  }
  if (cfg.scenario == ScenarioKind::Factory) cfg.sim.n_agents = cfg.factory.machines;
  if (cfg.scenario == ScenarioKind::Disaster) cfg.sim.n_agents = cfg.disaster.drones + cfg.disaster.robots;
  validate(cfg, ctx);
  try {
    cfg.sim.faults.validate(cfg.sim.n_agents);
  } catch (const Error& e) {
    ctx.fail("faults", e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Code::kConfig, path + ": cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path, overrides);
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {"N", "fanout", "mode", "drop_p", "suppression_k",
                                                "k_corroboration"};
  return axes;
}

std::vector<std::string> axis_overrides(const std::string& axis, const std::string& value) {
  if (axis == "N") return {"n_agents=" + value};
  if (axis == "fanout") return {"gossip.fanout=" + value};
  if (axis == "mode") return {"mode=" + value};
  if (axis == "drop_p") return {"network.drop_p=" + value};
  if (axis == "suppression_k") return {"gossip.suppression_k=" + value};
  if (axis == "k_corroboration") {
    return {"trust.corroboration.enabled=true", "trust.corroboration.k=" + value};
  }
  throw Error(Error::Code::kConfig,
              "unknown sweep axis '" + axis + "' (N, fanout, mode, drop_p, suppression_k, k_corroboration)");
}

}  // namespace geacl
