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

// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 = all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geacl/dissemination.hpp"
#include "geacl/metrics.hpp"
#include "geacl/scenarios.hpp"
#include "geacl/simnet.hpp"
#include "geacl/state_store.hpp"
#include "geacl/trace.hpp"
#include "geacl/trust.hpp"

namespace {

using namespace geacl;
using Clock = std::chrono::steady_clock;

// Tolerances ---------------------------------------------------------------
constexpr double kLogisticR2 = 0.95;
constexpr double kScalingR2 = 0.9;
constexpr double kScalingRatio = 4.0;
constexpr double kTailR2 = 0.9;
constexpr double kEtaR2 = 0.9;
constexpr double kFctSlack = 2.0;          // FCT(k=2) <= 2 x FCT(k=8)
constexpr int kScenarioWins = 18;          // of 20 paired seeds
constexpr double kSmoothWindow = 3;
constexpr double kEps = 1e-9;
constexpr double kCrit1Seconds = 30.0;
constexpr double kCrit2Seconds = 120.0;

struct Verdict {
  bool pass{false};
  std::string detail;
};

std::vector<std::uint64_t> seeds(std::uint64_t from, std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), from);
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Every scenario run goes through here so criterion 11 can replay it.
struct RunRecord {
  RunConfig config;
  std::string report_sha;
  std::string trace_hash;
};
std::vector<RunRecord> g_runs;

std::string report_sha(const ScenarioOutcome& o) {
  const auto json = report_json(o.report, o.metric_names);
  return sha256_hex({reinterpret_cast<const std::uint8_t*>(json.data()), json.size()});
}

ScenarioOutcome run(const RunConfig& cfg) {
  auto o = run_scenario(cfg);
  g_runs.push_back({cfg, report_sha(o), o.report.trace_hash});
  return o;
}

RunConfig synthetic(std::size_t n, std::uint64_t seed) {
  auto cfg = default_config(ScenarioKind::Synthetic);
  cfg.mode = RunMode::GossipAugmented;
  cfg.sim.seed = seed;
  cfg.sim.n_agents = n;
  cfg.sim.topology = Topology::complete();
  cfg.sim.drop_p = 0.0;
  cfg.sim.agent.gossip.mode = GossipMode::PushPull;
  cfg.sim.agent.gossip.fanout = 1;
  return cfg;
}

const KeyPropagation& first_key(const ScenarioOutcome& o) { return o.report.keys.front(); }

// ---------------------------------------------------------------------------
// 1 + 3: logistic shape and exponential tail share the same runs.

struct Crit1Run {
  std::vector<double> informed;
  double n{0};
};

std::vector<Crit1Run> g_crit1;
double g_crit1_seconds = 0.0;

bool unimodal(const std::vector<double>& s) {
  std::size_t i = 0;
  while (i + 1 < s.size() && s[i + 1] >= s[i] - kEps) ++i;
  while (i + 1 < s.size() && s[i + 1] <= s[i] + kEps) ++i;
  return i + 1 >= s.size();
}

std::vector<double> smooth(const std::vector<double>& v) {
  const auto h = static_cast<std::ptrdiff_t>(kSmoothWindow) / 2;
  std::vector<double> out(v.size());
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(v.size()); ++i) {
    double s = 0.0;
    int c = 0;
    for (auto j = std::max<std::ptrdiff_t>(0, i - h);
         j <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(v.size()) - 1, i + h); ++j) {
      s += v[j];
      ++c;
    }
    out[i] = s / c;
  }
  return out;
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  const std::size_t n = 256;
  int ok = 0;
  double worst_r2 = 1.0;
  std::vector<std::string> bad;
  for (auto seed : seeds(1, 20)) {
    const auto o = run(synthetic(n, seed));
    const auto& kp = first_key(o);
    std::vector<double> informed(kp.informed.begin(), kp.informed.end());
    g_crit1.push_back({informed, static_cast<double>(n)});
    const auto fit = fit_beta(informed, static_cast<double>(n));
    const bool monotone = std::is_sorted(informed.begin(), informed.end());
    std::vector<double> inc;
    for (std::size_t i = 1; i < informed.size(); ++i) inc.push_back(informed[i] - informed[i - 1]);
    const bool uni = unimodal(smooth(inc));
    worst_r2 = std::min(worst_r2, fit.r_squared);
    if (fit.r_squared >= kLogisticR2 && monotone && uni && kp.fct) {
      ++ok;
    } else {
      bad.push_back(std::to_string(seed));
    }
  }
  g_crit1_seconds = seconds_since(t0);
  const bool fast = g_crit1_seconds < kCrit1Seconds;
  std::string detail = std::to_string(ok) + "/20 seeds fit (min R2 " + fmt(worst_r2) + "), " +
                       fmt(g_crit1_seconds, 2) + " s";
  if (!bad.empty()) {
    detail += ", failing seeds:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {ok == 20 && fast, detail};
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  std::vector<double> x, y;
  std::string detail;
  for (std::size_t n : {16, 64, 256}) {
    std::vector<double> fct;
    bool all = true;
    for (auto seed : seeds(101, 50)) {
      const auto o = run(synthetic(n, seed));
      const auto& kp = first_key(o);
      all &= kp.fct.has_value();
      if (kp.fct) fct.push_back(static_cast<double>(*kp.fct));
    }
    if (!all) return {false, "FCT missing at N=" + std::to_string(n)};
    x.push_back(std::log2(static_cast<double>(n)));
    y.push_back(median(fct));
    detail += "N=" + std::to_string(n) + " median FCT " + fmt(y.back(), 1) + "; ";
  }
  const auto fit = fit_line(x, y);
  const double ratio = y[2] / y[0];
  const double secs = seconds_since(t0);
  detail += "a+b*log2N R2 " + fmt(fit.r_squared) + ", slope " + fmt(fit.slope) + ", FCT(256)/FCT(16) " +
            fmt(ratio) + ", " + fmt(secs, 2) + " s";
  return {fit.r_squared >= kScalingR2 && fit.slope > 0 && ratio < kScalingRatio && secs < kCrit2Seconds,
          detail};
}

Verdict criterion3() {
  int ok = 0;
  int exact = 0;  // only two mid-phase samples: the line is exact
  double worst = 1.0;
  for (const auto& r : g_crit1) {
    std::vector<double> t, logu;
    for (std::size_t i = 0; i < r.informed.size(); ++i) {
      const double cov = r.informed[i] / r.n;
      if (cov < 0.1 || cov > 0.9) continue;
      t.push_back(static_cast<double>(i));
      logu.push_back(std::log((r.n - r.informed[i]) / r.n));
    }
    bool decreasing = t.size() >= 2;
    for (std::size_t i = 1; i < logu.size(); ++i) decreasing &= logu[i] < logu[i - 1];
    if (t.size() == 2) {
      ok += decreasing ? 1 : 0;
      ++exact;
      continue;
    }
    if (t.size() < 2) continue;
    const auto fit = fit_line(t, logu);
    worst = std::min(worst, fit.r_squared);
    if (decreasing && fit.slope < 0 && fit.r_squared >= kTailR2) ++ok;
  }
  const int total = static_cast<int>(g_crit1.size());
  return {total > 0 && ok == total,
          std::to_string(ok) + "/" + std::to_string(total) + " seeds decrease with mid-phase log-tail R2 >= 0.9 (min R2 " +
              fmt(worst) + " over seeds with >= 3 points; " + std::to_string(exact) +
              " seeds have only 2 mid-phase points, fitted exactly)"};
}

// ---------------------------------------------------------------------------
// 4: divergence contraction after a competing-writer burst.

Verdict criterion4() {
  int ok = 0;
  double worst_r2 = 1.0;
  std::vector<double> etas;
  std::string bad;
  for (auto seed : seeds(1, 20)) {
    auto cfg = synthetic(32, seed);
    cfg.synthetic.injections = 0;
    cfg.synthetic.burst_writes = 50;
    cfg.synthetic.burst_keys = 1;
    const auto o = run(cfg);
    const auto start = injection_round(o.trace, 0);
    const auto& all = o.report.divergence;
    std::vector<double> d(all.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(start, all.size())),
                          all.end());
    bool non_increasing = true;
    for (std::size_t i = 1; i < d.size(); ++i) non_increasing &= d[i] <= d[i - 1] + kEps;
    const bool reaches_zero = !d.empty() && d.back() == 0.0;
    const auto eta = estimate_eta(d);
    const bool eta_ok = eta.eta && *eta.eta > 0.0 && *eta.eta < 1.0;
    if (eta.eta) etas.push_back(*eta.eta);
    worst_r2 = std::min(worst_r2, eta.r_squared);
    if (non_increasing && reaches_zero && eta_ok && eta.r_squared >= kEtaR2) {
      ++ok;
    } else {
      bad += " " + std::to_string(seed) + (non_increasing ? "" : "[rise]") + (reaches_zero ? "" : "[D>0]") +
             (eta_ok ? "" : "[eta]") + (eta.r_squared >= kEtaR2 ? "" : "[r2=" + fmt(eta.r_squared) + "]");
    }
  }
  return {ok == 20, std::to_string(ok) + "/20 seeds contract (eta_hat median " + fmt(median(etas)) +
                        ", min log-D R2 " + fmt(worst_r2) + ")" + (bad.empty() ? "" : ", failing:" + bad)};
}

// ---------------------------------------------------------------------------
// 5: anti-entropy against independent oracles.

struct Pool {
  std::vector<Envelope> envs;
  std::map<std::uint64_t, std::uint64_t> seq;  // per origin

  Envelope make(Rng& rng, const std::string& key, Value value) {
    Envelope e;
    e.origin = AgentId{1 + rng.uniform(5)};
    e.seq = ++seq[e.origin.value];
    e.key = key;
    e.value = std::move(value);
    e.priority = PriorityClass::Routine;
    e.created_tick = rng.uniform(20);
    e.ttl_rounds = 1000;
    return e;
  }
};

Value random_value(Rng& rng, const std::string& key) {
  if (key.rfind("hb/", 0) == 0) return Counter{rng.uniform(50)};
  if (key.rfind("emb/", 0) == 0) {
    return Embedding{{rng.next_double() + 0.1, rng.next_double() + 0.1, rng.next_double() + 0.1}};
  }
  if (key.rfind("cap/", 0) == 0) return Fact{"can", "x", "skill" + std::to_string(rng.uniform(6))};
  if (rng.bernoulli(0.5)) return static_cast<double>(rng.uniform(100));
  return Fact{"state", key, "v" + std::to_string(rng.uniform(8))};
}

const std::vector<std::string> kPoolKeys = {"k/0", "k/1", "k/2", "hb/1", "hb/2", "cap/0", "cap/1", "emb/0"};

// Independent model of the merged value of one key.
struct Expected {
  std::optional<Envelope> lww;  // LWW winner
  std::uint64_t counter{0};
  std::set<Value> elements;
};

bool stamp_greater(const Envelope& a, const Envelope& b) {
  if (a.created_tick != b.created_tick) return a.created_tick > b.created_tick;
  if (a.origin != b.origin) return a.origin > b.origin;
  return a.seq > b.seq;
}

std::map<std::string, Expected> oracle(const std::vector<Envelope>& envs) {
  std::map<std::string, Expected> out;
  for (const auto& e : envs) {
    auto& x = out[e.key];
    if (!x.lww || stamp_greater(e, *x.lww)) x.lww = e;
    if (const auto* c = std::get_if<Counter>(&e.value)) x.counter = std::max(x.counter, c->value);
    x.elements.insert(e.value);
  }
  return out;
}

bool matches(const StoreEntry& entry, const Expected& x) {
  switch (entry.policy.kind) {
    case MergePolicy::Kind::LwwRegister:
      return entry.envelope.id() == x.lww->id() && entry.envelope.value == x.lww->value;
    case MergePolicy::Kind::MaxCounter: {
      const auto* c = std::get_if<Counter>(&entry.envelope.value);
      return c != nullptr && c->value == x.counter;
    }
    case MergePolicy::Kind::GrowOnlySetUnion:
      return entry.set_elements && *entry.set_elements == x.elements;
    case MergePolicy::Kind::VectorBlend:
      return true;
  }
  return false;
}

std::string g_crit5_digest;

Verdict criterion5() {
  Rng rng = Rng::derive(5, 0xAE);
  std::ostringstream digest;
  int pairs_ok = 0;
  for (int p = 0; p < 500; ++p) {
    Pool pool;
    Store a(AgentId{101});
    Store b(AgentId{102});
    const auto count = 1 + rng.uniform(30);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto& key = kPoolKeys[rng.uniform(kPoolKeys.size())];
      pool.envs.push_back(pool.make(rng, key, random_value(rng, key)));
    }
    std::vector<Envelope> into_a, into_b;
    for (const auto& e : pool.envs) {
      const auto where = rng.uniform(3);
      if (where != 1) into_a.push_back(e);
      if (where != 0) into_b.push_back(e);
    }
    // Random delivery order per store.
    for (auto* list : {&into_a, &into_b}) {
      for (std::size_t i = 0; i + 1 < list->size(); ++i) {
        std::swap((*list)[i], (*list)[i + rng.uniform(list->size() - i)]);
      }
    }
    for (const auto& e : into_a) a.apply_remote(e, 0);
    for (const auto& e : into_b) b.apply_remote(e, 0);
    anti_entropy_session(a, b, 1 + rng.uniform(8), 0);

    bool ok = a.digest().includes(b.digest()) && b.digest().includes(a.digest());
    const auto expected = oracle(pool.envs);
    for (const auto& [key, x] : expected) {
      const auto* ea = a.get(key);
      const auto* eb = b.get(key);
      if (ea == nullptr || eb == nullptr) {
        ok = false;
        continue;
      }
      if (ea->policy.kind == MergePolicy::Kind::VectorBlend) continue;
      ok &= value_fingerprint(*ea) == value_fingerprint(*eb) && matches(*ea, x) && matches(*eb, x);
    }
    ok &= a.size() == expected.size() && b.size() == expected.size();
    pairs_ok += ok ? 1 : 0;
    for (const auto& [key, e] : a.entries()) digest << key << ':' << value_fingerprint(e) << ';';
  }

  // Merge order independence: all 6 orderings of 3 same-key envelopes.
  int sets_ok = 0;
  const int sets = 300;
  for (int s = 0; s < sets; ++s) {
    Pool pool;
    static const std::vector<std::string> kSetKeys = {"k/0", "hb/1", "cap/0"};
    const auto& key = kSetKeys[s % 3];
    std::vector<Envelope> three;
    for (int i = 0; i < 3; ++i) three.push_back(pool.make(rng, key, random_value(rng, key)));
    if (rng.bernoulli(0.3)) three[1].created_tick = three[0].created_tick;  // force stamp ties
    const auto x = oracle(three).at(key);
    std::vector<int> order = {0, 1, 2};
    bool ok = true;
    std::optional<std::uint64_t> fp;
    do {
      Store st(AgentId{100});
      for (int i : order) st.apply_remote(three[i], 0);
      const auto* e = st.get(key);
      ok &= e != nullptr && matches(*e, x);
      if (e != nullptr) {
        if (fp) ok &= *fp == value_fingerprint(*e);
        fp = value_fingerprint(*e);
      }
    } while (std::next_permutation(order.begin(), order.end()));
    sets_ok += ok ? 1 : 0;
    digest << (fp ? *fp : 0) << ',';
  }
  const auto text = digest.str();
  g_crit5_digest = sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  return {pairs_ok == 500 && sets_ok == sets,
          std::to_string(pairs_ok) + "/500 store pairs reconcile to the oracle; " + std::to_string(sets_ok) +
              "/" + std::to_string(sets) + " 3-envelope sets order-independent"};
}

// ---------------------------------------------------------------------------
// 6: partition semantics.

Verdict criterion6() {
  constexpr std::size_t n = 64;
  constexpr std::uint64_t start = 5;
  constexpr std::uint64_t end = 55;
  constexpr std::uint64_t inject = 10;
  int ok = 0;
  std::string bad;
  double worst_margin = 1e9;
  for (auto seed : seeds(1, 20)) {
    auto base = synthetic(n, seed);
    base.synthetic.ttl_rounds = 200;
    base.synthetic.inject_agent = 1;
    base.synthetic.inject_round = inject;
    const auto free_run = run(base);
    const auto fct_free = first_key(free_run).fct;

    auto cfg = base;
    const Tick L = cfg.sim.agent.gossip.round_len;
    PartitionWindow w{start * L, end * L, {{}, {}}};
    for (std::uint64_t i = 1; i <= n; ++i) w.blocks[i <= n / 2 ? 0 : 1].push_back(AgentId{i});
    cfg.sim.faults.partitions.push_back(w);
    const auto o = run(cfg);
    const auto& kp = first_key(o);

    // Coverage during the window, sampled at every round boundary.
    bool capped = true;
    bool filled_block = false;
    for (std::size_t j = 0; j < kp.informed.size(); ++j) {
      const auto round = kp.injection_round + j;
      if (round >= end) break;
      const double pc = static_cast<double>(kp.informed[j]) / static_cast<double>(kp.alive[j]);
      capped &= pc <= 0.5;
      filled_block |= pc == 0.5;
    }
    const bool healed = kp.final_coverage == 1.0 && o.report.npr && *o.report.npr == 1.0;
    const auto rec = o.report.npr_rounds;
    const bool within = rec && fct_free && *rec <= *fct_free;
    if (rec && fct_free) worst_margin = std::min(worst_margin, static_cast<double>(*fct_free) - static_cast<double>(*rec));
    if (capped && filled_block && healed && within) {
      ++ok;
    } else {
      bad += " " + std::to_string(seed) + (capped ? "" : "[cap]") + (filled_block ? "" : "[block]") +
             (healed ? "" : "[heal]") +
             (within ? "" : "[rec " + (rec ? std::to_string(*rec) : std::string("-")) + " vs FCT " +
                               (fct_free ? std::to_string(*fct_free) : std::string("-")) + "]");
    }
  }
  return {ok == 20, std::to_string(ok) + "/20 seeds: PC <= 1/2 in window, PC = NPR = 1 after heal within the "
                                         "unpartitioned FCT (min slack " + fmt(worst_margin, 0) + " rounds)" +
                        (bad.empty() ? "" : ", failing:" + bad)};
}

// ---------------------------------------------------------------------------
// 7: failure detection.

// Heartbeat lag = rounds since an observer last saw a peer's counter advance.
class LagProbe : public ScenarioDriver {
 public:
  explicit LagProbe(std::uint64_t warmup) : warmup_(warmup) {}
  void on_round_end(Simulation& sim, std::uint64_t round, Tick) override {
    if (round < warmup_) return;
    for (auto id : sim.alive_ids()) {
      for (const auto& [peer, h] : sim.agent(id).detector().peers()) {
        lags.push_back(static_cast<double>(round - h.last_progress_round));
      }
    }
  }
  std::vector<double> lags;

 private:
  std::uint64_t warmup_;
};

std::vector<std::string> g_calibration_hashes;

SimConfig failure_sim(std::size_t n, std::uint64_t seed) {
  auto cfg = synthetic(n, seed);
  cfg.sim.agent.heartbeats = true;
  SimConfig sim = cfg.sim;
  sim.gossip_enabled = true;
  return sim;
}

std::uint32_t calibrate_t_suspect(std::size_t n) {
  constexpr std::uint64_t kRounds = 80;
  constexpr std::uint64_t kWarmup = 20;
  std::vector<double> lags;
  for (auto seed : seeds(9001, 10)) {
    auto sim_cfg = failure_sim(n, seed);
    sim_cfg.agent.health.t_suspect = 1000;  // observe only
    sim_cfg.agent.health.t_confirm = 2000;
    Simulation sim(sim_cfg);
    LagProbe probe(kWarmup);
    sim.set_driver(&probe);
    sim.run([&](const Simulation&, std::uint64_t round) { return round >= kRounds; });
    lags.insert(lags.end(), probe.lags.begin(), probe.lags.end());
    g_calibration_hashes.push_back(trace_hash(sim.trace()));
  }
  std::sort(lags.begin(), lags.end());
  const auto p99 = lags.empty() ? 0.0 : lags[static_cast<std::size_t>(0.99 * static_cast<double>(lags.size() - 1))];
  return static_cast<std::uint32_t>(std::ceil(p99)) + 1;
}

Verdict criterion7() {
  constexpr std::uint64_t crash_round = 30;
  std::vector<double> fpd;
  std::vector<double> ns;
  std::string detail;
  bool ok = true;
  for (std::size_t n : {16, 32, 64}) {
    const auto ts = calibrate_t_suspect(n);
    const auto tc = 2 * ts;
    std::vector<double> means;
    std::uint64_t false_conf = 0;
    std::uint64_t detected = 0;
    std::uint64_t expected = 0;
    for (auto seed : seeds(1, 20)) {
      auto cfg = synthetic(n, seed);
      cfg.sim.agent.heartbeats = true;
      cfg.sim.agent.health.t_suspect = ts;
      cfg.sim.agent.health.t_confirm = tc;
      cfg.synthetic.injections = 0;
      cfg.synthetic.stop_when_converged = false;
      cfg.synthetic.horizon_rounds = crash_round + 4 * tc + 30;
      const Tick L = cfg.sim.agent.gossip.round_len;
      cfg.sim.faults.crashes.push_back({crash_round * L, AgentId{1 + (seed % n)}});
      const auto o = run(cfg);
      const auto& f = o.report.failures;
      false_conf += f.false_confirmations;
      detected += f.detections;
      expected += f.expected_detections;
      if (f.mean_rounds) means.push_back(*f.mean_rounds);
    }
    const double m = mean(means);
    fpd.push_back(m);
    ns.push_back(static_cast<double>(n));
    ok &= false_conf == 0 && detected == expected && expected > 0;
    detail += "N=" + std::to_string(n) + " T_suspect " + std::to_string(ts) + " FPD " + fmt(m, 2) + " false " +
              std::to_string(false_conf) + " det " + std::to_string(detected) + "/" + std::to_string(expected) + "; ";
  }
  const double c = fpd[0] / std::log2(ns[0]);
  for (std::size_t i = 1; i < fpd.size(); ++i) ok &= fpd[i] <= c * std::log2(ns[i]) + kEps;
  detail += "c = " + fmt(c) + " (bound c*log2 N)";
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 8: corroboration boundary and signature tampering.

RunConfig corroboration_run(std::uint64_t seed, std::size_t adversaries) {
  auto cfg = synthetic(64 + adversaries, seed);
  cfg.sim.agent.trust.signing = true;
  cfg.sim.agent.trust.corroboration.enabled = true;
  cfg.sim.agent.trust.corroboration.k = 2;
  cfg.sim.agent.trust.corroboration.applies_to = PriorityClass::High;
  for (std::size_t i = 0; i < adversaries; ++i) cfg.adversaries.agents.push_back(65 + i);
  cfg.synthetic.min_rounds = 40;
  return cfg;
}

double scenario_value(const ScenarioOutcome& o, const std::string& name) {
  const auto it = o.report.scenario_metrics.find(name);
  return it == o.report.scenario_metrics.end() ? std::nan("") : it->second;
}

Verdict criterion8() {
  std::uint64_t single_commits = 0;
  int colluding_seeds = 0;
  for (auto seed : seeds(1, 50)) {
    single_commits += static_cast<std::uint64_t>(scenario_value(run(corroboration_run(seed, 1)), "false_commits"));
    if (scenario_value(run(corroboration_run(seed, 2)), "false_commits") >= 1.0) ++colluding_seeds;
  }

  // Tampering: a signed envelope altered in transit is always Rejected.
  int tampered = 0;
  int rejected = 0;
  for (auto seed : seeds(1, 50)) {
    Rng keys = Rng::derive(seed, streams::kKeys);
    auto signer = std::make_shared<KeyedHashSigner>(KeyRegistry::generate({AgentId{1}, AgentId{2}}, keys));
    AgentConfig ac;
    ac.trust.signing = true;
    GossipAgent sender(AgentId{1}, ac, Rng::derive(seed, 1), signer.get());
    const auto good = sender.put("claim/x", Fact{"hazard", "s", "present"}, PriorityClass::High, 10, 0);
    for (int variant = 0; variant < 5; ++variant) {
      GossipAgent receiver(AgentId{2}, ac, Rng::derive(seed, 2), signer.get());
      auto env = good;
      switch (variant) {
        case 0: env.value = Fact{"hazard", "s", "absent"}; break;
        case 1: env.key = "claim/y"; break;
        case 2: env.seq += 1; break;
        case 3: env.created_tick += 1; break;
        case 4: (*env.signature)[0] ^= 0x01; break;
      }
      GossipMessage msg{GossipKind::Rumor, AgentId{1}, {env}, {}, {}};
      const auto out = receiver.on_gossip(msg, 1);
      ++tampered;
      rejected += !out.outcomes.empty() && out.outcomes.front() == ApplyOutcome::Rejected &&
                  receiver.store().get(env.key) == nullptr;
    }
  }
  return {single_commits == 0 && colluding_seeds >= 1 && rejected == tampered,
          "one injector: " + std::to_string(single_commits) + " false commits over 50 seeds; two colluders: false "
          "commits in " + std::to_string(colluding_seeds) + "/50 seeds; tampered rejected " +
              std::to_string(rejected) + "/" + std::to_string(tampered)};
}

// ---------------------------------------------------------------------------
// 9: suppression trade-off.

Verdict criterion9() {
  std::vector<double> ro2, ro8, fct2, fct8;
  int ro_wins = 0;
  for (auto seed : seeds(1, 20)) {
    auto cfg = synthetic(64, seed);
    cfg.synthetic.ttl_rounds = 64;
    cfg.sim.agent.gossip.suppression_k = 2;
    const auto a = run(cfg);
    cfg.sim.agent.gossip.suppression_k = 8;
    const auto b = run(cfg);
    const auto& ka = first_key(a);
    const auto& kb = first_key(b);
    if (!ka.ro || !kb.ro || !ka.fct || !kb.fct) return {false, "missing RO/FCT at seed " + std::to_string(seed)};
    ro2.push_back(*ka.ro);
    ro8.push_back(*kb.ro);
    fct2.push_back(static_cast<double>(*ka.fct));
    fct8.push_back(static_cast<double>(*kb.fct));
    ro_wins += *ka.ro < *kb.ro ? 1 : 0;
  }
  const bool ro_ok = mean(ro2) < mean(ro8);
  const bool fct_ok = median(fct2) <= kFctSlack * median(fct8);
  return {ro_ok && fct_ok, "mean RO k=2 " + fmt(mean(ro2)) + " vs k=8 " + fmt(mean(ro8)) + " (k=2 lower in " +
                               std::to_string(ro_wins) + "/20 seeds); median FCT " + fmt(median(fct2), 1) +
                               " vs " + fmt(median(fct8), 1)};
}

// ---------------------------------------------------------------------------
// 10: scenario direction checks and the walkthrough.

Verdict criterion10() {
  int factory_wins = 0;
  int disaster_wins = 0;
  for (auto seed : seeds(1, 20)) {
    auto f = default_config(ScenarioKind::Factory);
    f.sim.seed = seed;
    f.factory.poll_interval_rounds = 5;
    f.mode = RunMode::BaselineDirect;
    const auto fb = scenario_value(run(f), "alert_propagation_time");
    f.mode = RunMode::GossipAugmented;
    const auto fg = scenario_value(run(f), "alert_propagation_time");
    factory_wins += fg < fb ? 1 : 0;

    auto d = default_config(ScenarioKind::Disaster);
    d.sim.seed = seed;
    d.mode = RunMode::BaselineDirect;
    const auto db = scenario_value(run(d), "hazard_coverage");
    d.mode = RunMode::GossipAugmented;
    const auto dg = scenario_value(run(d), "hazard_coverage");
    disaster_wins += dg >= db ? 1 : 0;
  }
  auto w = default_config(ScenarioKind::Walkthrough);
  w.sim.seed = 1;
  const auto wr = run_walkthrough(1);
  g_runs.push_back({w, report_sha(wr.outcome), wr.outcome.report.trace_hash});
  std::string failed_steps;
  for (const auto& s : wr.steps) {
    if (!s.passed) failed_steps += " " + s.id;
  }
  const bool walk = wr.passed() && scenario_value(wr.outcome, "arm_speed_before") == 100.0 &&
                    scenario_value(wr.outcome, "arm_speed_after") == 80.0 &&
                    !wr.outcome.report.divergence.empty() && wr.outcome.report.divergence.back() == 0.0;
  return {factory_wins >= kScenarioWins && disaster_wins >= kScenarioWins && walk,
          "factory alert faster with gossip in " + std::to_string(factory_wins) +
              "/20; disaster coverage >= baseline in " + std::to_string(disaster_wins) + "/20; walkthrough " +
              (walk ? "5/5 steps" : "failed:" + failed_steps)};
}

// ---------------------------------------------------------------------------
// 11: determinism.

Verdict criterion11() {
  const auto runs = g_runs;
  std::size_t mismatches = 0;
  for (const auto& r : runs) {
    ScenarioOutcome o;
    if (r.config.scenario == ScenarioKind::Walkthrough) {
      o = run_walkthrough(r.config.sim.seed).outcome;
    } else {
      o = run_scenario(r.config);
    }
    if (report_sha(o) != r.report_sha || o.report.trace_hash != r.trace_hash) ++mismatches;
  }
  const auto crit5 = g_crit5_digest;
  criterion5();
  const bool store_same = crit5 == g_crit5_digest;
  const auto calib = g_calibration_hashes;
  g_calibration_hashes.clear();
  for (std::size_t n : {16, 32, 64}) calibrate_t_suspect(n);
  const bool calib_same = calib == g_calibration_hashes;
  return {mismatches == 0 && store_same && calib_same,
          std::to_string(runs.size() - mismatches) + "/" + std::to_string(runs.size()) +
              " scenario runs byte-identical (report JSON and trace hash); store oracle " +
              (store_same ? "identical" : "differs") + "; calibration traces " + (calib_same ? "identical" : "differ")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"1 logistic shape", criterion1},
      {"2 logarithmic scaling", criterion2},
      {"3 exponential uninformed tail", criterion3},
      {"4 divergence contraction", criterion4},
      {"5 anti-entropy oracle equivalence", criterion5},
      {"6 partition semantics", criterion6},
      {"7 failure detection", criterion7},
      {"8 corroboration boundary", criterion8},
      {"9 suppression trade-off", criterion9},
      {"10 scenario direction checks", criterion10},
      {"11 determinism", criterion11},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.name << ": " << v.detail << " ["
              << fmt(seconds_since(t0), 1) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed;
}
