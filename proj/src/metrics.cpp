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

#include "geacl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>

#include "geacl/health.hpp"

namespace geacl {

using nlohmann::json;

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  fit.points = n;
  if (n == 0) return fit;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  if (syy > 0.0) {
    fit.r_squared = 1.0 - ss_res / syy;
  } else {
    fit.r_squared = ss_res <= 1e-12 ? 1.0 : 0.0;
  }
  return fit;
}

namespace {

double logistic(double n, double beta, double t) {
  return n / (1.0 + (n - 1.0) * std::exp(-beta * t));
}

double beta_sse(const std::vector<double>& y, double n, double beta) {
  double sse = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double r = y[t] - logistic(n, beta, static_cast<double>(t));
    sse += r * r;
  }
  return sse;
}

}  // namespace

BetaFit fit_beta(const std::vector<double>& informed, double n) {
  BetaFit fit;
  if (n <= 1.0 || informed.size() < 3) {
    fit.degenerate = true;
    return fit;
  }
  std::vector<double> y(informed.size());
  double running = 0.0;
  for (std::size_t i = 0; i < informed.size(); ++i) {
    if (informed[i] < running) fit.non_monotone = true;
    running = std::max(running, informed[i]);
    y[i] = running;
    fit.uninformed_fraction.push_back((n - running) / n);
  }

  // Coarse log-spaced scan, then golden-section refinement in the bracket.
  constexpr int kScan = 240;
  const double lo = std::log(1e-4);
  const double hi = std::log(50.0);
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double b = std::exp(lo + (hi - lo) * i / kScan);
    const double s = beta_sse(y, n, b);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }
  double a = std::exp(lo + (hi - lo) * std::max(best - 1, 0) / kScan);
  double b = std::exp(lo + (hi - lo) * std::min(best + 1, kScan) / kScan);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (beta_sse(y, n, c) < beta_sse(y, n, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  fit.beta = (a + b) / 2.0;
  const double sse = beta_sse(y, n, fit.beta);

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);
  fit.r_squared = sst > 0.0 ? 1.0 - sse / sst : (sse <= 1e-12 ? 1.0 : 0.0);
  return fit;
}

EtaFit estimate_eta(const std::vector<double>& d) {
  EtaFit fit;
  if (std::all_of(d.begin(), d.end(), [](double v) { return v <= 0.0; })) {
    fit.converged_at_start = true;
    return fit;
  }
  double log_sum = 0.0;
  for (std::size_t t = 0; t + 1 < d.size(); ++t) {
    if (d[t] > 0.0 && d[t + 1] > 0.0) {
      log_sum += std::log(d[t + 1] / d[t]);
      ++fit.pairs;
    }
  }
  if (fit.pairs > 0) fit.eta = 1.0 - std::exp(log_sum / static_cast<double>(fit.pairs));

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t t = 0; t < d.size(); ++t) {
    if (d[t] > 0.0) {
      xs.push_back(static_cast<double>(t));
      ys.push_back(std::log(d[t]));
    }
  }
  fit.r_squared = fit_line(xs, ys).r_squared;
  return fit;
}

// ---------------------------------------------------------------------------
// Divergence

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
  for (double v : a) na += v * v;
  for (double v : b) nb += v * v;
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0 || a.size() != b.size()) return 1.0;
  const double cos = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

double pair_distance(std::uint64_t fa, std::uint64_t fb, const std::vector<double>* va,
                     const std::vector<double>* vb, bool is_vector) {
  if (fa == 0 && fb == 0) return 0.0;
  if (fa == 0 || fb == 0) return 1.0;
  if (!is_vector || va == nullptr || vb == nullptr) return fa == fb ? 0.0 : 1.0;
  if (fa == fb) return 0.0;
  return cosine_distance(*va, *vb);
}

double semantic_divergence(const Trace& trace, const RoundSample& sample,
                           const std::vector<std::size_t>& keys) {
  std::vector<std::size_t> ks = keys;
  if (ks.empty()) {
    for (std::size_t k = 0; k < trace.keys.size(); ++k) ks.push_back(k);
  }
  double total = 0.0;
  for (std::size_t k : ks) {
    if (k >= sample.fingerprints.size()) continue;
    const auto& row = sample.fingerprints[k];
    const bool is_vector = k < trace.keys.size() && trace.keys[k].is_vector;
    if (!is_vector) {
      // Disagreeing pairs = all pairs minus pairs within each value group.
      std::unordered_map<std::uint64_t, std::uint64_t> groups;
      for (auto f : row) ++groups[f];
      const double n = static_cast<double>(row.size());
      double same = 0.0;
      for (const auto& [f, c] : groups) same += static_cast<double>(c) * (c - 1) / 2.0;
      total += n * (n - 1.0) / 2.0 - same;
      continue;
    }
    const auto& vecs = sample.vectors[k];
    for (std::size_t i = 0; i < row.size(); ++i) {
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        total += pair_distance(row[i], row[j], &vecs[i], &vecs[j], true);
      }
    }
  }
  return total;
}

std::vector<double> divergence_series(const Trace& trace, const std::vector<std::size_t>& keys) {
  std::vector<double> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) out.push_back(semantic_divergence(trace, s, keys));
  return out;
}

// ---------------------------------------------------------------------------
// Propagation

namespace {

std::optional<Tick> inject_tick(const Trace& trace, std::size_t key) {
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Inject && e.a == key) return e.tick;
  }
  return std::nullopt;
}

std::size_t sample_at_or_after(const Trace& trace, Tick tick) {
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (trace.samples[i].tick >= tick) return i;
  }
  return trace.samples.size();
}

std::uint64_t holders(const RoundSample& s, std::size_t key, std::uint64_t fp) {
  if (key >= s.fingerprints.size() || fp == 0) return 0;
  return static_cast<std::uint64_t>(std::count(s.fingerprints[key].begin(),
                                               s.fingerprints[key].end(), fp));
}

}  // namespace

std::uint64_t injection_round(const Trace& trace, std::size_t key) {
  if (auto t = inject_tick(trace, key)) {
    const auto i = sample_at_or_after(trace, *t);
    return i < trace.samples.size() ? trace.samples[i].round : trace.samples.size();
  }
  for (const auto& s : trace.samples) {
    if (key < s.fingerprints.size()) {
      const auto& row = s.fingerprints[key];
      if (std::any_of(row.begin(), row.end(), [](auto f) { return f != 0; })) return s.round;
    }
  }
  return trace.samples.empty() ? 0 : trace.samples.back().round;
}

std::uint64_t final_fingerprint(const Trace& trace, std::size_t key) {
  if (trace.samples.empty()) return 0;
  const auto& s = trace.samples.back();
  if (key >= s.fingerprints.size()) return 0;
  std::map<std::uint64_t, std::uint64_t> counts;
  for (auto f : s.fingerprints[key]) {
    if (f != 0) ++counts[f];
  }
  std::uint64_t best = 0;
  std::uint64_t best_count = 0;
  for (const auto& [f, c] : counts) {
    if (c > best_count) {
      best = f;
      best_count = c;
    }
  }
  return best;
}

KeyPropagation key_propagation(const Trace& trace, std::size_t key) {
  KeyPropagation kp;
  kp.key_index = key;
  if (key < trace.keys.size()) kp.key = trace.keys[key].key;
  kp.injection_round = injection_round(trace, key);
  kp.final_fingerprint = final_fingerprint(trace, key);

  std::size_t start = trace.samples.size();
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (trace.samples[i].round >= kp.injection_round) {
      start = i;
      break;
    }
  }
  for (std::size_t i = start; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    kp.informed.push_back(holders(s, key, kp.final_fingerprint));
    kp.alive.push_back(s.alive.size());
  }

  const double q = 0.95;
  std::optional<std::uint64_t> divergent_until;
  std::uint64_t divergent_rounds = 0;
  for (std::size_t j = 0; j < kp.informed.size(); ++j) {
    const auto need = static_cast<std::uint64_t>(
        std::ceil(q * static_cast<double>(kp.alive[j]) - 1e-9));
    if (!kp.pl && kp.alive[j] > 0 && kp.informed[j] >= need) kp.pl = j;
    if (!kp.fct && kp.alive[j] > 0 && kp.informed[j] == kp.alive[j]) {
      kp.fct = j;
      divergent_until = divergent_rounds;
    }
    if (!kp.fct) {
      // Any round before convergence where agents disagree (absence counts).
      const auto& row = trace.samples[start + j].fingerprints[key];
      const bool split = std::any_of(row.begin(), row.end(),
                                     [&](auto f) { return f != row.front(); });
      if (split) ++divergent_rounds;
    }
  }
  kp.dw = divergent_until;
  if (!kp.informed.empty() && kp.alive.back() > 0) {
    kp.final_coverage =
        static_cast<double>(kp.informed.back()) / static_cast<double>(kp.alive.back());
  }
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::EnvelopeTx && e.a == key) ++kp.transmissions;
  }
  if (!kp.informed.empty() && kp.informed.back() >= 2) {
    kp.ro = static_cast<double>(kp.transmissions) /
            static_cast<double>(kp.informed.back() - 1);
  }
  return kp;
}

std::optional<std::uint64_t> propagation_latency(const Trace& trace, std::size_t key, double q) {
  const auto kp = key_propagation(trace, key);
  for (std::size_t j = 0; j < kp.informed.size(); ++j) {
    const auto need = static_cast<std::uint64_t>(
        std::ceil(q * static_cast<double>(kp.alive[j]) - 1e-9));
    if (kp.alive[j] > 0 && kp.informed[j] >= need) return j;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> full_convergence_time(const Trace& trace, std::size_t key) {
  return key_propagation(trace, key).fct;
}

std::optional<std::uint64_t> divergence_window(const Trace& trace, std::size_t key) {
  return key_propagation(trace, key).dw;
}

double propagation_coverage(const Trace& trace, std::size_t key, std::uint64_t deadline) {
  if (trace.samples.empty()) return 0.0;
  const auto fp = final_fingerprint(trace, key);
  std::size_t idx = trace.samples.size() - 1;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (trace.samples[i].round >= deadline) {
      idx = i;
      break;
    }
  }
  const auto& s = trace.samples[idx];
  if (s.alive.empty()) return 0.0;
  return static_cast<double>(holders(s, key, fp)) / static_cast<double>(s.alive.size());
}

std::optional<double> redundancy_overhead(const Trace& trace, std::size_t key) {
  return key_propagation(trace, key).ro;
}

std::vector<MparPoint> mpar(const Trace& trace) {
  std::vector<MparPoint> out;
  if (trace.samples.empty() || trace.round_len == 0) return out;
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> per_round;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::Send || e.a != static_cast<std::uint64_t>(Channel::Gossip)) continue;
    auto& slot = per_round[e.tick / trace.round_len];
    if (e.b & kInitiationFlag) {
      ++slot.first;
    } else {
      ++slot.second;
    }
  }
  for (const auto& s : trace.samples) {
    MparPoint p;
    p.round = s.round;
    if (!s.alive.empty()) {
      auto it = per_round.find(s.round);
      if (it != per_round.end()) {
        const double n = static_cast<double>(s.alive.size());
        p.initiations = static_cast<double>(it->second.first) / n;
        p.replies = static_cast<double>(it->second.second) / n;
      }
    }
    out.push_back(p);
  }
  return out;
}

FailureStats failure_propagation_delay(const Trace& trace) {
  FailureStats st;
  std::map<std::uint64_t, Tick> crash_tick;
  std::map<std::uint64_t, Tick> join_tick;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Crash && !crash_tick.count(e.agent)) crash_tick[e.agent] = e.tick;
    if (e.kind == EventKind::Join) join_tick[e.agent] = e.tick;
  }
  st.crashes = crash_tick.size();

  // First Failed confirmation per (observer, peer).
  std::map<std::pair<std::uint64_t, std::uint64_t>, Tick> confirmed;
  const auto failed = static_cast<std::uint64_t>(PeerStatus::Failed);
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::Transition || e.b != failed) continue;
    auto c = crash_tick.find(e.peer);
    if (c == crash_tick.end() || c->second > e.tick) {
      ++st.false_confirmations;
      continue;
    }
    confirmed.emplace(std::make_pair(e.agent, e.peer), e.tick);
  }

  if (trace.samples.empty() || trace.round_len == 0) return st;
  const auto& survivors = trace.samples.back().alive;
  double sum = 0.0;
  std::uint64_t n = 0;
  double worst = 0.0;
  bool all_detected = true;
  for (const auto& [peer, tick] : crash_tick) {
    for (auto obs : survivors) {
      if (obs == peer) continue;
      auto j = join_tick.find(obs);
      if (j != join_tick.end() && j->second >= tick) continue;
      ++st.expected_detections;
      auto c = confirmed.find({obs, peer});
      if (c == confirmed.end()) {
        all_detected = false;
        continue;
      }
      ++st.detections;
      const double rounds =
          static_cast<double>(c->second - tick) / static_cast<double>(trace.round_len);
      sum += rounds;
      ++n;
      worst = std::max(worst, rounds);
    }
  }
  if (n > 0) st.mean_rounds = sum / static_cast<double>(n);
  if (n > 0 && all_detected) st.max_rounds = worst;
  return st;
}

std::optional<double> staleness_index(const Trace& trace) {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Decision) {
      sum += e.x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

namespace {

bool fully_covered(const RoundSample& s, std::size_t key, std::uint64_t fp) {
  return !s.alive.empty() && holders(s, key, fp) == s.alive.size();
}

std::vector<std::size_t> injected_keys(const Trace& trace) {
  std::set<std::size_t> keys;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Inject && e.a < trace.keys.size()) keys.insert(e.a);
  }
  return {keys.begin(), keys.end()};
}

std::optional<Tick> last_heal(const Trace& trace) {
  std::optional<Tick> t;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::PartitionEnd) t = e.tick;
  }
  return t;
}

std::vector<std::size_t> keys_before(const Trace& trace, Tick tick) {
  std::vector<std::size_t> out;
  for (auto k : injected_keys(trace)) {
    auto t = inject_tick(trace, k);
    if (t && *t < tick) out.push_back(k);
  }
  return out;
}

}  // namespace

std::optional<double> availability_under_churn(const Trace& trace) {
  const auto keys = injected_keys(trace);
  if (keys.empty() || trace.samples.empty()) return std::nullopt;
  std::uint64_t ok = 0;
  for (auto k : keys) {
    if (fully_covered(trace.samples.back(), k, final_fingerprint(trace, k))) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(keys.size());
}

std::optional<double> network_partition_recovery(const Trace& trace) {
  const auto heal = last_heal(trace);
  if (!heal || trace.samples.empty()) return std::nullopt;
  const auto keys = keys_before(trace, *heal);
  if (keys.empty()) return std::nullopt;
  std::uint64_t ok = 0;
  for (auto k : keys) {
    if (fully_covered(trace.samples.back(), k, final_fingerprint(trace, k))) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(keys.size());
}

std::optional<std::uint64_t> partition_recovery_rounds(const Trace& trace) {
  const auto heal = last_heal(trace);
  if (!heal) return std::nullopt;
  const auto keys = keys_before(trace, *heal);
  if (keys.empty()) return std::nullopt;
  std::vector<std::uint64_t> fps;
  for (auto k : keys) fps.push_back(final_fingerprint(trace, k));
  const auto first = sample_at_or_after(trace, *heal);
  for (std::size_t i = first; i < trace.samples.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < keys.size() && all; ++j) {
      all = fully_covered(trace.samples[i], keys[j], fps[j]);
    }
    if (all) return trace.samples[i].round - trace.samples[first].round;
  }
  return std::nullopt;
}

std::optional<double> partition_resilience(const Trace& trace) {
  if (trace.keys.empty() || trace.samples.empty()) return std::nullopt;
  const auto& last = trace.samples.back();
  if (last.alive.empty()) return std::nullopt;
  double sum = 0.0;
  for (std::size_t k = 0; k < trace.keys.size(); ++k) {
    sum += static_cast<double>(holders(last, k, final_fingerprint(trace, k))) /
           static_cast<double>(last.alive.size());
  }
  return sum / static_cast<double>(trace.keys.size());
}

// ---------------------------------------------------------------------------
// Report

TrafficTotals traffic(const Trace& trace) {
  TrafficTotals t;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Send) {
      ++t.messages;
      t.bytes += e.c;
      switch (static_cast<Channel>(e.a)) {
        case Channel::Gossip:
          ++t.gossip_messages;
          t.gossip_bytes += e.c;
          t.envelope_transmissions += static_cast<std::uint64_t>(e.x);
          if (e.b & kInitiationFlag) {
            ++t.initiations;
          } else {
            ++t.replies;
          }
          break;
        case Channel::Shuffle:
          ++t.shuffle_messages;
          break;
        case Channel::Direct:
          ++t.direct_messages;
          t.direct_bytes += e.c;
          break;
      }
    } else if (e.kind == EventKind::Drop) {
      switch (static_cast<DropReason>(e.b)) {
        case DropReason::Random:
          ++t.dropped;
          break;
        case DropReason::Blocked:
          ++t.partition_blocked;
          break;
        case DropReason::DeadReceiver:
          ++t.dead_receiver;
          break;
      }
    }
  }
  return t;
}

MetricsReport compute_report(const Trace& trace, const std::string& scenario,
                             const std::string& mode) {
  MetricsReport r;
  r.scenario = scenario;
  r.mode = mode;
  r.seed = trace.seed;
  r.timed_out = trace.timed_out;
  r.trace_hash = trace_hash(trace);
  r.environment_hash = trace.environment_hash;
  r.rounds = trace.samples.size();

  for (std::size_t k = 0; k < trace.keys.size(); ++k) r.keys.push_back(key_propagation(trace, k));
  r.divergence = divergence_series(trace);
  r.eta = estimate_eta(r.divergence);
  if (!r.keys.empty() && !r.keys.front().alive.empty()) {
    const auto& kp = r.keys.front();
    std::vector<double> y(kp.informed.begin(), kp.informed.end());
    r.beta = fit_beta(y, static_cast<double>(kp.alive.front()));
  }

  r.mpar_series = mpar(trace);
  if (!r.mpar_series.empty()) {
    for (const auto& p : r.mpar_series) {
      r.mpar_initiations += p.initiations;
      r.mpar_replies += p.replies;
    }
    r.mpar_initiations /= static_cast<double>(r.mpar_series.size());
    r.mpar_replies /= static_cast<double>(r.mpar_series.size());
  }
  r.traffic = traffic(trace);
  r.failures = failure_propagation_delay(trace);
  r.staleness = staleness_index(trace);
  r.auc = availability_under_churn(trace);
  r.npr = network_partition_recovery(trace);
  r.npr_rounds = partition_recovery_rounds(trace);
  r.partition_resilience = partition_resilience(trace);

  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Counter) r.counters[e.label] = e.c;
    if (e.kind == EventKind::ScenarioMetric) r.scenario_metrics[e.label] = e.x;
  }
  if (r.traffic.envelope_transmissions > 0) {
    const auto get = [&](const char* name) -> double {
      auto it = r.counters.find(name);
      return it == r.counters.end() ? 0.0 : static_cast<double>(it->second);
    };
    r.sde_proxy = (get("apply_new") + get("apply_updated")) /
                  static_cast<double>(r.traffic.envelope_transmissions);
  }
  return r;
}

const std::vector<std::string>& core_summary_names() {
  static const std::vector<std::string> names = {
      "rounds",           "timed_out",          "keys_tracked",
      "pl_mean",          "pl_max",             "fct_mean",
      "fct_max",          "dw_mean",            "final_coverage_mean",
      "ro_mean",          "eta_hat",            "eta_r2",
      "beta_hat",         "beta_r2",            "mpar_initiations",
      "mpar_replies",     "total_messages",     "total_bytes",
      "gossip_bytes",     "direct_bytes",       "envelope_transmissions",
      "dropped",          "partition_blocked",  "fpd_mean_rounds",
      "fpd_max_rounds",   "false_confirmations", "detections",
      "staleness_index",  "auc",                "npr",
      "npr_rounds",       "partition_resilience", "sde_proxy",
      "duplicates",       "rejected",           "verify_fail",
      "held",             "corroboration_commits", "corroboration_expired",
      "critical_overflow"};
  return names;
}

namespace {

template <typename T>
std::optional<double> opt(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

// Mean and max over keys where the metric is defined; absent if any key lacks it.
template <typename Get>
std::pair<std::optional<double>, std::optional<double>> mean_max(
    const std::vector<KeyPropagation>& keys, Get get) {
  if (keys.empty()) return {std::nullopt, std::nullopt};
  double sum = 0.0;
  double mx = 0.0;
  for (const auto& k : keys) {
    const auto v = get(k);
    if (!v) return {std::nullopt, std::nullopt};
    sum += *v;
    mx = std::max(mx, *v);
  }
  return {sum / static_cast<double>(keys.size()), mx};
}

}  // namespace

std::vector<std::pair<std::string, std::optional<double>>> MetricsReport::summary(
    const std::vector<std::string>& scenario_metric_names) const {
  std::map<std::string, std::optional<double>> v;
  v["rounds"] = static_cast<double>(rounds);
  v["timed_out"] = timed_out ? 1.0 : 0.0;
  v["keys_tracked"] = static_cast<double>(keys.size());
  std::tie(v["pl_mean"], v["pl_max"]) = mean_max(keys, [](const auto& k) { return opt(k.pl); });
  std::tie(v["fct_mean"], v["fct_max"]) = mean_max(keys, [](const auto& k) { return opt(k.fct); });
  v["dw_mean"] = mean_max(keys, [](const auto& k) { return opt(k.dw); }).first;
  v["final_coverage_mean"] = mean_max(keys, [](const auto& k) {
                               return std::optional<double>(k.final_coverage);
                             }).first;
  v["ro_mean"] = mean_max(keys, [](const auto& k) { return k.ro; }).first;
  v["eta_hat"] = eta.eta;
  v["eta_r2"] = eta.eta ? std::optional<double>(eta.r_squared) : std::nullopt;
  if (beta && !beta->degenerate) {
    v["beta_hat"] = beta->beta;
    v["beta_r2"] = beta->r_squared;
  }
  v["mpar_initiations"] = mpar_initiations;
  v["mpar_replies"] = mpar_replies;
  v["total_messages"] = static_cast<double>(traffic.messages);
  v["total_bytes"] = static_cast<double>(traffic.bytes);
  v["gossip_bytes"] = static_cast<double>(traffic.gossip_bytes);
  v["direct_bytes"] = static_cast<double>(traffic.direct_bytes);
  v["envelope_transmissions"] = static_cast<double>(traffic.envelope_transmissions);
  v["dropped"] = static_cast<double>(traffic.dropped);
  v["partition_blocked"] = static_cast<double>(traffic.partition_blocked);
  v["fpd_mean_rounds"] = failures.mean_rounds;
  v["fpd_max_rounds"] = failures.max_rounds;
  v["false_confirmations"] = static_cast<double>(failures.false_confirmations);
  v["detections"] = static_cast<double>(failures.detections);
  v["staleness_index"] = staleness;
  v["auc"] = auc;
  v["npr"] = npr;
  v["npr_rounds"] = opt(npr_rounds);
  v["partition_resilience"] = partition_resilience;
  v["sde_proxy"] = sde_proxy;
  for (const char* c : {"duplicates", "rejected", "verify_fail", "held", "corroboration_commits",
                        "corroboration_expired", "critical_overflow"}) {
    auto it = counters.find(c);
    v[c] = static_cast<double>(it == counters.end() ? 0 : it->second);
  }

  std::vector<std::pair<std::string, std::optional<double>>> out;
  for (const auto& name : core_summary_names()) out.emplace_back(name, v[name]);
  for (const auto& name : scenario_metric_names) {
    auto it = scenario_metrics.find(name);
    out.emplace_back(name, it == scenario_metrics.end() ? std::nullopt
                                                        : std::optional<double>(it->second));
  }
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  return json(v).dump();
}

namespace {

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string report_json(const MetricsReport& r,
                        const std::vector<std::string>& scenario_metric_names) {
  json j;
  j["scenario"] = r.scenario;
  j["mode"] = r.mode;
  j["protocol"] = r.protocol;
  j["seed"] = r.seed;
  j["timed_out"] = r.timed_out;
  j["trace_hash"] = r.trace_hash;
  j["environment_hash"] = r.environment_hash;
  j["rounds"] = r.rounds;

  json summary = json::object();
  for (const auto& [name, value] : r.summary(scenario_metric_names)) {
    summary[name] = opt_json(value);
  }
  j["summary"] = std::move(summary);

  json keys = json::array();
  for (const auto& k : r.keys) {
    keys.push_back({{"key", k.key},
                    {"injection_round", k.injection_round},
                    {"informed", k.informed},
                    {"alive", k.alive},
                    {"pl", opt_json(k.pl)},
                    {"fct", opt_json(k.fct)},
                    {"dw", opt_json(k.dw)},
                    {"final_coverage", k.final_coverage},
                    {"transmissions", k.transmissions},
                    {"ro", opt_json(k.ro)}});
  }
  j["keys"] = std::move(keys);
  j["divergence"] = r.divergence;
  j["eta"] = {{"eta", opt_json(r.eta.eta)},
              {"r_squared", r.eta.r_squared},
              {"pairs", r.eta.pairs},
              {"converged_at_start", r.eta.converged_at_start}};
  if (r.beta) {
    j["beta"] = {{"beta", r.beta->beta},
                 {"r_squared", r.beta->r_squared},
                 {"degenerate", r.beta->degenerate},
                 {"non_monotone", r.beta->non_monotone},
                 {"uninformed_fraction", r.beta->uninformed_fraction}};
  }
  json series = json::array();
  for (const auto& p : r.mpar_series) series.push_back({p.round, p.initiations, p.replies});
  j["mpar_series"] = std::move(series);
  j["failures"] = {{"crashes", r.failures.crashes},
                   {"expected_detections", r.failures.expected_detections},
                   {"detections", r.failures.detections},
                   {"false_confirmations", r.failures.false_confirmations},
                   {"mean_rounds", opt_json(r.failures.mean_rounds)},
                   {"max_rounds", opt_json(r.failures.max_rounds)}};
  j["counters"] = r.counters;
  j["scenario_metrics"] = r.scenario_metrics;
  return j.dump(2) + "\n";
}

std::string report_csv(const MetricsReport& r,
                       const std::vector<std::string>& scenario_metric_names, bool with_header) {
  std::ostringstream out;
  if (with_header) out << "scenario,mode,seed,metric,value\n";
  for (const auto& [name, value] : r.summary(scenario_metric_names)) {
    out << r.scenario << ',' << r.mode << ',' << r.seed << ',' << name << ','
        << (value ? format_number(*value) : std::string()) << '\n';
  }
  return out.str();
}

}  // namespace geacl
