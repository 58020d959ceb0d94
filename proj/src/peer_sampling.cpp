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

#include "geacl/peer_sampling.hpp"

#include <algorithm>
#include <set>

namespace geacl {

namespace {

// Partial Fisher-Yates: the first k positions become a uniform sample.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t k, Rng& rng) {
  k = std::min(k, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform(items.size() - i));
    std::swap(items[i], items[j]);
  }
}

// Oldest first; ties broken by smaller id.
bool older(const ViewEntry& a, const ViewEntry& b) {
  if (a.age != b.age) return a.age > b.age;
  return a.peer < b.peer;
}

}  // namespace

bool PartialView::contains(AgentId peer) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const ViewEntry& e) { return e.peer == peer; });
}

std::vector<AgentId> PartialView::peers() const {
  std::vector<AgentId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.peer);
  return out;
}

bool PartialView::valid() const {
  if (entries_.size() > capacity_) return false;
  std::set<AgentId> seen;
  for (const auto& e : entries_) {
    if (e.peer == owner_) return false;
    if (!seen.insert(e.peer).second) return false;
  }
  return true;
}

PartialView init_view(AgentId owner, const std::vector<AgentId>& bootstrap, std::size_t capacity,
                      Rng* rng) {
  if (capacity == 0) throw Error(Error::Code::kInvalidArgument, "view capacity must be >= 1");
  std::vector<AgentId> candidates;
  std::set<AgentId> seen;
  for (auto peer : bootstrap) {
    if (peer == owner || !seen.insert(peer).second) continue;
    candidates.push_back(peer);
  }
  if (candidates.empty()) throw Error(Error::Code::kIsolatedAgent, "isolated agent");
  if (rng != nullptr && candidates.size() > capacity) partial_shuffle(candidates, capacity, *rng);
  candidates.resize(std::min(capacity, candidates.size()));

  PartialView view(owner, capacity);
  for (auto peer : candidates) view.entries_.push_back({peer, 0});
  return view;
}

PartialView replace_entries(const PartialView& view, const std::vector<AgentId>& peers) {
  PartialView out(view.owner(), view.capacity());
  for (auto peer : peers) {
    if (out.entries_.size() >= out.capacity_) break;
    if (peer == out.owner_ || out.contains(peer)) continue;
    out.entries_.push_back({peer, 0});
  }
  return out;
}

std::vector<AgentId> select_peers(const PartialView& view, std::size_t fanout, Rng& rng,
                                  const std::map<AgentId, double>* weights) {
  if (fanout == 0) throw Error(Error::Code::kInvalidArgument, "fanout must be >= 1");
  std::vector<AgentId> pool = view.peers();
  if (pool.empty()) return {};

  bool weighted = false;
  std::vector<double> w;
  if (weights != nullptr) {
    w.reserve(pool.size());
    for (auto peer : pool) {
      auto it = weights->find(peer);
      const double x = it == weights->end() ? 0.0 : std::max(0.0, it->second);
      w.push_back(x);
      if (x > 0.0) weighted = true;
    }
  }

  if (!weighted) {
    partial_shuffle(pool, fanout, rng);
    pool.resize(std::min(fanout, pool.size()));
    return pool;
  }

  std::vector<AgentId> out;
  while (out.size() < fanout) {
    double total = 0.0;
    for (double x : w) total += x;
    if (total <= 0.0) break;
    double pick = rng.next_double() * total;
    std::size_t chosen = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) continue;
      chosen = i;
      if (pick < w[i]) break;
      pick -= w[i];
    }
    out.push_back(pool[chosen]);
    w[chosen] = 0.0;
  }
  return out;
}

ShuffleOffer shuffle_initiate(PartialView& view, std::size_t shuffle_len, Rng& rng) {
  if (view.entries_.empty()) throw Error(Error::Code::kNothingToShuffle, "nothing to shuffle");
  if (shuffle_len == 0 || shuffle_len > view.capacity_) {
    throw Error(Error::Code::kInvalidArgument, "shuffle length must be in [1, capacity]");
  }
  for (auto& e : view.entries_) ++e.age;

  const auto target_it = std::min_element(view.entries_.begin(), view.entries_.end(), older);
  ShuffleOffer offer;
  offer.target = target_it->peer;

  std::vector<ViewEntry> rest;
  for (const auto& e : view.entries_) {
    if (e.peer != offer.target) rest.push_back(e);
  }
  const std::size_t take = std::min(shuffle_len - 1, rest.size());
  partial_shuffle(rest, take, rng);
  offer.sample.push_back({view.owner_, 0});
  offer.sample.insert(offer.sample.end(), rest.begin(), rest.begin() + static_cast<long>(take));
  return offer;
}

std::vector<ViewEntry> shuffle_respond(const PartialView& view, std::size_t shuffle_len,
                                       AgentId initiator, Rng& rng) {
  std::vector<ViewEntry> pool;
  for (const auto& e : view.entries()) {
    if (e.peer != initiator) pool.push_back(e);
  }
  const std::size_t take = std::min(shuffle_len, pool.size());
  partial_shuffle(pool, take, rng);
  pool.resize(take);
  return pool;
}

PartialView shuffle_merge(const PartialView& view, const std::vector<ViewEntry>& sent,
                          const std::vector<ViewEntry>& received) {
  PartialView out = view;
  auto& entries = out.entries_;

  for (const auto& r : received) {
    if (r.peer == out.owner_) continue;
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const ViewEntry& e) { return e.peer == r.peer; });
    if (it != entries.end()) {
      it->age = std::min(it->age, r.age);
    } else {
      entries.push_back(r);
    }
  }

  auto in_sent = [&](AgentId peer) {
    return std::any_of(sent.begin(), sent.end(), [&](const ViewEntry& s) { return s.peer == peer; });
  };
  auto in_received = [&](AgentId peer) {
    return std::any_of(received.begin(), received.end(),
                       [&](const ViewEntry& r) { return r.peer == peer; });
  };

  // Evict entries we handed out (and did not just get back), oldest first.
  while (entries.size() > out.capacity_) {
    auto victim = entries.end();
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      if (!in_sent(it->peer) || in_received(it->peer)) continue;
      if (victim == entries.end() || older(*it, *victim)) victim = it;
    }
    if (victim == entries.end()) break;
    entries.erase(victim);
  }
  while (entries.size() > out.capacity_) {
    entries.erase(std::min_element(entries.begin(), entries.end(), older));
  }
  return out;
}

std::size_t encoded_size(const ShuffleMessage& msg) {
  return 1 + 8 + 4 + msg.entries.size() * 12;
}

}  // namespace geacl
