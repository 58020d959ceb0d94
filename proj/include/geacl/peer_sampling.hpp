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

#ifndef GEACL_PEER_SAMPLING_HPP_
#define GEACL_PEER_SAMPLING_HPP_

#include <map>
#include <optional>
#include <vector>

#include "geacl/core.hpp"

namespace geacl {

struct ViewEntry {
  AgentId peer;
  std::uint32_t age{0};

  bool operator==(const ViewEntry&) const = default;
};

/// Bounded, aged neighbour sample maintained by CYCLON-style shuffles.
/// Invariants: size <= capacity, no duplicate peers, owner never present.
class PartialView {
 public:
  PartialView() = default;
  PartialView(AgentId owner, std::size_t capacity) : owner_(owner), capacity_(capacity) {}

  AgentId owner() const { return owner_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<ViewEntry>& entries() const { return entries_; }
  bool contains(AgentId peer) const;
  std::vector<AgentId> peers() const;

  /// Checks every invariant; used by tests and debug assertions.
  bool valid() const;

 private:
  friend PartialView init_view(AgentId, const std::vector<AgentId>&, std::size_t, Rng*);
  friend struct ShuffleOffer shuffle_initiate(PartialView&, std::size_t, Rng&);
  friend PartialView shuffle_merge(const PartialView&, const std::vector<ViewEntry>&,
                                   const std::vector<ViewEntry>&);
  friend PartialView replace_entries(const PartialView&, const std::vector<AgentId>&);

  AgentId owner_;
  std::size_t capacity_{0};
  std::vector<ViewEntry> entries_;
};

/// Builds a view of min(capacity, |bootstrap|) distinct peers at age 0.
/// When the filtered bootstrap exceeds capacity and `rng` is given, a uniform
/// subset is kept; otherwise the first `capacity` distinct peers.
/// Throws Error(kIsolatedAgent) when nothing remains after removing the owner.
PartialView init_view(AgentId owner, const std::vector<AgentId>& bootstrap, std::size_t capacity,
                      Rng* rng = nullptr);

/// Replaces the contents of a view wholesale (contact-driven overlays).
PartialView replace_entries(const PartialView& view, const std::vector<AgentId>& peers);

/// Gossip partner selection. Unweighted: uniform without replacement.
/// Weighted: proportional to weight without replacement; zero-weight peers are
/// skipped unless every weight is zero, in which case selection is uniform.
std::vector<AgentId> select_peers(const PartialView& view, std::size_t fanout, Rng& rng,
                                  const std::map<AgentId, double>* weights = nullptr);

struct ShuffleOffer {
  AgentId target;
  std::vector<ViewEntry> sample;  // includes the owner's fresh self-entry
};

/// Ages every entry, then picks the oldest peer (ties -> smaller id) as the
/// shuffle target and a random sample of the rest plus owner@0.
/// Throws Error(kNothingToShuffle) on an empty view.
ShuffleOffer shuffle_initiate(PartialView& view, std::size_t shuffle_len, Rng& rng);

/// Passive side: up to `shuffle_len` random entries, excluding `initiator`.
std::vector<ViewEntry> shuffle_respond(const PartialView& view, std::size_t shuffle_len,
                                       AgentId initiator, Rng& rng);

/// Inserts `received` (self and duplicates dropped, younger copy kept).
/// Over capacity, evicts entries listed in `sent` first, then the oldest
/// (ties -> smaller id).
PartialView shuffle_merge(const PartialView& view, const std::vector<ViewEntry>& sent,
                          const std::vector<ViewEntry>& received);

/// Shuffle exchange carried over the simulated network.
struct ShuffleMessage {
  bool is_reply{false};
  AgentId sender;
  std::vector<ViewEntry> entries;
};

std::size_t encoded_size(const ShuffleMessage& msg);

}  // namespace geacl

#endif  // GEACL_PEER_SAMPLING_HPP_
