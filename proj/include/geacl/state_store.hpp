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

#ifndef GEACL_STATE_STORE_HPP_
#define GEACL_STATE_STORE_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geacl/core.hpp"

namespace geacl {

struct MergePolicy {
  enum class Kind { LwwRegister, MaxCounter, GrowOnlySetUnion, VectorBlend };

  Kind kind{Kind::LwwRegister};
  double alpha{1.0};  // VectorBlend only, in (0, 1]

  bool operator==(const MergePolicy&) const = default;
};

/// Key-prefix dispatch: "hb/" MaxCounter, "cap/" GrowOnlySetUnion,
/// "emb/" VectorBlend(alpha), everything else LwwRegister.
MergePolicy policy_for_key(std::string_view key, double blend_alpha = 1.0);

struct StoreEntry {
  /// For set keys this is the contributor with the greatest LWW stamp; for
  /// VectorBlend it carries the blended vector.
  Envelope envelope;
  Tick applied_tick{0};
  MergePolicy policy;
  std::optional<std::set<Value>> set_elements;
  /// Set keys only: every live envelope that contributed an element.
  std::map<EnvelopeId, Envelope> contributors;
};

struct MergeResult {
  StoreEntry entry;
  bool changed{false};
};

/// Orders two envelopes by (created_tick, origin, seq); true when `a` wins.
bool lww_wins(const Envelope& a, const Envelope& b);

/// Merges `remote` into `local` under `policy`. Throws Error(kTypeConfusion)
/// when the value variant does not fit the policy.
MergeResult merge_entry(const std::optional<StoreEntry>& local, const Envelope& remote,
                        const MergePolicy& policy, Tick now);

enum class ApplyOutcome { New, Updated, Stale, Rejected };

std::string_view to_string(ApplyOutcome o);

/// Envelopes owed to a peer, plus the origins whose share was cut by the cap.
struct DeltaBatch {
  std::vector<Envelope> envelopes;
  std::vector<AgentId> truncated_origins;

  bool complete() const { return truncated_origins.empty(); }
};

/// Per-agent semantic state: versioned entries under key-prefix merge
/// policies, with an exact digest of every id ever absorbed.
class Store {
 public:
  Store() = default;
  explicit Store(AgentId owner, double blend_alpha = 1.0) : owner_(owner), blend_alpha_(blend_alpha) {}

  AgentId owner() const { return owner_; }

  Envelope put_local(const std::string& key, Value value, PriorityClass priority,
                     std::uint32_t ttl_rounds, Tick now);
  /// Two-step put for callers that sign before storing: reserve the next
  /// local sequence number, then commit the (possibly signed) envelope.
  Envelope make_local(const std::string& key, Value value, PriorityClass priority,
                      std::uint32_t ttl_rounds, Tick now);
  ApplyOutcome commit_local(const Envelope& env, Tick now) { return apply(env, now); }
  ApplyOutcome apply_remote(const Envelope& env, Tick now);

  const Digest& digest() const { return digest_; }
  VersionVector frontier() const { return digest_.frontier(); }
  /// Folds in a peer's coverage for origins the peer answered completely.
  void absorb_coverage(const Digest& remote, const std::vector<AgentId>& except_origins);

  /// Live envelopes not covered by `remote`, ordered by priority desc,
  /// created_tick asc, origin asc, seq asc, truncated to `cap`.
  DeltaBatch delta_for(const Digest& remote, std::size_t cap) const;
  std::vector<Envelope> entries_since(const VersionVector& remote, std::size_t cap) const;
  std::vector<Envelope> entries_since(const Digest& remote, std::size_t cap) const;

  /// Drops entries more than ttl_rounds whole rounds old. Ids stay covered.
  std::vector<std::string> expire(Tick now, Tick round_len);

  const StoreEntry* get(const std::string& key) const;
  const std::map<std::string, StoreEntry>& entries() const { return entries_; }
  std::vector<Envelope> live_envelopes() const;
  bool is_live(const Envelope& env) const;
  std::uint64_t next_seq() const { return next_seq_; }
  std::size_t size() const { return entries_.size(); }

 private:
  ApplyOutcome apply(const Envelope& env, Tick now);

  AgentId owner_;
  double blend_alpha_{1.0};
  std::map<std::string, StoreEntry> entries_;
  std::uint64_t next_seq_{1};
  Digest digest_;
};

/// Stable 64-bit fingerprint of an entry's merged value (never 0).
std::uint64_t value_fingerprint(const StoreEntry& entry);

/// Expiry rule shared by the store and the gossip layer.
inline bool is_expired(const Envelope& env, Tick now, Tick round_len) {
  if (round_len == 0 || now < env.created_tick) return false;
  return (now - env.created_tick) / round_len > env.ttl_rounds;
}

}  // namespace geacl

#endif  // GEACL_STATE_STORE_HPP_
