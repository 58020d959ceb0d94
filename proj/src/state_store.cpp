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

#include "geacl/state_store.hpp"

#include <algorithm>

namespace geacl {

MergePolicy policy_for_key(std::string_view key, double blend_alpha) {
  if (key.starts_with("hb/")) return {MergePolicy::Kind::MaxCounter, 1.0};
  if (key.starts_with("cap/")) return {MergePolicy::Kind::GrowOnlySetUnion, 1.0};
  if (key.starts_with("emb/")) return {MergePolicy::Kind::VectorBlend, blend_alpha};
  return {MergePolicy::Kind::LwwRegister, 1.0};
}

std::string_view to_string(ApplyOutcome o) {
  switch (o) {
    case ApplyOutcome::New:
      return "New";
    case ApplyOutcome::Updated:
      return "Updated";
    case ApplyOutcome::Stale:
      return "Stale";
    case ApplyOutcome::Rejected:
      return "Rejected";
  }
  return "Stale";
}

bool lww_wins(const Envelope& a, const Envelope& b) {
  if (a.created_tick != b.created_tick) return a.created_tick > b.created_tick;
  if (a.origin != b.origin) return a.origin > b.origin;
  return a.seq > b.seq;
}

namespace {

[[noreturn]] void type_confusion(const Envelope& env, std::string_view why) {
  throw Error(Error::Code::kTypeConfusion,
              "type confusion on key '" + env.key + "': " + std::string(why));
}

void check_variant(const Envelope& env, const MergePolicy& policy) {
  if (!value_is_valid(env.value)) type_confusion(env, "empty symbol");
  switch (policy.kind) {
    case MergePolicy::Kind::MaxCounter:
      if (!std::holds_alternative<Counter>(env.value)) type_confusion(env, "MaxCounter needs Counter");
      break;
    case MergePolicy::Kind::VectorBlend:
      if (!std::holds_alternative<Embedding>(env.value)) {
        type_confusion(env, "VectorBlend needs Vector");
      }
      if (!(policy.alpha > 0.0 && policy.alpha <= 1.0)) type_confusion(env, "alpha outside (0,1]");
      break;
    default:
      break;
  }
}

StoreEntry fresh_entry(const Envelope& env, const MergePolicy& policy, Tick now) {
  StoreEntry e;
  e.envelope = env;
  e.applied_tick = now;
  e.policy = policy;
  if (policy.kind == MergePolicy::Kind::GrowOnlySetUnion) {
    e.set_elements = std::set<Value>{env.value};
    e.contributors.emplace(env.id(), env);
  }
  return e;
}

}  // namespace

MergeResult merge_entry(const std::optional<StoreEntry>& local, const Envelope& remote,
                        const MergePolicy& policy, Tick now) {
  check_variant(remote, policy);
  if (!local) return {fresh_entry(remote, policy, now), true};

  StoreEntry entry = *local;
  entry.policy = policy;
  bool changed = false;

  switch (policy.kind) {
    case MergePolicy::Kind::LwwRegister:
      if (lww_wins(remote, entry.envelope)) {
        entry.envelope = remote;
        changed = true;
      }
      break;

    case MergePolicy::Kind::MaxCounter: {
      const auto* mine = std::get_if<Counter>(&entry.envelope.value);
      if (mine == nullptr) type_confusion(remote, "stored value is not a Counter");
      const auto theirs = std::get<Counter>(remote.value);
      if (theirs.value > mine->value ||
          (theirs.value == mine->value && lww_wins(remote, entry.envelope))) {
        entry.envelope = remote;
        changed = true;
      }
      break;
    }

    case MergePolicy::Kind::GrowOnlySetUnion:
      if (!entry.contributors.contains(remote.id())) {
        entry.contributors.emplace(remote.id(), remote);
        if (!entry.set_elements) entry.set_elements.emplace();
        entry.set_elements->insert(remote.value);
        if (lww_wins(remote, entry.envelope)) entry.envelope = remote;
        changed = true;
      }
      break;

    case MergePolicy::Kind::VectorBlend: {
      const auto* mine = std::get_if<Embedding>(&entry.envelope.value);
      const auto& theirs = std::get<Embedding>(remote.value);
      if (mine == nullptr || mine->components.size() != theirs.components.size()) {
        type_confusion(remote, "vector dimension mismatch");
      }
      if (lww_wins(remote, entry.envelope)) {
        Embedding blended;
        blended.components.resize(theirs.components.size());
        for (std::size_t i = 0; i < blended.components.size(); ++i) {
          blended.components[i] =
              (1.0 - policy.alpha) * mine->components[i] + policy.alpha * theirs.components[i];
        }
        entry.envelope = remote;
        entry.envelope.value = std::move(blended);
        changed = true;
      }
      break;
    }
  }
  if (changed) entry.applied_tick = now;
  return {std::move(entry), changed};
}

// ---------------------------------------------------------------------------
// Store

Envelope Store::put_local(const std::string& key, Value value, PriorityClass priority,
                          std::uint32_t ttl_rounds, Tick now) {
  Envelope env = make_local(key, std::move(value), priority, ttl_rounds, now);
  apply(env, now);
  return env;
}

Envelope Store::make_local(const std::string& key, Value value, PriorityClass priority,
                           std::uint32_t ttl_rounds, Tick now) {
  if (ttl_rounds == 0) throw Error(Error::Code::kInvalidArgument, "ttl_rounds must be >= 1");
  Envelope env;
  env.origin = owner_;
  env.seq = next_seq_++;
  env.key = key;
  env.value = std::move(value);
  env.priority = priority;
  env.created_tick = now;
  env.ttl_rounds = ttl_rounds;
  env.hop_count = 0;
  return env;
}

ApplyOutcome Store::apply_remote(const Envelope& env, Tick now) { return apply(env, now); }

ApplyOutcome Store::apply(const Envelope& env, Tick now) {
  if (digest_.covers(env.id())) return ApplyOutcome::Stale;

  const auto policy = policy_for_key(env.key, blend_alpha_);
  auto it = entries_.find(env.key);
  std::optional<StoreEntry> local;
  if (it != entries_.end()) local = it->second;

  MergeResult merged;
  try {
    merged = merge_entry(local, env, policy, now);
  } catch (const Error& e) {
    if (e.code() == Error::Code::kTypeConfusion) return ApplyOutcome::Rejected;
    throw;
  }
  digest_.add(env.id());

  if (!local) {
    entries_.emplace(env.key, std::move(merged.entry));
    return ApplyOutcome::New;
  }
  if (!merged.changed) return ApplyOutcome::Stale;
  it->second = std::move(merged.entry);
  return ApplyOutcome::Updated;
}

void Store::absorb_coverage(const Digest& remote, const std::vector<AgentId>& except_origins) {
  if (except_origins.empty()) {
    digest_.unite(remote);
    return;
  }
  for (const auto& [origin, seqs] : remote.origins()) {
    if (std::find(except_origins.begin(), except_origins.end(), origin) != except_origins.end()) {
      continue;
    }
    digest_.unite_origin(origin, remote);
  }
}

namespace {

bool delta_order(const Envelope& a, const Envelope& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.created_tick != b.created_tick) return a.created_tick < b.created_tick;
  if (a.origin != b.origin) return a.origin < b.origin;
  return a.seq < b.seq;
}

}  // namespace

std::vector<Envelope> Store::live_envelopes() const {
  std::vector<Envelope> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) {
    if (entry.policy.kind == MergePolicy::Kind::GrowOnlySetUnion) {
      for (const auto& [id, env] : entry.contributors) out.push_back(env);
    } else {
      out.push_back(entry.envelope);
    }
  }
  return out;
}

bool Store::is_live(const Envelope& env) const {
  auto it = entries_.find(env.key);
  if (it == entries_.end()) return false;
  if (it->second.policy.kind == MergePolicy::Kind::GrowOnlySetUnion) {
    return it->second.contributors.contains(env.id());
  }
  return it->second.envelope.id() == env.id();
}

DeltaBatch Store::delta_for(const Digest& remote, std::size_t cap) const {
  if (cap == 0) throw Error(Error::Code::kInvalidArgument, "delta cap must be >= 1");
  std::vector<const Envelope*> owed;
  auto consider = [&](const Envelope& env) {
    if (!remote.covers(env.id())) owed.push_back(&env);
  };
  for (const auto& [key, entry] : entries_) {
    if (entry.policy.kind == MergePolicy::Kind::GrowOnlySetUnion) {
      for (const auto& [id, env] : entry.contributors) consider(env);
    } else {
      consider(entry.envelope);
    }
  }
  std::sort(owed.begin(), owed.end(),
            [](const Envelope* a, const Envelope* b) { return delta_order(*a, *b); });

  DeltaBatch batch;
  const std::size_t take = std::min(cap, owed.size());
  batch.envelopes.reserve(take);
  for (std::size_t i = 0; i < take; ++i) batch.envelopes.push_back(*owed[i]);
  for (std::size_t i = take; i < owed.size(); ++i) {
    const auto origin = owed[i]->origin;
    if (std::find(batch.truncated_origins.begin(), batch.truncated_origins.end(), origin) ==
        batch.truncated_origins.end()) {
      batch.truncated_origins.push_back(origin);
    }
  }
  std::sort(batch.truncated_origins.begin(), batch.truncated_origins.end());
  return batch;
}

std::vector<Envelope> Store::entries_since(const Digest& remote, std::size_t cap) const {
  return delta_for(remote, cap).envelopes;
}

std::vector<Envelope> Store::entries_since(const VersionVector& remote, std::size_t cap) const {
  return delta_for(Digest::from_frontier(remote), cap).envelopes;
}

std::vector<std::string> Store::expire(Tick now, Tick round_len) {
  std::vector<std::string> removed;
  for (auto it = entries_.begin(); it != entries_.end();) {
    auto& entry = it->second;
    bool drop = false;
    if (entry.policy.kind == MergePolicy::Kind::GrowOnlySetUnion) {
      bool any_removed = false;
      for (auto c = entry.contributors.begin(); c != entry.contributors.end();) {
        if (is_expired(c->second, now, round_len)) {
          c = entry.contributors.erase(c);
          any_removed = true;
        } else {
          ++c;
        }
      }
      if (entry.contributors.empty()) {
        drop = true;
      } else if (any_removed) {
        entry.set_elements.emplace();
        const Envelope* best = nullptr;
        for (const auto& [id, env] : entry.contributors) {
          entry.set_elements->insert(env.value);
          if (best == nullptr || lww_wins(env, *best)) best = &env;
        }
        entry.envelope = *best;
      }
    } else {
      drop = is_expired(entry.envelope, now, round_len);
    }
    if (drop) {
      removed.push_back(it->first);
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

const StoreEntry* Store::get(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::uint64_t value_fingerprint(const StoreEntry& entry) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  if (entry.set_elements) {
    for (const auto& v : *entry.set_elements) h = fnv1a64(canonical_value_bytes(v), h);
  } else {
    h = fnv1a64(canonical_value_bytes(entry.envelope.value), h);
  }
  return h == 0 ? 1 : h;
}

}  // namespace geacl
