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

#include "geacl/dissemination.hpp"

#include <algorithm>

namespace geacl {

std::string_view to_string(GossipMode m) {
  switch (m) {
    case GossipMode::Push:
      return "Push";
    case GossipMode::Pull:
      return "Pull";
    case GossipMode::PushPull:
      return "PushPull";
    case GossipMode::AntiEntropyOnly:
      return "AntiEntropyOnly";
  }
  return "PushPull";
}

std::optional<GossipMode> parse_gossip_mode(std::string_view name) {
  for (auto m : {GossipMode::Push, GossipMode::Pull, GossipMode::PushPull,
                 GossipMode::AntiEntropyOnly}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

bool GossipConfig::valid() const {
  return fanout >= 1 && round_len >= 1 && suppression_k >= 1 && delta_cap >= 1 &&
         critical_suppression_multiplier >= 1;
}

std::string_view to_string(GossipKind k) {
  switch (k) {
    case GossipKind::Rumor:
      return "Rumor";
    case GossipKind::DigestRequest:
      return "DigestRequest";
    case GossipKind::Delta:
      return "Delta";
    case GossipKind::PushPullExchange:
      return "PushPullExchange";
  }
  return "Rumor";
}

std::size_t encoded_size(const GossipMessage& msg) {
  std::size_t n = 1 + 8 + 4;
  for (const auto& env : msg.envelopes) n += encoded_size(env);
  if (msg.kind != GossipKind::Rumor) n += msg.digest.encoded_size();
  if (msg.kind == GossipKind::Delta) n += 4 + 8 * msg.truncated_origins.size();
  return n;
}

bool well_formed(const GossipMessage& msg, std::uint32_t delta_cap) {
  if (msg.kind == GossipKind::DigestRequest && !msg.envelopes.empty()) return false;
  const auto bounded = std::count_if(msg.envelopes.begin(), msg.envelopes.end(),
                                     [](const Envelope& e) {
                                       return e.priority != PriorityClass::Critical;
                                     });
  return static_cast<std::size_t>(bounded) <= delta_cap;
}

// ---------------------------------------------------------------------------
// GossipAgent

GossipAgent::GossipAgent(AgentId id, const AgentConfig& config, Rng rng, const Signer* signer)
    : id_(id),
      config_(config),
      rng_(rng),
      signer_(signer),
      store_(id, config.blend_alpha),
      view_(id, config.view_capacity) {
  if (!config_.gossip.valid()) throw Error(Error::Code::kConfig, "invalid gossip config");
  if (config_.heartbeats && !config_.health.valid()) {
    throw Error(Error::Code::kConfig, "health thresholds need t_confirm > t_suspect >= 1");
  }
}

std::uint32_t GossipAgent::suppression_threshold(PriorityClass p) const {
  const auto k = config_.gossip.suppression_k;
  if (config_.filter_enabled && p == PriorityClass::Critical) {
    return k * config_.gossip.critical_suppression_multiplier;
  }
  return k;
}

void GossipAgent::start_rumor(const Envelope& env, Tick now) {
  RumorState r;
  r.envelope_id = env.id();
  r.key = env.key;
  r.priority = env.priority;
  r.first_seen_tick = now;
  rumors_[env.id()] = std::move(r);
}

void GossipAgent::note_duplicate(const EnvelopeId& id, AgentId sender) {
  ++counters_.duplicates;
  auto it = rumors_.find(id);
  if (it == rumors_.end()) return;
  auto& r = it->second;
  r.distinct_first_senders.insert(sender);
  ++r.duplicate_receipts;
  if (r.duplicate_receipts >= suppression_threshold(r.priority)) r.active = false;
}

Envelope GossipAgent::put(const std::string& key, Value value, PriorityClass priority,
                          std::uint32_t ttl_rounds, Tick now) {
  Envelope env = store_.make_local(key, std::move(value), priority, ttl_rounds, now);
  if (config_.trust.signing && signer_ != nullptr) env = sign_envelope(env, *signer_);
  const auto outcome = store_.commit_local(env, now);
  if (outcome == ApplyOutcome::New || outcome == ApplyOutcome::Updated) start_rumor(env, now);
  return env;
}

Envelope GossipAgent::put(const std::string& key, Value value, PriorityClass priority, Tick now) {
  return put(key, std::move(value), priority, config_.filter.ttl(priority), now);
}

ApplyOutcome GossipAgent::inject(const Envelope& env, Tick now) {
  const auto outcome = store_.commit_local(env, now);
  if (outcome == ApplyOutcome::New || outcome == ApplyOutcome::Updated) start_rumor(env, now);
  return outcome;
}

FilterSelection GossipAgent::select_rumors(Tick now) {
  std::vector<const Envelope*> active;
  for (auto it = rumors_.begin(); it != rumors_.end();) {
    const auto* entry = store_.get(it->second.key);
    const Envelope* env = nullptr;
    if (entry != nullptr) {
      if (entry->policy.kind == MergePolicy::Kind::GrowOnlySetUnion) {
        auto c = entry->contributors.find(it->first);
        if (c != entry->contributors.end()) env = &c->second;
      } else if (entry->envelope.id() == it->first) {
        env = &entry->envelope;
      }
    }
    if (env == nullptr) {
      // Superseded or expired; its id stays covered so it never returns.
      it = rumors_.erase(it);
      continue;
    }
    if (it->second.active) active.push_back(env);
    ++it;
  }

  const std::size_t budget = config_.gossip.delta_cap;
  if (config_.filter_enabled) {
    return select_for_message(active, budget, now, config_.gossip.round_len, config_.filter);
  }
  std::sort(active.begin(), active.end(), [](const Envelope* a, const Envelope* b) {
    if (a->created_tick != b->created_tick) return a->created_tick < b->created_tick;
    if (a->origin != b->origin) return a->origin < b->origin;
    return a->seq < b->seq;
  });
  FilterSelection out;
  active.resize(std::min(active.size(), budget));
  out.chosen = std::move(active);
  return out;
}

std::vector<Envelope> GossipAgent::rumor_payload(Tick now) {
  auto sel = select_rumors(now);
  counters_.critical_overflow += sel.critical_overflow;
  std::vector<Envelope> out;
  out.reserve(sel.chosen.size());
  for (const auto* env : sel.chosen) out.push_back(*env);
  return out;
}

GossipMessage GossipAgent::reply_delta(const Digest& remote) const {
  auto batch = store_.delta_for(remote, config_.gossip.delta_cap);
  GossipMessage msg;
  msg.kind = GossipKind::Delta;
  msg.sender = id_;
  msg.envelopes = std::move(batch.envelopes);
  msg.digest = store_.digest();
  msg.truncated_origins = std::move(batch.truncated_origins);
  return msg;
}

RoundOutput GossipAgent::on_round(std::uint64_t round, Tick now) {
  RoundOutput out;
  const auto& g = config_.gossip;
  const auto& trust = config_.trust;

  store_.expire(now, g.round_len);
  if (trust.corroboration.enabled) {
    out.expired_claims = corroboration_.expire(trust.corroboration, now, g.round_len);
    for (const auto& claim : out.expired_claims) {
      ++counters_.corroboration_expired;
      if (claim.senders.size() == 1) {
        reputation_.update(*claim.senders.begin(),
                           ReputationEvent::CorroborationExpiredAsSoleSource, trust.params);
      }
    }
  }

  if (config_.heartbeats) {
    put(heartbeat_key(id_), Counter{round}, PriorityClass::Routine, config_.health.heartbeat_ttl(),
        now);
    out.transitions = detector_.check_peers(store_, round, now, config_.health);
  }

  if (trust.reputation && trust.publish_interval > 0 && round % trust.publish_interval == 0) {
    for (const auto& [subject, s] : reputation_.scores()) {
      if (subject == id_) continue;
      put(reputation_key(id_, subject), Value{s}, PriorityClass::Routine, now);
    }
  }

  // Confirmed-failed peers are not worth a message.
  PartialView candidates = view_;
  if (config_.heartbeats) {
    std::vector<AgentId> alive;
    for (auto peer : view_.peers()) {
      if (detector_.status(peer) != PeerStatus::Failed) alive.push_back(peer);
    }
    if (alive.size() != view_.size()) candidates = replace_entries(view_, alive);
  }

  std::vector<AgentId> targets;
  if (!candidates.empty()) {
    if (trust.reputation && trust.reputation_biased_sampling) {
      const auto eff = effective_scores(store_);
      std::map<AgentId, double> weights;
      for (auto peer : candidates.peers()) {
        auto it = eff.find(peer);
        weights[peer] = it == eff.end() ? trust.params.prior : it->second;
      }
      targets = select_peers(candidates, g.fanout, rng_, &weights);
    } else {
      targets = select_peers(candidates, g.fanout, rng_);
    }
  }

  if (targets.empty()) {
    out.isolated = true;
    ++counters_.isolated_rounds;
  } else {
    switch (g.mode) {
      case GossipMode::Push: {
        auto payload = rumor_payload(now);
        const bool repair =
            g.repair_interval > 0 && (round + id_.value) % g.repair_interval == 0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
          GossipMessage msg;
          msg.sender = id_;
          msg.envelopes = payload;
          if (repair && i == 0) {
            msg.kind = GossipKind::PushPullExchange;
            msg.digest = store_.digest();
          } else if (payload.empty()) {
            continue;
          } else {
            msg.kind = GossipKind::Rumor;
          }
          out.gossip.push_back({targets[i], std::move(msg)});
        }
        break;
      }
      case GossipMode::Pull:
      case GossipMode::AntiEntropyOnly:
        for (auto peer : targets) {
          GossipMessage msg;
          msg.kind = GossipKind::DigestRequest;
          msg.sender = id_;
          msg.digest = store_.digest();
          out.gossip.push_back({peer, std::move(msg)});
        }
        break;
      case GossipMode::PushPull: {
        auto payload = rumor_payload(now);
        for (auto peer : targets) {
          GossipMessage msg;
          msg.kind = GossipKind::PushPullExchange;
          msg.sender = id_;
          msg.envelopes = payload;
          msg.digest = store_.digest();
          out.gossip.push_back({peer, std::move(msg)});
        }
        break;
      }
    }
  }

  if (config_.shuffle_enabled && !view_.empty()) {
    const auto len = std::min(config_.shuffle_len, view_.capacity());
    auto offer = shuffle_initiate(view_, std::max<std::size_t>(1, len), rng_);
    pending_shuffle_ = offer.sample;
    out.shuffle = ShuffleOut{offer.target, ShuffleMessage{false, id_, std::move(offer.sample)}};
  }
  return out;
}

ApplyOutcome GossipAgent::admit(const Envelope& env, AgentId sender, Tick now,
                                ReceiveOutput& out, bool& withheld) {
  withheld = false;
  if (store_.digest().covers(env.id())) {
    note_duplicate(env.id(), sender);
    return ApplyOutcome::Stale;
  }

  const auto& trust = config_.trust;
  if (trust.signing && signer_ != nullptr && verify_status(env, *signer_) != VerifyStatus::Valid) {
    ++counters_.verify_fail;
    ++counters_.rejected;
    reputation_.update(sender, ReputationEvent::VerifyFail, trust.params);
    withheld = true;
    return ApplyOutcome::Rejected;
  }

  Envelope received = env;
  ++received.hop_count;

  auto apply_one = [&](const Envelope& e) {
    const auto outcome = store_.apply_remote(e, now);
    switch (outcome) {
      case ApplyOutcome::New:
        ++counters_.apply_new;
        start_rumor(e, now);
        out.admitted.push_back(e);
        break;
      case ApplyOutcome::Updated:
        ++counters_.apply_updated;
        start_rumor(e, now);
        out.admitted.push_back(e);
        break;
      case ApplyOutcome::Rejected:
        ++counters_.rejected;
        break;
      case ApplyOutcome::Stale:
        break;
    }
    if (outcome != ApplyOutcome::Rejected) {
      if (auto it = rumors_.find(e.id()); it != rumors_.end()) {
        it->second.distinct_first_senders.insert(sender);
      }
    }
    return outcome;
  };

  if (trust.corroboration.enabled) {
    auto gate = corroboration_.offer(received, sender, id_, trust.corroboration, now,
                                     config_.gossip.round_len);
    switch (gate.decision) {
      case GateDecision::Bypass:
        break;
      case GateDecision::Hold:
        ++counters_.held;
        withheld = true;
        return ApplyOutcome::Rejected;
      case GateDecision::Expire:
        ++counters_.corroboration_expired;
        if (gate.senders.size() == 1) {
          reputation_.update(*gate.senders.begin(),
                             ReputationEvent::CorroborationExpiredAsSoleSource, trust.params);
        }
        withheld = true;
        return ApplyOutcome::Rejected;
      case GateDecision::Commit: {
        ++counters_.corroboration_commits;
        for (auto vouch : gate.senders) {
          reputation_.update(vouch, ReputationEvent::CommitConfirmed, trust.params);
        }
        ApplyOutcome mine = ApplyOutcome::Stale;
        for (const auto& e : gate.released) {
          if (store_.digest().covers(e.id())) continue;
          const auto outcome = apply_one(e);
          if (e.id() == received.id()) mine = outcome;
          if (outcome != ApplyOutcome::Rejected) out.committed.push_back(e);
        }
        if (auto it = rumors_.find(received.id()); it != rumors_.end()) {
          it->second.distinct_first_senders.insert(gate.senders.begin(), gate.senders.end());
        }
        return mine;
      }
    }
  }
  return apply_one(received);
}

ReceiveOutput GossipAgent::on_gossip(const GossipMessage& msg, Tick now) {
  ReceiveOutput out;
  if (!well_formed(msg, config_.gossip.delta_cap)) {
    ++counters_.protocol_error;
    out.protocol_error = true;
    return out;
  }

  std::vector<AgentId> keep_open = msg.truncated_origins;
  out.outcomes.reserve(msg.envelopes.size());
  for (const auto& env : msg.envelopes) {
    bool withheld = false;
    out.outcomes.push_back(admit(env, msg.sender, now, out, withheld));
    if (withheld) keep_open.push_back(env.origin);
  }

  switch (msg.kind) {
    case GossipKind::Rumor:
      break;
    case GossipKind::Delta:
      store_.absorb_coverage(msg.digest, keep_open);
      break;
    case GossipKind::DigestRequest:
    case GossipKind::PushPullExchange:
      out.replies.push_back({msg.sender, reply_delta(msg.digest)});
      break;
  }
  return out;
}

std::optional<ShuffleOut> GossipAgent::on_shuffle(const ShuffleMessage& msg) {
  if (!config_.shuffle_enabled) return std::nullopt;
  std::vector<ViewEntry> received;
  for (const auto& e : msg.entries) {
    if (reachable_.empty() || reachable_.contains(e.peer)) received.push_back(e);
  }
  const auto len = std::max<std::size_t>(1, std::min(config_.shuffle_len, view_.capacity()));
  if (msg.is_reply) {
    view_ = shuffle_merge(view_, pending_shuffle_, received);
    pending_shuffle_.clear();
    return std::nullopt;
  }
  auto response = shuffle_respond(view_, len, msg.sender, rng_);
  view_ = shuffle_merge(view_, response, received);
  return ShuffleOut{msg.sender, ShuffleMessage{true, id_, std::move(response)}};
}

// ---------------------------------------------------------------------------
// Anti-entropy session

SessionStats anti_entropy_session(Store& a, Store& b, std::size_t delta_cap, Tick now) {
  SessionStats stats;
  constexpr std::size_t kMaxRounds = 1u << 20;
  while (stats.rounds < kMaxRounds) {
    const Digest dig_a = a.digest();
    const Digest dig_b = b.digest();
    const auto to_b = a.delta_for(dig_b, delta_cap);
    const auto to_a = b.delta_for(dig_a, delta_cap);
    stats.messages += 4;
    stats.delta_messages += 2;
    ++stats.rounds;

    for (const auto& env : to_b.envelopes) b.apply_remote(env, now);
    for (const auto& env : to_a.envelopes) a.apply_remote(env, now);
    b.absorb_coverage(dig_a, to_b.truncated_origins);
    a.absorb_coverage(dig_b, to_a.truncated_origins);
    stats.envelopes_moved += to_b.envelopes.size() + to_a.envelopes.size();

    if (to_b.envelopes.empty() && to_a.envelopes.empty() && to_b.complete() && to_a.complete()) {
      break;
    }
  }
  return stats;
}

}  // namespace geacl
