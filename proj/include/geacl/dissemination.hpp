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

#ifndef GEACL_DISSEMINATION_HPP_
#define GEACL_DISSEMINATION_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geacl/core.hpp"
#include "geacl/health.hpp"
#include "geacl/peer_sampling.hpp"
#include "geacl/relevance_filter.hpp"
#include "geacl/state_store.hpp"
#include "geacl/trust.hpp"

namespace geacl {

enum class GossipMode { Push, Pull, PushPull, AntiEntropyOnly };

std::string_view to_string(GossipMode m);
std::optional<GossipMode> parse_gossip_mode(std::string_view name);

struct GossipConfig {
  GossipMode mode{GossipMode::PushPull};
  std::uint32_t fanout{1};
  Tick round_len{10};
  std::uint32_t suppression_k{4};
  std::uint32_t delta_cap{32};
  std::uint32_t critical_suppression_multiplier{4};
  /// Push mode folds a digest into one message every this many rounds (0 = never).
  std::uint32_t repair_interval{10};

  bool valid() const;
};

struct RumorState {
  EnvelopeId envelope_id;
  std::string key;
  PriorityClass priority{PriorityClass::Routine};
  std::uint32_t duplicate_receipts{0};
  bool active{true};
  Tick first_seen_tick{0};
  std::set<AgentId> distinct_first_senders;
};

enum class GossipKind { Rumor, DigestRequest, Delta, PushPullExchange };

std::string_view to_string(GossipKind k);

struct GossipMessage {
  GossipKind kind{GossipKind::Rumor};
  AgentId sender;
  std::vector<Envelope> envelopes;
  /// Sender's digest (DigestRequest, PushPullExchange, Delta).
  Digest digest;
  /// Delta only: origins whose share was cut by the cap.
  std::vector<AgentId> truncated_origins;
};

std::size_t encoded_size(const GossipMessage& msg);

/// Envelope-cap check: non-Critical envelopes must fit in `delta_cap`
/// (Critical overflow is allowed and metered by the filter).
bool well_formed(const GossipMessage& msg, std::uint32_t delta_cap);

struct TrustConfig {
  bool signing{false};
  CorroborationPolicy corroboration;
  bool reputation{false};
  bool reputation_biased_sampling{false};
  std::uint32_t publish_interval{5};
  ReputationParams params;
};

struct AgentConfig {
  GossipConfig gossip;
  FilterPolicy filter;
  /// Off: rumors go out in creation order with a flat suppression threshold.
  bool filter_enabled{true};
  HealthConfig health;
  bool heartbeats{true};
  TrustConfig trust;
  std::size_t view_capacity{8};
  std::size_t shuffle_len{3};
  bool shuffle_enabled{true};
  double blend_alpha{0.5};
};

/// Per-agent tallies surfaced in the metrics report.
struct AgentCounters {
  std::uint64_t apply_new{0};
  std::uint64_t apply_updated{0};
  std::uint64_t duplicates{0};
  std::uint64_t rejected{0};
  std::uint64_t verify_fail{0};
  std::uint64_t protocol_error{0};
  std::uint64_t held{0};
  std::uint64_t corroboration_commits{0};
  std::uint64_t corroboration_expired{0};
  std::uint64_t critical_overflow{0};
  std::uint64_t isolated_rounds{0};
};

struct Outgoing {
  AgentId to;
  GossipMessage msg;
};

struct ShuffleOut {
  AgentId to;
  ShuffleMessage msg;
};

struct RoundOutput {
  std::vector<Outgoing> gossip;
  std::optional<ShuffleOut> shuffle;
  std::vector<HealthTransition> transitions;
  std::vector<ExpiredClaim> expired_claims;
  bool isolated{false};
};

struct ReceiveOutput {
  std::vector<Outgoing> replies;
  /// Outcome per carried envelope, in message order (Rejected for holds).
  std::vector<ApplyOutcome> outcomes;
  /// Envelopes that entered the store as New or Updated.
  std::vector<Envelope> admitted;
  /// Claims released by corroboration in this delivery.
  std::vector<Envelope> committed;
  bool protocol_error{false};
};

/// One gossiping agent: store, partial view, rumor table, failure detector,
/// reputation and corroboration state. Handlers are deterministic given the
/// agent's own RNG stream.
class GossipAgent {
 public:
  GossipAgent(AgentId id, const AgentConfig& config, Rng rng, const Signer* signer = nullptr);

  AgentId id() const { return id_; }
  const AgentConfig& config() const { return config_; }
  AgentConfig& mutable_config() { return config_; }

  /// Local write: stores, signs when signing is on, starts a rumor.
  Envelope put(const std::string& key, Value value, PriorityClass priority,
               std::uint32_t ttl_rounds, Tick now);
  /// Local write with the priority-default TTL from the filter policy.
  Envelope put(const std::string& key, Value value, PriorityClass priority, Tick now);
  /// Adopts an externally built envelope as if it were written locally
  /// (adversarial injections with chosen origin or signature).
  ApplyOutcome inject(const Envelope& env, Tick now);

  RoundOutput on_round(std::uint64_t round, Tick now);
  ReceiveOutput on_gossip(const GossipMessage& msg, Tick now);
  std::optional<ShuffleOut> on_shuffle(const ShuffleMessage& msg);

  /// Active rumors ranked for the next outgoing message.
  FilterSelection select_rumors(Tick now);

  Store& store() { return store_; }
  const Store& store() const { return store_; }
  PartialView& view() { return view_; }
  const PartialView& view() const { return view_; }
  void set_view(PartialView view) { view_ = std::move(view); }
  /// Restricts shuffle-learned peers to this set (non-complete topologies).
  void set_reachable(std::set<AgentId> peers) { reachable_ = std::move(peers); }

  const std::map<EnvelopeId, RumorState>& rumors() const { return rumors_; }
  const FailureDetector& detector() const { return detector_; }
  const ReputationTable& reputation() const { return reputation_; }
  ReputationTable& reputation() { return reputation_; }
  const CorroborationBuffer& corroboration() const { return corroboration_; }
  const AgentCounters& counters() const { return counters_; }
  Rng& rng() { return rng_; }

  std::uint32_t suppression_threshold(PriorityClass p) const;

 private:
  void start_rumor(const Envelope& env, Tick now);
  void note_duplicate(const EnvelopeId& id, AgentId sender);
  ApplyOutcome admit(const Envelope& env, AgentId sender, Tick now, ReceiveOutput& out,
                     bool& withheld);
  GossipMessage reply_delta(const Digest& remote) const;
  std::vector<Envelope> rumor_payload(Tick now);

  AgentId id_;
  AgentConfig config_;
  Rng rng_;
  const Signer* signer_;
  Store store_;
  PartialView view_;
  std::set<AgentId> reachable_;
  std::vector<ViewEntry> pending_shuffle_;
  std::map<EnvelopeId, RumorState> rumors_;
  FailureDetector detector_;
  ReputationTable reputation_;
  CorroborationBuffer corroboration_;
  AgentCounters counters_;
};

struct SessionStats {
  std::size_t messages{0};
  std::size_t delta_messages{0};
  std::size_t rounds{0};
  std::size_t envelopes_moved{0};
};

/// Symmetric digest/delta exchange between two stores until neither owes
/// the other anything.
SessionStats anti_entropy_session(Store& a, Store& b, std::size_t delta_cap, Tick now = 0);

}  // namespace geacl

#endif  // GEACL_DISSEMINATION_HPP_
