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

#ifndef GEACL_TRUST_HPP_
#define GEACL_TRUST_HPP_

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "geacl/core.hpp"
#include "geacl/state_store.hpp"

namespace geacl {

// ---------------------------------------------------------------------------
// Signatures

using SigningKey = std::array<std::uint8_t, 32>;

/// Authoritative per-agent keys used for verification.
class KeyRegistry {
 public:
  void register_key(AgentId agent, const SigningKey& key) { keys_[agent] = key; }
  const SigningKey* find(AgentId agent) const;
  std::size_t size() const { return keys_.size(); }

  /// One fresh key per agent drawn from `rng`.
  static KeyRegistry generate(const std::vector<AgentId>& agents, Rng& rng);

 private:
  std::map<AgentId, SigningKey> keys_;
};

/// Signing capability. Implementations must be deterministic.
class Signer {
 public:
  virtual ~Signer() = default;
  /// Signs `message` with whatever key `signer` actually holds.
  virtual Bytes sign(AgentId signer, std::span<const std::uint8_t> message) const = 0;
  /// Checks `signature` against the registered key of `claimed`.
  virtual bool verify(AgentId claimed, std::span<const std::uint8_t> message,
                      std::span<const std::uint8_t> signature) const = 0;
  virtual bool knows(AgentId agent) const = 0;
};

/// HMAC-SHA256 over the message with the agent's 32-byte key.
class KeyedHashSigner final : public Signer {
 public:
  explicit KeyedHashSigner(KeyRegistry registry) : registry_(std::move(registry)) {}

  /// Overrides the key an agent signs with (wrong or stolen keys).
  void hold_key(AgentId agent, const SigningKey& key) { held_[agent] = key; }

  Bytes sign(AgentId signer, std::span<const std::uint8_t> message) const override;
  bool verify(AgentId claimed, std::span<const std::uint8_t> message,
              std::span<const std::uint8_t> signature) const override;
  bool knows(AgentId agent) const override { return registry_.find(agent) != nullptr; }

  const KeyRegistry& registry() const { return registry_; }

 private:
  KeyRegistry registry_;
  std::map<AgentId, SigningKey> held_;
};

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

/// Bytes covered by a signature: canonical_bytes with hop_count zeroed, since
/// relays bump the hop count in transit.
Bytes signing_bytes(const Envelope& env);

/// Returns a copy of `env` signed by `signer_agent` (defaults to the origin).
Envelope sign_envelope(const Envelope& env, const Signer& signer);
Envelope sign_envelope(const Envelope& env, const Signer& signer, AgentId signer_agent);

enum class VerifyStatus { Valid, Unsigned, UnknownOrigin, BadSignature };

VerifyStatus verify_status(const Envelope& env, const Signer& signer);
inline bool verify_envelope(const Envelope& env, const Signer& signer) {
  return verify_status(env, signer) == VerifyStatus::Valid;
}
std::string_view to_string(VerifyStatus s);

// ---------------------------------------------------------------------------
// Reputation

enum class ReputationEvent { VerifyFail, CorroborationExpiredAsSoleSource, CommitConfirmed };

struct ReputationParams {
  double prior{0.5};
  double verify_fail_factor{0.5};
  double expired_sole_source_factor{0.8};
  double confirm_bonus{0.05};
};

class ReputationTable {
 public:
  double score(AgentId subject, const ReputationParams& params = {}) const;
  void update(AgentId subject, ReputationEvent event, const ReputationParams& params = {});
  const std::map<AgentId, double>& scores() const { return scores_; }

 private:
  std::map<AgentId, double> scores_;
};

ReputationTable update_reputation(ReputationTable table, AgentId subject, ReputationEvent event,
                                  const ReputationParams& params = {});

std::string reputation_key(AgentId observer, AgentId subject);

/// Writes one Routine "rep/<observer>/<subject>" Scalar per scored subject.
std::vector<Envelope> publish_reputation(Store& store, const ReputationTable& table, Tick now,
                                         std::uint32_t ttl_rounds);

/// Mean over observers of the freshest "rep/*/<subject>" entries in `store`;
/// subjects without reports are absent (callers fall back to the prior).
std::map<AgentId, double> effective_scores(const Store& store);
double effective_score(const Store& store, AgentId subject, double prior = 0.5);

// ---------------------------------------------------------------------------
// Corroboration

struct CorroborationPolicy {
  bool enabled{false};
  std::uint32_t k{2};
  PriorityClass applies_to{PriorityClass::High};
  std::uint32_t timeout_rounds{8};
};

enum class GateDecision { Bypass, Hold, Commit, Expire };

std::string_view to_string(GateDecision d);

/// A claim is a (key, value) assertion; every envelope asserting the same
/// claim counts toward the same corroboration tally.
std::string claim_of(const Envelope& env);

struct GateResult {
  GateDecision decision{GateDecision::Bypass};
  /// Envelopes released to the store on Commit (includes the current one).
  std::vector<Envelope> released;
  /// Distinct first-hop senders that vouched for the claim.
  std::set<AgentId> senders;
};

struct ExpiredClaim {
  std::string claim;
  std::set<AgentId> senders;
};

/// Holds high-priority remote claims until k distinct first-hop senders
/// have delivered them. Held envelopes must not be forwarded.
class CorroborationBuffer {
 public:
  GateResult offer(const Envelope& env, AgentId first_hop_sender, AgentId self,
                   const CorroborationPolicy& policy, Tick now, Tick round_len);
  std::vector<ExpiredClaim> expire(const CorroborationPolicy& policy, Tick now, Tick round_len);

  bool holding(const std::string& claim) const { return pending_.contains(claim); }
  bool committed(const std::string& claim) const { return committed_.contains(claim); }
  std::size_t pending_count() const { return pending_.size(); }

 private:
  struct Pending {
    std::vector<Envelope> envelopes;
    std::set<AgentId> senders;
    Tick first_seen{0};
  };

  std::map<std::string, Pending> pending_;
  std::set<std::string> committed_;
};

/// Functional form of CorroborationBuffer::offer.
GateDecision corroboration_gate(CorroborationBuffer& pending, const Envelope& env,
                                AgentId first_hop_sender, AgentId self,
                                const CorroborationPolicy& policy, Tick now, Tick round_len);

}  // namespace geacl

#endif  // GEACL_TRUST_HPP_
