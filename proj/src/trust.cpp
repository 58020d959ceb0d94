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

#include "geacl/trust.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <charconv>

namespace geacl {

const SigningKey* KeyRegistry::find(AgentId agent) const {
  auto it = keys_.find(agent);
  return it == keys_.end() ? nullptr : &it->second;
}

KeyRegistry KeyRegistry::generate(const std::vector<AgentId>& agents, Rng& rng) {
  KeyRegistry reg;
  for (auto agent : agents) {
    SigningKey key{};
    for (std::size_t i = 0; i < key.size(); i += 8) {
      const auto word = rng.next();
      for (std::size_t b = 0; b < 8; ++b) key[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    reg.register_key(agent, key);
  }
  return reg;
}

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
       out.data(), &len);
  out.resize(len);
  return out;
}

Bytes KeyedHashSigner::sign(AgentId signer, std::span<const std::uint8_t> message) const {
  const SigningKey* key = nullptr;
  if (auto it = held_.find(signer); it != held_.end()) {
    key = &it->second;
  } else {
    key = registry_.find(signer);
  }
  if (key == nullptr) throw Error(Error::Code::kInvalidArgument, "signer holds no key");
  return hmac_sha256(*key, message);
}

bool KeyedHashSigner::verify(AgentId claimed, std::span<const std::uint8_t> message,
                             std::span<const std::uint8_t> signature) const {
  const auto* key = registry_.find(claimed);
  if (key == nullptr) return false;
  const auto expected = hmac_sha256(*key, message);
  return expected.size() == signature.size() &&
         CRYPTO_memcmp(expected.data(), signature.data(), expected.size()) == 0;
}

Bytes signing_bytes(const Envelope& env) {
  Envelope copy = env;
  copy.hop_count = 0;
  return canonical_bytes(copy);
}

Envelope sign_envelope(const Envelope& env, const Signer& signer) {
  return sign_envelope(env, signer, env.origin);
}

Envelope sign_envelope(const Envelope& env, const Signer& signer, AgentId signer_agent) {
  Envelope out = env;
  out.signature.reset();
  out.signature = signer.sign(signer_agent, signing_bytes(out));
  return out;
}

VerifyStatus verify_status(const Envelope& env, const Signer& signer) {
  if (!signer.knows(env.origin)) return VerifyStatus::UnknownOrigin;
  if (!env.signature) return VerifyStatus::Unsigned;
  return signer.verify(env.origin, signing_bytes(env), *env.signature) ? VerifyStatus::Valid
                                                                       : VerifyStatus::BadSignature;
}

std::string_view to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::Valid:
      return "valid";
    case VerifyStatus::Unsigned:
      return "unsigned";
    case VerifyStatus::UnknownOrigin:
      return "unknown origin";
    case VerifyStatus::BadSignature:
      return "bad signature";
  }
  return "bad signature";
}

// ---------------------------------------------------------------------------
// Reputation

double ReputationTable::score(AgentId subject, const ReputationParams& params) const {
  auto it = scores_.find(subject);
  return it == scores_.end() ? params.prior : it->second;
}

void ReputationTable::update(AgentId subject, ReputationEvent event,
                             const ReputationParams& params) {
  double s = score(subject, params);
  switch (event) {
    case ReputationEvent::VerifyFail:
      s *= params.verify_fail_factor;
      break;
    case ReputationEvent::CorroborationExpiredAsSoleSource:
      s *= params.expired_sole_source_factor;
      break;
    case ReputationEvent::CommitConfirmed:
      s = std::min(1.0, s + params.confirm_bonus);
      break;
  }
  scores_[subject] = std::clamp(s, 0.0, 1.0);
}

ReputationTable update_reputation(ReputationTable table, AgentId subject, ReputationEvent event,
                                  const ReputationParams& params) {
  table.update(subject, event, params);
  return table;
}

std::string reputation_key(AgentId observer, AgentId subject) {
  return "rep/" + std::to_string(observer.value) + "/" + std::to_string(subject.value);
}

std::vector<Envelope> publish_reputation(Store& store, const ReputationTable& table, Tick now,
                                         std::uint32_t ttl_rounds) {
  std::vector<Envelope> out;
  for (const auto& [subject, s] : table.scores()) {
    if (subject == store.owner()) continue;
    out.push_back(store.put_local(reputation_key(store.owner(), subject), Value{s},
                                  PriorityClass::Routine, ttl_rounds, now));
  }
  return out;
}

namespace {

// Parses "rep/<observer>/<subject>"; returns false on anything else.
bool parse_rep_key(std::string_view key, std::uint64_t& observer, std::uint64_t& subject) {
  if (!key.starts_with("rep/")) return false;
  key.remove_prefix(4);
  const auto slash = key.find('/');
  if (slash == std::string_view::npos) return false;
  const auto obs = key.substr(0, slash);
  const auto sub = key.substr(slash + 1);
  if (std::from_chars(obs.data(), obs.data() + obs.size(), observer).ec != std::errc{}) {
    return false;
  }
  return std::from_chars(sub.data(), sub.data() + sub.size(), subject).ec == std::errc{};
}

}  // namespace

std::map<AgentId, double> effective_scores(const Store& store) {
  std::map<AgentId, std::pair<double, int>> sums;
  for (auto it = store.entries().lower_bound("rep/"); it != store.entries().end(); ++it) {
    if (!it->first.starts_with("rep/")) break;
    std::uint64_t observer = 0;
    std::uint64_t subject = 0;
    if (!parse_rep_key(it->first, observer, subject)) continue;
    const auto* v = std::get_if<double>(&it->second.envelope.value);
    if (v == nullptr) continue;
    auto& acc = sums[AgentId{subject}];
    acc.first += std::clamp(*v, 0.0, 1.0);
    acc.second += 1;
  }
  std::map<AgentId, double> out;
  for (const auto& [subject, acc] : sums) out[subject] = acc.first / acc.second;
  return out;
}

double effective_score(const Store& store, AgentId subject, double prior) {
  const auto scores = effective_scores(store);
  auto it = scores.find(subject);
  return it == scores.end() ? prior : it->second;
}

// ---------------------------------------------------------------------------
// Corroboration

std::string_view to_string(GateDecision d) {
  switch (d) {
    case GateDecision::Bypass:
      return "Bypass";
    case GateDecision::Hold:
      return "Hold";
    case GateDecision::Commit:
      return "Commit";
    case GateDecision::Expire:
      return "Expire";
  }
  return "Bypass";
}

std::string claim_of(const Envelope& env) {
  const auto value = canonical_value_bytes(env.value);
  std::string claim = env.key;
  claim.push_back('\0');
  claim.append(value.begin(), value.end());
  return claim;
}

GateResult CorroborationBuffer::offer(const Envelope& env, AgentId first_hop_sender, AgentId self,
                                      const CorroborationPolicy& policy, Tick now,
                                      Tick round_len) {
  GateResult result;
  if (!policy.enabled || env.origin == self || env.priority < policy.applies_to) return result;

  const auto claim = claim_of(env);
  if (committed_.contains(claim)) return result;

  auto it = pending_.find(claim);
  if (it != pending_.end() && round_len > 0 &&
      (now - it->second.first_seen) / round_len > policy.timeout_rounds) {
    result.decision = GateDecision::Expire;
    result.senders = it->second.senders;
    pending_.erase(it);
    return result;
  }
  if (it == pending_.end()) {
    it = pending_.emplace(claim, Pending{{}, {}, now}).first;
  }
  auto& p = it->second;
  if (std::none_of(p.envelopes.begin(), p.envelopes.end(),
                   [&](const Envelope& e) { return e.id() == env.id(); })) {
    p.envelopes.push_back(env);
  }
  p.senders.insert(first_hop_sender);
  result.senders = p.senders;

  if (p.senders.size() >= std::max<std::uint32_t>(1, policy.k)) {
    result.decision = GateDecision::Commit;
    result.released = std::move(p.envelopes);
    committed_.insert(claim);
    pending_.erase(it);
  } else {
    result.decision = GateDecision::Hold;
  }
  return result;
}

std::vector<ExpiredClaim> CorroborationBuffer::expire(const CorroborationPolicy& policy, Tick now,
                                                      Tick round_len) {
  std::vector<ExpiredClaim> out;
  if (round_len == 0) return out;
  for (auto it = pending_.begin(); it != pending_.end();) {
    if ((now - it->second.first_seen) / round_len > policy.timeout_rounds) {
      out.push_back({it->first, it->second.senders});
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

GateDecision corroboration_gate(CorroborationBuffer& pending, const Envelope& env,
                                AgentId first_hop_sender, AgentId self,
                                const CorroborationPolicy& policy, Tick now, Tick round_len) {
  return pending.offer(env, first_hop_sender, self, policy, now, round_len).decision;
}

}  // namespace geacl
