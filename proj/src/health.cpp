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

#include "geacl/health.hpp"

#include <charconv>

namespace geacl {

std::string heartbeat_key(AgentId agent) { return "hb/" + std::to_string(agent.value); }

std::optional<AgentId> heartbeat_owner(std::string_view key) {
  if (!key.starts_with("hb/")) return std::nullopt;
  key.remove_prefix(3);
  std::uint64_t id = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
  if (ec != std::errc{} || ptr != key.data() + key.size()) return std::nullopt;
  return AgentId{id};
}

Envelope emit_heartbeat(Store& store, std::uint64_t round, Tick now, const HealthConfig& config) {
  return store.put_local(heartbeat_key(store.owner()), Counter{round}, PriorityClass::Routine,
                         config.heartbeat_ttl(), now);
}

std::string_view to_string(PeerStatus s) {
  switch (s) {
    case PeerStatus::Alive:
      return "Alive";
    case PeerStatus::Suspect:
      return "Suspect";
    case PeerStatus::Failed:
      return "Failed";
  }
  return "Alive";
}

std::vector<HealthTransition> FailureDetector::check_peers(const Store& store, std::uint64_t round,
                                                           Tick now, const HealthConfig& config) {
  std::vector<HealthTransition> out;

  for (auto it = store.entries().lower_bound("hb/"); it != store.entries().end(); ++it) {
    if (!it->first.starts_with("hb/")) break;
    const auto peer = heartbeat_owner(it->first);
    if (!peer || *peer == store.owner()) continue;
    const auto* counter = std::get_if<Counter>(&it->second.envelope.value);
    if (counter == nullptr) continue;

    auto [slot, inserted] = peers_.try_emplace(*peer);
    auto& h = slot->second;
    if (inserted) {
      h.last_counter = counter->value;
      h.last_progress_round = round;
      h.since = now;
      continue;
    }
    if (h.status == PeerStatus::Failed || counter->value <= h.last_counter) continue;
    h.last_counter = counter->value;
    h.last_progress_round = round;
    if (h.status == PeerStatus::Suspect) {
      out.push_back({*peer, PeerStatus::Suspect, PeerStatus::Alive});
      h.status = PeerStatus::Alive;
      h.since = now;
    }
  }

  for (auto& [peer, h] : peers_) {
    if (h.status == PeerStatus::Failed) continue;
    const auto silent = round - h.last_progress_round;
    if (silent > config.t_suspect && h.status == PeerStatus::Alive) {
      out.push_back({peer, PeerStatus::Alive, PeerStatus::Suspect});
      h.status = PeerStatus::Suspect;
      h.since = now;
    }
    if (silent > config.t_confirm) {
      out.push_back({peer, PeerStatus::Suspect, PeerStatus::Failed});
      h.status = PeerStatus::Failed;
      h.since = now;
    }
  }
  return out;
}

PeerStatus FailureDetector::status(AgentId peer) const {
  auto it = peers_.find(peer);
  return it == peers_.end() ? PeerStatus::Alive : it->second.status;
}

}  // namespace geacl
