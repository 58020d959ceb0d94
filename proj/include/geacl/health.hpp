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

#ifndef GEACL_HEALTH_HPP_
#define GEACL_HEALTH_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geacl/core.hpp"
#include "geacl/state_store.hpp"

namespace geacl {

struct HealthConfig {
  std::uint32_t t_suspect{5};  // rounds without heartbeat progress
  std::uint32_t t_confirm{10};
  std::uint32_t ttl_margin{2};

  bool valid() const { return t_suspect >= 1 && t_confirm > t_suspect; }
  std::uint32_t heartbeat_ttl() const { return t_confirm + ttl_margin; }
};

std::string heartbeat_key(AgentId agent);
/// Parses "hb/<id>".
std::optional<AgentId> heartbeat_owner(std::string_view key);

/// put_local("hb/<agent>", Counter{round}, Routine, ttl = t_confirm + margin).
Envelope emit_heartbeat(Store& store, std::uint64_t round, Tick now, const HealthConfig& config);

enum class PeerStatus { Alive, Suspect, Failed };

std::string_view to_string(PeerStatus s);

struct PeerHealth {
  PeerStatus status{PeerStatus::Alive};
  std::uint64_t last_counter{0};
  std::uint64_t last_progress_round{0};
  Tick since{0};  // tick of the last status change
};

struct HealthTransition {
  AgentId peer;
  PeerStatus from{PeerStatus::Alive};
  PeerStatus to{PeerStatus::Alive};
};

/// Per-agent suspicion state machine over gossiped heartbeat counters.
/// Alive -> Suspect after more than t_suspect rounds without progress,
/// Suspect -> Failed after more than t_confirm; Failed is absorbing.
class FailureDetector {
 public:
  std::vector<HealthTransition> check_peers(const Store& store, std::uint64_t round, Tick now,
                                            const HealthConfig& config);

  PeerStatus status(AgentId peer) const;
  const std::map<AgentId, PeerHealth>& peers() const { return peers_; }

 private:
  std::map<AgentId, PeerHealth> peers_;
};

}  // namespace geacl

#endif  // GEACL_HEALTH_HPP_
