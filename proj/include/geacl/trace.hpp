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

#ifndef GEACL_TRACE_HPP_
#define GEACL_TRACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geacl/core.hpp"

namespace geacl {

/// Event codes are part of the persisted trace format; append only.
enum class EventKind : std::uint8_t {
  Send = 0,        // agent->peer; a=channel b=subtype|initiation<<8 c=bytes x=#envelopes
  Deliver = 1,     // agent->peer; a=channel c=send tick
  Drop = 2,        // agent->peer; a=channel b=DropReason
  EnvelopeTx = 3,  // agent->peer; a=tracked key index b=GossipKind
  Inject = 4,      // agent; a=tracked key index b=priority c=seq
  Crash = 5,       // agent
  Join = 6,        // agent
  PartitionStart = 7,
  PartitionEnd = 8,
  LinkDown = 9,     // agent,peer
  LinkUp = 10,      // agent,peer
  Transition = 11,  // agent observes peer; a=from b=to (PeerStatus)
  Commit = 12,      // agent; peer=origin a=tracked key index (or kNoKey)
  Isolated = 13,    // agent
  Decision = 14,    // agent; x=age of information used (ticks); label=decision
  ScenarioMetric = 15,  // label=name x=value
  Note = 16,            // agent; label=free text
  Counter = 17,         // label=name c=value (end-of-run aggregates)
  ProtocolError = 18,   // agent<-peer
};

enum class Channel : std::uint8_t { Gossip = 0, Shuffle = 1, Direct = 2 };
enum class DropReason : std::uint8_t { Random = 0, Blocked = 1, DeadReceiver = 2 };

inline constexpr std::uint64_t kNoKey = ~std::uint64_t{0};
inline constexpr std::uint64_t kInitiationFlag = 1u << 8;

struct TraceEvent {
  Tick tick{0};
  EventKind kind{EventKind::Note};
  std::uint64_t agent{0};
  std::uint64_t peer{0};
  std::uint64_t a{0};
  std::uint64_t b{0};
  std::uint64_t c{0};
  double x{0.0};
  std::string label;

  bool operator==(const TraceEvent&) const = default;
};

/// Round-boundary snapshot of every tracked key across alive agents.
struct RoundSample {
  std::uint64_t round{0};
  Tick tick{0};
  std::vector<std::uint64_t> alive;  // agent ids, ascending
  /// fingerprints[k][i]: value fingerprint of tracked key k at alive[i]; 0 = absent.
  std::vector<std::vector<std::uint64_t>> fingerprints;
  /// vectors[k][i]: components for vector-valued keys, empty when absent or scalar.
  std::vector<std::vector<std::vector<double>>> vectors;

  bool operator==(const RoundSample&) const = default;
};

struct TrackedKey {
  std::string key;
  bool is_vector{false};

  bool operator==(const TrackedKey&) const = default;
};

struct Trace {
  std::uint64_t seed{0};
  std::uint64_t initial_agents{0};
  Tick round_len{10};
  std::vector<TrackedKey> keys;
  std::vector<TraceEvent> events;
  std::vector<RoundSample> samples;
  std::uint64_t environment_hash{0};
  bool timed_out{false};

  std::optional<std::size_t> key_index(const std::string& key) const;

  bool operator==(const Trace&) const = default;
};

/// SHA-256 over a canonical binary encoding of the whole trace, hex encoded.
std::string trace_hash(const Trace& trace);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Newline-delimited JSON: one header line, then events and samples.
void write_ndjson(const Trace& trace, std::ostream& out);
Trace read_ndjson(std::istream& in);

}  // namespace geacl

#endif  // GEACL_TRACE_HPP_
