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

#ifndef GEACL_CORE_HPP_
#define GEACL_CORE_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace geacl {

/// Error raised by library operations whose contract names an error case
/// ("isolated agent", "nothing to shuffle", "type confusion", config errors).
class Error : public std::runtime_error {
 public:
  enum class Code {
    kIsolatedAgent,
    kNothingToShuffle,
    kTypeConfusion,
    kInvalidArgument,
    kConfig,
  };

  Error(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

struct AgentId {
  std::uint64_t value{0};

  constexpr auto operator<=>(const AgentId&) const = default;
};

/// Simulation time unit. One gossip round spans `round_len` ticks.
using Tick = std::uint64_t;

enum class PriorityClass : std::uint8_t { Low = 0, Routine = 1, High = 2, Critical = 3 };

inline constexpr std::array<PriorityClass, 4> kAllPriorities = {
    PriorityClass::Critical, PriorityClass::High, PriorityClass::Routine, PriorityClass::Low};

inline constexpr std::size_t priority_index(PriorityClass p) {
  return static_cast<std::size_t>(p);
}

std::string_view to_string(PriorityClass p);
std::optional<PriorityClass> parse_priority(std::string_view name);

// ---------------------------------------------------------------------------
// Values

/// A symbolic triple, e.g. (defect_spike, WS4, high_severity).
struct Fact {
  std::string predicate;
  std::string subject;
  std::string qualifier;

  auto operator<=>(const Fact&) const = default;
};

/// Fixed-dimension numeric vector; dimension is fixed per run.
struct Embedding {
  std::vector<double> components;

  bool operator==(const Embedding&) const = default;
  bool operator<(const Embedding& o) const { return components < o.components; }
};

struct Counter {
  std::uint64_t value{0};

  auto operator<=>(const Counter&) const = default;
};

/// Variant order is part of the wire format: 0=Scalar 1=Fact 2=Vector 3=Counter.
using Value = std::variant<double, Fact, Embedding, Counter>;

bool value_is_valid(const Value& v);
std::string describe(const Value& v);

// ---------------------------------------------------------------------------
// Version vectors

/// Map origin -> highest sequence number observed. Absent origin == 0.
class VersionVector {
 public:
  using Entry = std::pair<AgentId, std::uint64_t>;

  VersionVector() = default;
  VersionVector(std::initializer_list<Entry> init);

  std::uint64_t get(AgentId origin) const;
  /// Raises the entry for `origin` to at least `seq`.
  void advance(AgentId origin, std::uint64_t seq);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  bool operator==(const VersionVector&) const = default;

 private:
  std::vector<Entry> entries_;  // sorted by origin, all seq >= 1
};

VersionVector vv_merge(const VersionVector& a, const VersionVector& b);

/// Origins where `remote` is ahead of `local`, with local's seq as the
/// exclusive lower bound.
std::vector<std::pair<AgentId, std::uint64_t>> vv_missing(const VersionVector& local,
                                                          const VersionVector& remote);

/// Set of sequence numbers kept as sorted, disjoint, non-adjacent closed
/// intervals.
class SeqIntervals {
 public:
  using Interval = std::pair<std::uint64_t, std::uint64_t>;

  bool contains(std::uint64_t seq) const;
  void insert(std::uint64_t seq) { insert_range(seq, seq); }
  void insert_range(std::uint64_t lo, std::uint64_t hi);
  void unite(const SeqIntervals& other);
  bool includes(const SeqIntervals& other) const;
  std::uint64_t max() const { return intervals_.empty() ? 0 : intervals_.back().second; }
  bool empty() const { return intervals_.empty(); }
  const std::vector<Interval>& intervals() const { return intervals_; }

  bool operator==(const SeqIntervals&) const = default;

 private:
  std::vector<Interval> intervals_;
};

struct EnvelopeId {
  AgentId origin;
  std::uint64_t seq{0};

  auto operator<=>(const EnvelopeId&) const = default;
};

/// Exact record of which (origin, seq) ids a store has absorbed. Its
/// frontier() is the plain version vector (pointwise max); unlike the
/// frontier it stays exact when envelopes arrive out of sequence order.
class Digest {
 public:
  Digest() = default;
  /// Prefix-closed digest: every seq <= vv[origin] is covered.
  static Digest from_frontier(const VersionVector& vv);

  bool covers(const EnvelopeId& id) const;
  void add(const EnvelopeId& id);
  void unite(const Digest& other);
  void unite_origin(AgentId origin, const Digest& other);
  /// True when every id covered by `other` is covered here.
  bool includes(const Digest& other) const;

  VersionVector frontier() const;
  const SeqIntervals* find(AgentId origin) const;
  const std::vector<std::pair<AgentId, SeqIntervals>>& origins() const { return origins_; }
  /// Ids covered by `remote` but not here, grouped by origin.
  std::vector<std::pair<AgentId, SeqIntervals>> missing_from(const Digest& remote) const;
  std::size_t encoded_size() const;

  bool operator==(const Digest&) const = default;

 private:
  SeqIntervals& slot(AgentId origin);

  std::vector<std::pair<AgentId, SeqIntervals>> origins_;  // sorted by origin
};

// ---------------------------------------------------------------------------
// Envelopes

using Bytes = std::vector<std::uint8_t>;

struct Envelope {
  AgentId origin;
  std::uint64_t seq{0};
  std::string key;
  Value value;
  PriorityClass priority{PriorityClass::Routine};
  Tick created_tick{0};
  std::uint32_t ttl_rounds{1};
  std::uint32_t hop_count{0};
  std::optional<Bytes> signature;

  EnvelopeId id() const { return {origin, seq}; }
  bool operator==(const Envelope&) const = default;
};

/// Deterministic encoding of every field except the signature.
Bytes canonical_bytes(const Envelope& env);
/// Encoding of a bare value with its leading variant tag.
Bytes canonical_value_bytes(const Value& v);
/// Wire size of an envelope including its signature.
std::size_t encoded_size(const Envelope& env);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t splitmix64(std::uint64_t& state);
/// One splitmix64 step from a fixed input; used to derive stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// xoshiro256** seeded through splitmix64. Bit-exact across implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for (master seed, stream id), e.g. one per agent.
  static Rng derive(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  /// Unbiased integer in [0, bound); bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);
  /// Integer in [lo, hi].
  std::uint64_t uniform_between(std::uint64_t lo, std::uint64_t hi);
  /// Double in [0, 1) with 53 random bits.
  double next_double();
  bool bernoulli(double p) { return next_double() < p; }

  std::uint64_t seed() const { return seed_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

/// Stream ids used to derive independent generators from one master seed.
namespace streams {
inline constexpr std::uint64_t kEnvironment = 0xE000000000000001ULL;
inline constexpr std::uint64_t kNetwork = 0xE000000000000002ULL;
inline constexpr std::uint64_t kTopology = 0xE000000000000003ULL;
inline constexpr std::uint64_t kKeys = 0xE000000000000004ULL;
inline constexpr std::uint64_t kScenario = 0xE000000000000005ULL;
}  // namespace streams

}  // namespace geacl

template <>
struct std::hash<geacl::AgentId> {
  std::size_t operator()(const geacl::AgentId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

#endif  // GEACL_CORE_HPP_
