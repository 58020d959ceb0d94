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

#include "geacl/core.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <sstream>

namespace geacl {

std::string_view to_string(PriorityClass p) {
  switch (p) {
    case PriorityClass::Critical:
      return "Critical";
    case PriorityClass::High:
      return "High";
    case PriorityClass::Routine:
      return "Routine";
    case PriorityClass::Low:
      return "Low";
  }
  return "Routine";
}

std::optional<PriorityClass> parse_priority(std::string_view name) {
  for (auto p : kAllPriorities) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

bool value_is_valid(const Value& v) {
  if (const auto* f = std::get_if<Fact>(&v)) {
    return !f->predicate.empty() && !f->subject.empty() && !f->qualifier.empty();
  }
  return true;
}

std::string describe(const Value& v) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          os << x;
        } else if constexpr (std::is_same_v<T, Fact>) {
          os << '(' << x.predicate << ", " << x.subject << ", " << x.qualifier << ')';
        } else if constexpr (std::is_same_v<T, Embedding>) {
          os << '[';
          for (std::size_t i = 0; i < x.components.size(); ++i) {
            if (i) os << ", ";
            os << x.components[i];
          }
          os << ']';
        } else {
          os << "#" << x.value;
        }
      },
      v);
  return os.str();
}

// ---------------------------------------------------------------------------
// VersionVector

VersionVector::VersionVector(std::initializer_list<Entry> init) {
  for (const auto& [origin, seq] : init) advance(origin, seq);
}

std::uint64_t VersionVector::get(AgentId origin) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), origin,
                             [](const Entry& e, AgentId o) { return e.first < o; });
  return (it != entries_.end() && it->first == origin) ? it->second : 0;
}

void VersionVector::advance(AgentId origin, std::uint64_t seq) {
  if (seq == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), origin,
                             [](const Entry& e, AgentId o) { return e.first < o; });
  if (it != entries_.end() && it->first == origin) {
    it->second = std::max(it->second, seq);
  } else {
    entries_.insert(it, {origin, seq});
  }
}

VersionVector vv_merge(const VersionVector& a, const VersionVector& b) {
  VersionVector out = a;
  for (const auto& [origin, seq] : b.entries()) out.advance(origin, seq);
  return out;
}

std::vector<std::pair<AgentId, std::uint64_t>> vv_missing(const VersionVector& local,
                                                          const VersionVector& remote) {
  std::vector<std::pair<AgentId, std::uint64_t>> out;
  for (const auto& [origin, seq] : remote.entries()) {
    const auto have = local.get(origin);
    if (seq > have) out.emplace_back(origin, have);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SeqIntervals

bool SeqIntervals::contains(std::uint64_t seq) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), seq,
                             [](std::uint64_t s, const Interval& iv) { return s < iv.first; });
  if (it == intervals_.begin()) return false;
  --it;
  return seq >= it->first && seq <= it->second;
}

void SeqIntervals::insert_range(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) return;
  // First interval that could touch [lo, hi] (its end + 1 >= lo).
  auto first = std::lower_bound(intervals_.begin(), intervals_.end(), lo,
                                [](const Interval& iv, std::uint64_t l) {
                                  return iv.second + 1 < l;
                                });
  auto last = first;
  while (last != intervals_.end() && last->first <= hi + 1) {
    lo = std::min(lo, last->first);
    hi = std::max(hi, last->second);
    ++last;
  }
  first = intervals_.erase(first, last);
  intervals_.insert(first, {lo, hi});
}

void SeqIntervals::unite(const SeqIntervals& other) {
  if (other.intervals_.empty()) return;
  if (intervals_.empty()) {
    intervals_ = other.intervals_;
    return;
  }
  std::vector<Interval> merged;
  merged.reserve(intervals_.size() + other.intervals_.size());
  std::merge(intervals_.begin(), intervals_.end(), other.intervals_.begin(),
             other.intervals_.end(), std::back_inserter(merged));
  std::vector<Interval> out;
  out.reserve(merged.size());
  for (const auto& iv : merged) {
    if (!out.empty() && iv.first <= out.back().second + 1) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  intervals_ = std::move(out);
}

bool SeqIntervals::includes(const SeqIntervals& other) const {
  for (const auto& [lo, hi] : other.intervals_) {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), lo,
                               [](std::uint64_t s, const Interval& iv) { return s < iv.first; });
    if (it == intervals_.begin()) return false;
    --it;
    if (!(lo >= it->first && hi <= it->second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Digest

Digest Digest::from_frontier(const VersionVector& vv) {
  Digest d;
  for (const auto& [origin, seq] : vv.entries()) d.slot(origin).insert_range(1, seq);
  return d;
}

SeqIntervals& Digest::slot(AgentId origin) {
  auto it = std::lower_bound(origins_.begin(), origins_.end(), origin,
                             [](const auto& e, AgentId o) { return e.first < o; });
  if (it == origins_.end() || it->first != origin) it = origins_.insert(it, {origin, {}});
  return it->second;
}

const SeqIntervals* Digest::find(AgentId origin) const {
  auto it = std::lower_bound(origins_.begin(), origins_.end(), origin,
                             [](const auto& e, AgentId o) { return e.first < o; });
  return (it != origins_.end() && it->first == origin) ? &it->second : nullptr;
}

bool Digest::covers(const EnvelopeId& id) const {
  const auto* s = find(id.origin);
  return s != nullptr && s->contains(id.seq);
}

void Digest::add(const EnvelopeId& id) {
  if (id.seq == 0) return;
  slot(id.origin).insert(id.seq);
}

void Digest::unite(const Digest& other) {
  for (const auto& [origin, seqs] : other.origins_) slot(origin).unite(seqs);
}

void Digest::unite_origin(AgentId origin, const Digest& other) {
  if (const auto* s = other.find(origin)) slot(origin).unite(*s);
}

bool Digest::includes(const Digest& other) const {
  for (const auto& [origin, seqs] : other.origins_) {
    if (seqs.empty()) continue;
    const auto* mine = find(origin);
    if (mine == nullptr || !mine->includes(seqs)) return false;
  }
  return true;
}

VersionVector Digest::frontier() const {
  VersionVector vv;
  for (const auto& [origin, seqs] : origins_) vv.advance(origin, seqs.max());
  return vv;
}

std::vector<std::pair<AgentId, SeqIntervals>> Digest::missing_from(const Digest& remote) const {
  std::vector<std::pair<AgentId, SeqIntervals>> out;
  for (const auto& [origin, theirs] : remote.origins_) {
    const auto* mine = find(origin);
    SeqIntervals gap;
    for (const auto& [lo, hi] : theirs.intervals()) {
      std::uint64_t cursor = lo;
      if (mine != nullptr) {
        for (const auto& [mlo, mhi] : mine->intervals()) {
          if (mhi < cursor) continue;
          if (mlo > hi) break;
          if (mlo > cursor) gap.insert_range(cursor, mlo - 1);
          cursor = mhi + 1;
          if (cursor > hi) break;
        }
      }
      if (cursor <= hi && cursor >= lo) gap.insert_range(cursor, hi);
    }
    if (!gap.empty()) out.emplace_back(origin, std::move(gap));
  }
  return out;
}

std::size_t Digest::encoded_size() const {
  std::size_t n = 4;
  for (const auto& [origin, seqs] : origins_) n += 8 + 4 + 16 * seqs.intervals().size();
  return n;
}

// ---------------------------------------------------------------------------
// Canonical encoding

namespace {

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_f64(Bytes& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

void put_str(Bytes& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

// Priority is encoded by its position in the declared order
// Critical, High, Routine, Low.
std::uint64_t priority_code(PriorityClass p) {
  return 3 - static_cast<std::uint64_t>(p);
}

void put_value(Bytes& out, const Value& v) {
  out.push_back(static_cast<std::uint8_t>(v.index()));
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          put_f64(out, x);
        } else if constexpr (std::is_same_v<T, Fact>) {
          put_str(out, x.predicate);
          put_str(out, x.subject);
          put_str(out, x.qualifier);
        } else if constexpr (std::is_same_v<T, Embedding>) {
          put_u32(out, static_cast<std::uint32_t>(x.components.size()));
          for (double c : x.components) put_f64(out, c);
        } else {
          put_u64(out, x.value);
        }
      },
      v);
}

}  // namespace

Bytes canonical_value_bytes(const Value& v) {
  Bytes out;
  put_value(out, v);
  return out;
}

Bytes canonical_bytes(const Envelope& env) {
  Bytes out;
  out.reserve(64 + env.key.size());
  put_u64(out, env.origin.value);
  put_u64(out, env.seq);
  put_str(out, env.key);
  put_value(out, env.value);
  put_u64(out, priority_code(env.priority));
  put_u64(out, env.created_tick);
  put_u64(out, env.ttl_rounds);
  put_u64(out, env.hop_count);
  return out;
}

std::size_t encoded_size(const Envelope& env) {
  std::size_t value_size = 1;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, Counter>) {
          value_size += 8;
        } else if constexpr (std::is_same_v<T, Fact>) {
          value_size += 12 + x.predicate.size() + x.subject.size() + x.qualifier.size();
        } else {
          value_size += 4 + 8 * x.components.size();
        }
      },
      env.value);
  const std::size_t sig = env.signature ? 4 + env.signature->size() : 0;
  return 8 + 8 + 4 + env.key.size() + value_size + 8 * 4 + sig;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Rng

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Rng Rng::derive(std::uint64_t master_seed, std::uint64_t stream) {
  return Rng(mix64(master_seed ^ mix64(stream)));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(Error::Code::kInvalidArgument, "uniform: bound must be > 0");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t Rng::uniform_between(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) std::swap(lo, hi);
  if (hi - lo == ~std::uint64_t{0}) return next();
  return lo + uniform(hi - lo + 1);
}

double Rng::next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

}  // namespace geacl
