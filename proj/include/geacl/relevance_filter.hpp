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

#ifndef GEACL_RELEVANCE_FILTER_HPP_
#define GEACL_RELEVANCE_FILTER_HPP_

#include <array>
#include <span>
#include <vector>

#include "geacl/core.hpp"

namespace geacl {

/// Event weighting for outgoing rumors. Arrays are indexed by
/// priority_index() (Low, Routine, High, Critical).
struct FilterPolicy {
  std::array<double, 4> priority_weight{1.0, 2.0, 4.0, 8.0};
  double gamma{0.85};
  std::array<std::uint32_t, 4> ttl_rounds{4, 8, 16, 32};
  std::size_t budget{32};

  double weight(PriorityClass p) const { return priority_weight[priority_index(p)]; }
  std::uint32_t ttl(PriorityClass p) const { return ttl_rounds[priority_index(p)]; }
  /// Weights strictly positive and increasing with priority; gamma in (0, 1].
  bool valid() const;
};

/// weight(priority) * gamma^(whole rounds since creation).
double score(const Envelope& env, Tick now, Tick round_len, const FilterPolicy& policy);

/// Total order used for selection: score desc, created_tick asc, origin asc, seq asc.
bool filter_order(const Envelope& a, const Envelope& b, Tick now, Tick round_len,
                  const FilterPolicy& policy);

struct FilterSelection {
  std::vector<const Envelope*> chosen;
  std::size_t critical_overflow{0};
};

/// Top `budget` rumors in filter order, plus every remaining Critical rumor.
FilterSelection select_for_message(std::span<const Envelope* const> active, std::size_t budget,
                                   Tick now, Tick round_len, const FilterPolicy& policy);

}  // namespace geacl

#endif  // GEACL_RELEVANCE_FILTER_HPP_
