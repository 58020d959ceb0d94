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

#include "geacl/relevance_filter.hpp"

#include <algorithm>
#include <cmath>

namespace geacl {

bool FilterPolicy::valid() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) return false;
  if (budget == 0) return false;
  for (std::size_t i = 0; i < priority_weight.size(); ++i) {
    if (!(priority_weight[i] > 0.0)) return false;
    if (i > 0 && !(priority_weight[i] > priority_weight[i - 1])) return false;
    if (ttl_rounds[i] == 0) return false;
  }
  return true;
}

double score(const Envelope& env, Tick now, Tick round_len, const FilterPolicy& policy) {
  const Tick age_ticks = now > env.created_tick ? now - env.created_tick : 0;
  const auto rounds = round_len == 0 ? 0 : age_ticks / round_len;
  return policy.weight(env.priority) * std::pow(policy.gamma, static_cast<double>(rounds));
}

bool filter_order(const Envelope& a, const Envelope& b, Tick now, Tick round_len,
                  const FilterPolicy& policy) {
  const double sa = score(a, now, round_len, policy);
  const double sb = score(b, now, round_len, policy);
  if (sa != sb) return sa > sb;
  if (a.created_tick != b.created_tick) return a.created_tick < b.created_tick;
  if (a.origin != b.origin) return a.origin < b.origin;
  return a.seq < b.seq;
}

FilterSelection select_for_message(std::span<const Envelope* const> active, std::size_t budget,
                                   Tick now, Tick round_len, const FilterPolicy& policy) {
  if (budget == 0) throw Error(Error::Code::kInvalidArgument, "filter budget must be >= 1");
  std::vector<const Envelope*> ranked(active.begin(), active.end());
  std::sort(ranked.begin(), ranked.end(), [&](const Envelope* a, const Envelope* b) {
    return filter_order(*a, *b, now, round_len, policy);
  });

  FilterSelection out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < budget) {
      out.chosen.push_back(ranked[i]);
    } else if (ranked[i]->priority == PriorityClass::Critical) {
      out.chosen.push_back(ranked[i]);
      ++out.critical_overflow;
    }
  }
  return out;
}

}  // namespace geacl
