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

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <string>

#include "geacl/dissemination.hpp"
#include "geacl/state_store.hpp"
#include "test_util.hpp"

namespace geacl {
namespace {

using testing::make_env;

TEST(Store, PutLocalAssignsSequence) {
  Store s(AgentId{4});
  Fact defect{"defect_spike", "WS4", "high_severity"};
  Envelope e = s.put_local("defect/WS4", defect, PriorityClass::Critical, 16, 100);
  EXPECT_EQ(e.origin, AgentId{4});
  EXPECT_EQ(e.seq, 1u);
  EXPECT_EQ(e.created_tick, 100u);
  EXPECT_EQ(std::get<Fact>(e.value), defect);
  EXPECT_EQ(s.put_local("x", 1.0, PriorityClass::Routine, 8, 101).seq, 2u);
  ASSERT_NE(s.get("defect/WS4"), nullptr);
  EXPECT_EQ(s.get("defect/WS4")->envelope.value, Value{defect});
}

TEST(Store, PolicyByPrefix) {
  EXPECT_EQ(policy_for_key("hb/3").kind, MergePolicy::Kind::MaxCounter);
  EXPECT_EQ(policy_for_key("cap/3").kind, MergePolicy::Kind::GrowOnlySetUnion);
  EXPECT_EQ(policy_for_key("emb/3").kind, MergePolicy::Kind::VectorBlend);
  EXPECT_EQ(policy_for_key("load/3").kind, MergePolicy::Kind::LwwRegister);
}

TEST(MergeEntry, LwwTieBreaksOnOrigin) {
  MergePolicy lww{};
  auto local = merge_entry(std::nullopt, make_env(2, 1, "k", Fact{"a", "x", "y"}, PriorityClass::Routine, 5), lww, 5);
  auto merged = merge_entry(local.entry, make_env(9, 1, "k", Fact{"b", "x", "y"}, PriorityClass::Routine, 5), lww, 6);
  EXPECT_TRUE(merged.changed);
  EXPECT_EQ(std::get<Fact>(merged.entry.envelope.value).predicate, "b");
}

TEST(MergeEntry, MaxCounterKeepsLarger) {
  MergePolicy max{MergePolicy::Kind::MaxCounter};
  auto local = merge_entry(std::nullopt, make_env(1, 1, "hb/1", Counter{7}), max, 0);
  auto merged = merge_entry(local.entry, make_env(1, 2, "hb/1", Counter{3}), max, 0);
  EXPECT_FALSE(merged.changed);
  EXPECT_EQ(std::get<Counter>(merged.entry.envelope.value).value, 7u);
}

TEST(MergeEntry, TypeConfusionThrows) {
  MergePolicy max{MergePolicy::Kind::MaxCounter};
  try {
    merge_entry(std::nullopt, make_env(1, 1, "hb/1", 2.0), max, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Error::Code::kTypeConfusion);
  }
  Store s(AgentId{1});
  EXPECT_EQ(s.apply_remote(make_env(2, 1, "hb/2", 2.0), 0), ApplyOutcome::Rejected);
}

TEST(MergeEntry, SetUnionCollectsElements) {
  MergePolicy set{MergePolicy::Kind::GrowOnlySetUnion};
  auto a = merge_entry(std::nullopt, make_env(1, 1, "cap/x", Fact{"weld", "arm", "ok"}), set, 0);
  auto b = merge_entry(a.entry, make_env(2, 1, "cap/x", Fact{"paint", "arm", "ok"}), set, 0);
  ASSERT_TRUE(b.entry.set_elements.has_value());
  EXPECT_EQ(b.entry.set_elements->size(), 2u);
}

Envelope random_env(Rng& rng, const std::vector<std::string>& keys) {
  const std::string& key = keys[rng.uniform(keys.size())];
  std::uint64_t origin = 1 + rng.uniform(4);
  Value v;
  if (key.starts_with("hb/")) {
    v = Counter{rng.uniform(50)};
  } else if (key.starts_with("cap/")) {
    v = Fact{"skill", std::to_string(rng.uniform(5)), "ok"};
  } else {
    v = static_cast<double>(rng.uniform(100));
  }
  return make_env(origin, 1 + rng.uniform(1000000), key, v, PriorityClass::Routine,
                  rng.uniform(5), 1000);
}

void expect_same_state(const Store& a, const Store& b) {
  EXPECT_EQ(a.digest(), b.digest());
  ASSERT_EQ(a.entries().size(), b.entries().size());
  for (const auto& [key, entry] : a.entries()) {
    const StoreEntry* other = b.get(key);
    ASSERT_NE(other, nullptr) << key;
    EXPECT_EQ(value_fingerprint(entry), value_fingerprint(*other)) << key;
  }
}

const std::vector<std::string> kKeys{"hb/1", "hb/2", "cap/a", "cap/b", "x", "y", "z"};

TEST(MergeEntry, AllOrderingsOfThreeAgree) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Envelope> envs;
    const std::string key = kKeys[trial % kKeys.size()];
    for (int i = 0; i < 3; ++i) envs.push_back(random_env(rng, {key}));
    std::array<int, 3> order{0, 1, 2};
    std::optional<Store> reference;
    do {
      Store s(AgentId{100});
      for (int i : order) s.apply_remote(envs[i], 0);
      if (!reference) {
        reference = s;
      } else {
        expect_same_state(*reference, s);
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(Store, OrderIndependence) {
  Rng rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = trial < 50 ? 50 : 10;
    std::vector<Envelope> envs;
    for (int i = 0; i < n; ++i) envs.push_back(random_env(rng, kKeys));
    Store a(AgentId{100}), b(AgentId{101});
    for (const auto& e : envs) a.apply_remote(e, 0);
    std::shuffle(envs.begin(), envs.end(), rng);
    for (const auto& e : envs) b.apply_remote(e, 0);
    expect_same_state(a, b);
  }
}

TEST(ApplyRemote, NewThenStale) {
  Store s(AgentId{1});
  Envelope e = make_env(2, 1, "k", 1.0);
  EXPECT_EQ(s.apply_remote(e, 0), ApplyOutcome::New);
  EXPECT_EQ(s.apply_remote(e, 0), ApplyOutcome::Stale);
  EXPECT_EQ(s.apply_remote(make_env(2, 2, "k", 2.0, PriorityClass::Routine, 3), 3),
            ApplyOutcome::Updated);
}

TEST(Delta, ConvergedDigestOwesNothing) {
  Store s(AgentId{1});
  s.put_local("a", 1.0, PriorityClass::Routine, 8, 0);
  EXPECT_TRUE(s.entries_since(s.digest(), 10).empty());
}

TEST(Delta, EmptyDigestGetsEverythingCriticalFirst) {
  Store s(AgentId{1});
  s.put_local("a", 1.0, PriorityClass::Routine, 8, 0);
  s.put_local("b", 2.0, PriorityClass::Low, 8, 0);
  s.put_local("c", 3.0, PriorityClass::Critical, 8, 5);
  auto out = s.entries_since(VersionVector{}, 10);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].key, "c");
  EXPECT_EQ(out[1].key, "a");
  EXPECT_EQ(out[2].key, "b");
  auto capped = s.delta_for(Digest{}, 2);
  EXPECT_EQ(capped.envelopes.size(), 2u);
  EXPECT_FALSE(capped.complete());
}

TEST(Expire, BoundaryRetainsExactTtl) {
  Store s(AgentId{1});
  s.put_local("k", 1.0, PriorityClass::Routine, 2, 0);
  EXPECT_TRUE(s.expire(20, 10).empty());
  EXPECT_NE(s.get("k"), nullptr);
  EXPECT_EQ(s.expire(30, 10), std::vector<std::string>{"k"});
  EXPECT_EQ(s.get("k"), nullptr);
}

TEST(Expire, ExpiredIdsStayCovered) {
  Store s(AgentId{1});
  Envelope e = make_env(2, 1, "k", 1.0, PriorityClass::Routine, 0, 2);
  EXPECT_EQ(s.apply_remote(e, 0), ApplyOutcome::New);
  s.expire(30, 10);
  EXPECT_EQ(s.apply_remote(e, 30), ApplyOutcome::Stale);
  EXPECT_EQ(s.get("k"), nullptr);
}

TEST(AntiEntropy, IdenticalStoresExchangeOnce) {
  Store a(AgentId{1});
  a.put_local("x", 1.0, PriorityClass::Routine, 8, 0);
  Store b(AgentId{2});
  b.apply_remote(a.get("x")->envelope, 0);
  SessionStats st = anti_entropy_session(a, b, 3);
  EXPECT_EQ(st.envelopes_moved, 0u);
  EXPECT_EQ(st.rounds, 1u);
}

TEST(AntiEntropy, DisjointStoresWithSmallCap) {
  Store a(AgentId{1}), b(AgentId{2});
  for (int i = 0; i < 5; ++i) {
    a.put_local("a" + std::to_string(i), 1.0 * i, PriorityClass::Routine, 8, 0);
    b.put_local("b" + std::to_string(i), 2.0 * i, PriorityClass::Routine, 8, 0);
  }
  SessionStats st = anti_entropy_session(a, b, 3);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(b.size(), 10u);
  EXPECT_GE(st.delta_messages, 4u);
  expect_same_state(a, b);
}

TEST(AntiEntropy, RandomPairsConverge) {
  Rng rng(44);
  for (int trial = 0; trial < 500; ++trial) {
    Store a(AgentId{1}), b(AgentId{2});
    const int na = static_cast<int>(rng.uniform(12)), nb = static_cast<int>(rng.uniform(12));
    for (int i = 0; i < na; ++i) a.apply_remote(random_env(rng, kKeys), 0);
    for (int i = 0; i < nb; ++i) b.apply_remote(random_env(rng, kKeys), 0);
    anti_entropy_session(a, b, 1 + rng.uniform(4));
    expect_same_state(a, b);
  }
}

}  // namespace
}  // namespace geacl
