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

#include "geacl/core.hpp"
#include "test_util.hpp"

namespace geacl {
namespace {

using testing::make_env;

constexpr AgentId A{1}, B{2}, C{3};

TEST(VersionVector, MergeIsPointwiseMax) {
  VersionVector a{{A, 3}, {B, 1}};
  VersionVector b{{A, 2}, {C, 4}};
  EXPECT_EQ(vv_merge(a, b), (VersionVector{{A, 3}, {B, 1}, {C, 4}}));
  EXPECT_EQ(vv_merge(VersionVector{}, VersionVector{{A, 5}}), (VersionVector{{A, 5}}));
}

TEST(VersionVector, MergeLawsOnRandomVectors) {
  Rng rng(11);
  auto random_vv = [&] {
    VersionVector v;
    for (int i = 0; i < 6; ++i) v.advance(AgentId{rng.uniform(10)}, 1 + rng.uniform(20));
    return v;
  };
  for (int i = 0; i < 1000; ++i) {
    VersionVector x = random_vv(), y = random_vv(), z = random_vv();
    EXPECT_EQ(vv_merge(x, x), x);
    EXPECT_EQ(vv_merge(x, y), vv_merge(y, x));
    EXPECT_EQ(vv_merge(vv_merge(x, y), z), vv_merge(x, vv_merge(y, z)));
  }
}

TEST(VersionVector, Missing) {
  VersionVector local{{A, 3}};
  VersionVector remote{{A, 5}, {B, 2}};
  auto missing = vv_missing(local, remote);
  ASSERT_EQ(missing.size(), 2u);
  EXPECT_EQ(missing[0], std::make_pair(A, std::uint64_t{3}));
  EXPECT_EQ(missing[1], std::make_pair(B, std::uint64_t{0}));
  EXPECT_TRUE(vv_missing(remote, remote).empty());
}

TEST(SeqIntervals, CoalescesAdjacentRanges) {
  SeqIntervals s;
  s.insert(1);
  s.insert(3);
  EXPECT_EQ(s.intervals().size(), 2u);
  s.insert(2);
  ASSERT_EQ(s.intervals().size(), 1u);
  EXPECT_EQ(s.intervals()[0], std::make_pair(std::uint64_t{1}, std::uint64_t{3}));
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(4));
}

TEST(Digest, OutOfOrderStaysExact) {
  Digest d;
  d.add({A, 1});
  d.add({A, 3});
  EXPECT_TRUE(d.covers({A, 3}));
  EXPECT_FALSE(d.covers({A, 2}));
  EXPECT_EQ(d.frontier(), (VersionVector{{A, 3}}));
  Digest full = Digest::from_frontier(VersionVector{{A, 3}});
  EXPECT_TRUE(full.includes(d));
  EXPECT_FALSE(d.includes(full));
}

TEST(CanonicalBytes, MatchesFrozenFixture) {
  Envelope e = make_env(1, 1, "k", 0.0, PriorityClass::Routine, 0, 8);
  EXPECT_EQ(canonical_bytes(e), testing::read_golden_bytes("canonical_envelope.bin"));

  Envelope f = make_env(1, 1, "defect/WS4", Fact{"defect_spike", "WS4", "high_severity"},
                        PriorityClass::Critical, 100, 16);
  EXPECT_EQ(canonical_bytes(f), testing::read_golden_bytes("canonical_fact_envelope.bin"));
}

TEST(CanonicalBytes, DeterministicAndSignatureFree) {
  Envelope a = make_env(7, 3, "k", 1.5);
  Envelope b = a;
  EXPECT_EQ(canonical_bytes(a), canonical_bytes(b));
  b.signature = Bytes{1, 2, 3};
  EXPECT_EQ(canonical_bytes(a), canonical_bytes(b));
}

TEST(CanonicalBytes, SeqChangesOnlySeqField) {
  Envelope a = make_env(7, 3, "k", 1.5);
  Envelope b = a;
  b.seq = 0x0102030405060708ULL;
  Bytes x = canonical_bytes(a), y = canonical_bytes(b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i >= 8 && i < 16) continue;
    EXPECT_EQ(x[i], y[i]) << "byte " << i;
  }
  EXPECT_FALSE(std::equal(x.begin() + 8, x.begin() + 16, y.begin() + 8));
}

TEST(CanonicalBytes, DistinguishesValueVariants) {
  Bytes scalar = canonical_value_bytes(Value{1.0});
  Bytes counter = canonical_value_bytes(Value{Counter{1}});
  EXPECT_NE(scalar, counter);
  EXPECT_EQ(scalar[0], 0);
  EXPECT_EQ(counter[0], 3);
}

std::uint64_t parse_u64(const nlohmann::json& j) { return std::stoull(j.get<std::string>()); }

TEST(Rng, MatchesReferenceStreams) {
  auto golden = testing::read_golden_json("golden.json")["rng"];
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
    Rng rng(seed);
    const auto& expected = golden["seed_" + std::to_string(seed)];
    for (const auto& v : expected) EXPECT_EQ(rng.next(), parse_u64(v)) << "seed " << seed;
  }
  Rng derived = Rng::derive(42, streams::kNetwork);
  for (const auto& v : golden["derive_42_network"]) EXPECT_EQ(derived.next(), parse_u64(v));
  Rng bounded(7);
  for (const auto& v : golden["uniform_7_bound_10"]) EXPECT_EQ(bounded.uniform(10), v.get<std::uint64_t>());
}

TEST(Rng, DoublesInUnitInterval) {
  Rng rng(3);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    double d = rng.next_double();
    ASSERT_GE(d, 0.0);
    ASSERT_LT(d, 1.0);
    sum += d;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Rng, DerivedStreamsDiffer) {
  EXPECT_NE(Rng::derive(1, streams::kNetwork).next(), Rng::derive(1, streams::kTopology).next());
  EXPECT_EQ(Rng::derive(1, 5).next(), Rng::derive(1, 5).next());
}

TEST(Priority, ParseRoundTrip) {
  for (PriorityClass p : kAllPriorities) EXPECT_EQ(parse_priority(to_string(p)), p);
  EXPECT_FALSE(parse_priority("Urgent").has_value());
}

}  // namespace
}  // namespace geacl
