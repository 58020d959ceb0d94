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

#include "geacl/trace.hpp"

#include <openssl/evp.h>

#include <bit>
#include <istream>
#include <json.hpp>
#include <ostream>

namespace geacl {

using nlohmann::json;

std::optional<std::size_t> Trace::key_index(const std::string& key) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].key == key) return i;
  }
  return std::nullopt;
}

namespace {

class Hasher {
 public:
  Hasher() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr); }
  ~Hasher() { EVP_MD_CTX_free(ctx_); }
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  void u64(std::uint64_t v) {
    std::uint8_t buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    EVP_DigestUpdate(ctx_, buf, sizeof buf);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    EVP_DigestUpdate(ctx_, s.data(), s.size());
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    return to_hex(md, len);
  }

  static std::string to_hex(const unsigned char* p, std::size_t n) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(kDigits[p[i] >> 4]);
      out.push_back(kDigits[p[i] & 0xF]);
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  return Hasher::to_hex(md, len);
}

std::string trace_hash(const Trace& trace) {
  Hasher h;
  h.u64(trace.seed);
  h.u64(trace.initial_agents);
  h.u64(trace.round_len);
  h.u64(trace.environment_hash);
  h.u64(trace.timed_out ? 1 : 0);
  h.u64(trace.keys.size());
  for (const auto& k : trace.keys) {
    h.str(k.key);
    h.u64(k.is_vector ? 1 : 0);
  }
  h.u64(trace.events.size());
  for (const auto& e : trace.events) {
    h.u64(e.tick);
    h.u64(static_cast<std::uint64_t>(e.kind));
    h.u64(e.agent);
    h.u64(e.peer);
    h.u64(e.a);
    h.u64(e.b);
    h.u64(e.c);
    h.f64(e.x);
    h.str(e.label);
  }
  h.u64(trace.samples.size());
  for (const auto& s : trace.samples) {
    h.u64(s.round);
    h.u64(s.tick);
    h.u64(s.alive.size());
    for (auto a : s.alive) h.u64(a);
    h.u64(s.fingerprints.size());
    for (const auto& row : s.fingerprints) {
      h.u64(row.size());
      for (auto f : row) h.u64(f);
    }
    h.u64(s.vectors.size());
    for (const auto& row : s.vectors) {
      h.u64(row.size());
      for (const auto& v : row) {
        h.u64(v.size());
        for (double d : v) h.f64(d);
      }
    }
  }
  return h.hex();
}

// Doubles are persisted as their IEEE bit patterns so a reloaded trace is
// bit-identical to the live one.
void write_ndjson(const Trace& trace, std::ostream& out) {
  json header = {{"type", "header"},
                 {"seed", trace.seed},
                 {"initial_agents", trace.initial_agents},
                 {"round_len", trace.round_len},
                 {"environment_hash", trace.environment_hash},
                 {"timed_out", trace.timed_out}};
  json keys = json::array();
  for (const auto& k : trace.keys) keys.push_back({{"key", k.key}, {"vector", k.is_vector}});
  header["keys"] = std::move(keys);
  out << header.dump() << '\n';

  for (const auto& e : trace.events) {
    json j = {{"type", "event"},
              {"tick", e.tick},
              {"kind", static_cast<int>(e.kind)},
              {"agent", e.agent},
              {"peer", e.peer},
              {"a", e.a},
              {"b", e.b},
              {"c", e.c},
              {"x", std::bit_cast<std::uint64_t>(e.x)}};
    if (!e.label.empty()) j["label"] = e.label;
    out << j.dump() << '\n';
  }
  for (const auto& s : trace.samples) {
    json vectors = json::array();
    for (const auto& row : s.vectors) {
      json r = json::array();
      for (const auto& v : row) {
        json bits = json::array();
        for (double d : v) bits.push_back(std::bit_cast<std::uint64_t>(d));
        r.push_back(std::move(bits));
      }
      vectors.push_back(std::move(r));
    }
    json j = {{"type", "sample"},      {"round", s.round},
              {"tick", s.tick},        {"alive", s.alive},
              {"fp", s.fingerprints},  {"vectors", std::move(vectors)}};
    out << j.dump() << '\n';
  }
}

Trace read_ndjson(std::istream& in) {
  Trace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      trace.seed = j.at("seed");
      trace.initial_agents = j.at("initial_agents");
      trace.round_len = j.at("round_len");
      trace.environment_hash = j.at("environment_hash");
      trace.timed_out = j.at("timed_out");
      for (const auto& k : j.at("keys")) {
        trace.keys.push_back({k.at("key").get<std::string>(), k.at("vector").get<bool>()});
      }
    } else if (type == "event") {
      TraceEvent e;
      e.tick = j.at("tick");
      e.kind = static_cast<EventKind>(j.at("kind").get<int>());
      e.agent = j.at("agent");
      e.peer = j.at("peer");
      e.a = j.at("a");
      e.b = j.at("b");
      e.c = j.at("c");
      e.x = std::bit_cast<double>(j.at("x").get<std::uint64_t>());
      if (j.contains("label")) e.label = j.at("label").get<std::string>();
      trace.events.push_back(std::move(e));
    } else if (type == "sample") {
      RoundSample s;
      s.round = j.at("round");
      s.tick = j.at("tick");
      s.alive = j.at("alive").get<std::vector<std::uint64_t>>();
      s.fingerprints = j.at("fp").get<std::vector<std::vector<std::uint64_t>>>();
      for (const auto& row : j.at("vectors")) {
        std::vector<std::vector<double>> r;
        for (const auto& bits : row) {
          std::vector<double> v;
          for (const auto& b : bits) v.push_back(std::bit_cast<double>(b.get<std::uint64_t>()));
          r.push_back(std::move(v));
        }
        s.vectors.push_back(std::move(r));
      }
      trace.samples.push_back(std::move(s));
    } else {
      throw Error(Error::Code::kInvalidArgument, "unknown trace record type '" + type + "'");
    }
  }
  return trace;
}

}  // namespace geacl
