#!/usr/bin/env python3
#  Copyright 2026 The GEACL Simulator Authors
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

"""Reference encoder and RNG used to produce the frozen golden files.

Written independently of the C++ sources; rerun only when the wire format
changes on purpose.
"""

import hashlib
import hmac
import json
import pathlib
import struct

MASK = (1 << 64) - 1
HERE = pathlib.Path(__file__).resolve().parent


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def mix64(x):
    return splitmix64(x)[1]


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro256ss:
    def __init__(self, seed):
        st = seed & MASK
        self.s = []
        for _ in range(4):
            st, v = splitmix64(st)
            self.s.append(v)

    @classmethod
    def derive(cls, master, stream):
        return cls(mix64(master ^ mix64(stream)))

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def uniform(self, bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound


# Wire priority codes: Critical 0, High 1, Routine 2, Low 3.
PRIORITY = {"Critical": 0, "High": 1, "Routine": 2, "Low": 3}


def enc_str(s):
    b = s.encode()
    return struct.pack(">I", len(b)) + b


def enc_value(v):
    kind, payload = v
    if kind == "scalar":
        return b"\x00" + struct.pack(">d", payload)
    if kind == "fact":
        return b"\x01" + b"".join(enc_str(p) for p in payload)
    if kind == "vector":
        return b"\x02" + struct.pack(">I", len(payload)) + b"".join(struct.pack(">d", x) for x in payload)
    if kind == "counter":
        return b"\x03" + struct.pack(">Q", payload)
    raise ValueError(kind)


def canonical(origin, seq, key, value, priority, tick, ttl, hops):
    return (struct.pack(">QQ", origin, seq) + enc_str(key) + enc_value(value) +
            struct.pack(">QQQQ", PRIORITY[priority], tick, ttl, hops))


def main():
    fixture = canonical(1, 1, "k", ("scalar", 0.0), "Routine", 0, 8, 0)
    (HERE / "canonical_envelope.bin").write_bytes(fixture)

    fact = canonical(1, 1, "defect/WS4", ("fact", ["defect_spike", "WS4", "high_severity"]),
                     "Critical", 100, 16, 0)
    (HERE / "canonical_fact_envelope.bin").write_bytes(fact)

    rng = {}
    for seed in (0, 1, 42):
        g = Xoshiro256ss(seed)
        rng[f"seed_{seed}"] = [str(g.next()) for _ in range(8)]
    g = Xoshiro256ss.derive(42, 0xE000000000000002)
    rng["derive_42_network"] = [str(g.next()) for _ in range(8)]
    g = Xoshiro256ss(7)
    rng["uniform_7_bound_10"] = [g.uniform(10) for _ in range(16)]

    key = bytes(range(32))
    signing = canonical(1, 1, "k", ("scalar", 0.0), "Routine", 0, 8, 0)
    golden = {
        "rng": rng,
        "hmac_key_hex": key.hex(),
        "hmac_fixture_hex": hmac.new(key, signing, hashlib.sha256).hexdigest(),
        "sha256_fixture_hex": hashlib.sha256(fixture).hexdigest(),
    }
    (HERE / "golden.json").write_text(json.dumps(golden, indent=2) + "\n")


if __name__ == "__main__":
    main()
