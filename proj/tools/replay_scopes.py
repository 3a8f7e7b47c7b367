#!/usr/bin/env python3
# Copyright 2026 The ISAAC Audit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Standalone replay of matched-scope sampling (see include/isaac/random.h).

Usage: replay_scopes.py SEQ_LENGTH PRIOR_INDICES SEED [--fraction F]
       [--pairs N] [--operator mask|substitution] [--target-id ID]
"""

import argparse
import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def hash_string(s):
    h = 0xCBF29CE484222325
    for c in s.encode("utf-8"):
        h ^= c
        h = (h * 0x00000100000001B3) & MASK64
    return h


def derive_seed(parts):
    h = 0x6A09E667F3BCC908
    for v in parts:
        h = mix64(h ^ (v & MASK64))
        h = (h + GOLDEN) & MASK64
    return h


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next(self):
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform_below(self, n):
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next()
            if r >= threshold:
                return r % n


def sample_subset(population, k, rng):
    pool = list(population)
    for i in range(k):
        j = i + rng.uniform_below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])


def scope_cardinality(prior_size, fraction):
    x = fraction * prior_size
    k = math.floor(x + 0.5)  # half away from zero for x >= 0
    return max(1, int(k))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("length", type=int)
    ap.add_argument("prior", help="comma-separated 1-based indices")
    ap.add_argument("seed", type=int)
    ap.add_argument("--fraction", type=float, default=0.25)
    ap.add_argument("--pairs", type=int, default=1)
    ap.add_argument("--operator", choices=["mask", "substitution"], default="mask")
    ap.add_argument("--target-id", default="T")
    args = ap.parse_args()

    prior = sorted({int(x) for x in args.prior.split(",")})
    complement = [i for i in range(1, args.length + 1) if i not in set(prior)]
    k = scope_cardinality(len(prior), args.fraction)
    op = 0 if args.operator == "mask" else 1
    for r in range(args.pairs):
        rng = SplitMix64(derive_seed([args.seed, hash_string(args.target_id), r, op]))
        mech = sample_subset(prior, k, rng)
        spur = sample_subset(complement, k, rng)
        print(r, ",".join(map(str, mech)), ",".join(map(str, spur)), sep="\t")


if __name__ == "__main__":
    main()
