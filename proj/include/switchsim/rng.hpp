// Copyright 2026 The switchsim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>

namespace switchsim {

/// SplitMix64 finalizer. Bijective 64-bit mix with full avalanche.
inline constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// SplitMix64 stream. Every random draw in the toolkit flows from one of
/// these; streams are derived from (seed, path) so that per-trial and
/// per-resample substreams are independent and machine-independent.
struct SplitMix64 {
    uint64_t state = 0;

    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        return mix64(state);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) via Lemire's multiply-shift rejection.
    /// bound must be nonzero.
    uint64_t next_below(uint64_t bound) {
        unsigned __int128 prod = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<uint64_t>(prod);
        if (lo < bound) {
            uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                prod = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<uint64_t>(prod);
            }
        }
        return static_cast<uint64_t>(prod >> 64);
    }
};

/// Derives an independent child stream from a root seed and a path of
/// integers (domain tag, then coordinates such as n and trial index).
/// Deterministic, order-sensitive, collision-resistant through mix64.
inline SplitMix64 derive_stream(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t s = mix64(seed ^ 0x6a09e667f3bcc909ull);
    for (uint64_t p : path) {
        s = mix64(s ^ mix64(p + 0x9e3779b97f4a7c15ull));
    }
    return SplitMix64{s};
}

/// Binomial(m, p) sample as a sum of m Bernoulli draws. O(m), but exactly
/// reproducible across platforms, unlike distribution objects from the
/// standard library.
inline uint64_t binomial_draw(uint64_t m, double p, SplitMix64& gen) {
    uint64_t k = 0;
    for (uint64_t i = 0; i < m; ++i) {
        k += gen.next_double() < p ? 1 : 0;
    }
    return k;
}

}  // namespace switchsim
