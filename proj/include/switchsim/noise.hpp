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

#include <cmath>
#include <stdexcept>

#include "switchsim/switch_core.hpp"

namespace switchsim {

/// Interferometer and source imperfections.
///
/// visibility scales the fringe contrast; efficiency is the probability that
/// a prepared photon is detected; multi_pair is the chance an emission event
/// carries more than one pair. Efficiency and multi_pair enter only through
/// resource accounting: conditional on detection the fringe follows the
/// visibility-degraded law unchanged.
struct NoiseParams {
    double visibility = 0.989;
    double efficiency = 0.506;
    double multi_pair = 0.0004;

    void validate() const {
        if (!(visibility >= 0.0 && visibility <= 1.0)) {
            throw std::invalid_argument("visibility must be in [0, 1]");
        }
        if (!(efficiency > 0.0 && efficiency <= 1.0)) {
            throw std::invalid_argument("efficiency must be in (0, 1]");
        }
        if (!(multi_pair >= 0.0 && multi_pair < 1.0)) {
            throw std::invalid_argument("multi_pair must be in [0, 1)");
        }
    }
};

/// Photon bookkeeping for m detected counts at n pairs per count.
struct ResourceAccount {
    int detected;
    int pairs;
    double consumed;         // expected photons used, m(1+xi)/eta
    double global_resource;  // consumed * n
};

/// Visibility-degraded fringe: p_plus = (1 + nu cos value)/2.
inline OutcomeProbabilities noisy_probabilities(const GeometricPhase& phase, double nu) {
    if (!(nu >= 0.0 && nu <= 1.0)) {
        throw std::invalid_argument("noisy_probabilities: visibility must be in [0, 1]");
    }
    if (!std::isfinite(phase.value)) {
        throw std::invalid_argument("noisy_probabilities: non-finite phase");
    }
    return OutcomeProbabilities::from_p_plus((1.0 + nu * std::cos(phase.value)) / 2.0);
}

/// Precision a super-Heisenberg strategy must beat: eta/(m n (1+xi)).
inline double hl_bound(int m, int n, double eta, double xi) {
    if (m < 1 || n < 1) {
        throw std::invalid_argument("hl_bound: m and n must be >= 1");
    }
    return eta / (static_cast<double>(m) * static_cast<double>(n) * (1.0 + xi));
}

/// Standard-quantum-limit companion curve: sqrt(hl_bound).
inline double sql_bound(int m, int n, double eta, double xi) {
    return std::sqrt(hl_bound(m, n, eta, xi));
}

/// Unconditional-violation statistic eta^2 nu^2 n^2 / (m (1+xi)^2); the
/// Heisenberg limit is beaten iff this exceeds 1.
inline double hl_criterion(const NoiseParams& params, int m, int n) {
    if (m < 1 || n < 1) {
        throw std::invalid_argument("hl_criterion: m and n must be >= 1");
    }
    double opx = 1.0 + params.multi_pair;
    return params.efficiency * params.efficiency * params.visibility * params.visibility *
           static_cast<double>(n) * static_cast<double>(n) / (static_cast<double>(m) * opx * opx);
}

/// SQL-violation statistic eta nu^2 n; independent of m.
inline double sql_criterion(const NoiseParams& params, int n) {
    if (n < 1) {
        throw std::invalid_argument("sql_criterion: n must be >= 1");
    }
    return params.efficiency * params.visibility * params.visibility * static_cast<double>(n);
}

inline ResourceAccount resource_account(int m, int n, const NoiseParams& params) {
    if (m < 1 || n < 1) {
        throw std::invalid_argument("resource_account: m and n must be >= 1");
    }
    double consumed = static_cast<double>(m) * (1.0 + params.multi_pair) / params.efficiency;
    return ResourceAccount{m, n, consumed, consumed * static_cast<double>(n)};
}

}  // namespace switchsim
