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
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace switchsim {

/// The n position displacements x_j and n momentum displacements p_k of one
/// switch run, in dimensionless quadrature units where [X, P] = i.
///
/// Sign convention: D_x D_p = e^{+ixp} D_p D_x, so the branch that applies
/// all momentum kicks first (chronologically) leads the other branch by the
/// phase (sum x_j)(sum p_k). The fringe observable cos of that phase is even,
/// so the convention only matters when reading complex overlaps.
struct DisplacementSequence {
    std::vector<double> x_list;
    std::vector<double> p_list;

    DisplacementSequence(std::vector<double> xs, std::vector<double> ps)
        : x_list(std::move(xs)), p_list(std::move(ps)) {
        if (x_list.size() != p_list.size()) {
            throw std::invalid_argument("displacement sequence: x_list and p_list lengths differ");
        }
        for (double v : x_list) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("displacement sequence: non-finite x entry");
            }
        }
        for (double v : p_list) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("displacement sequence: non-finite p entry");
            }
        }
    }

    size_t n() const {
        return x_list.size();
    }
};

/// Uniform sequence with n copies of xbar and pbar each.
inline DisplacementSequence uniform_sequence(size_t n, double xbar, double pbar) {
    return DisplacementSequence(std::vector<double>(n, xbar), std::vector<double>(n, pbar));
}

/// Total phase between the two causal orders and its per-pair value A.
struct GeometricPhase {
    /// n^2 * A = (sum x_j)(sum p_k), radians.
    double value;
    /// A = xbar * pbar; 0 for an empty sequence.
    double per_pair;
};

/// Probabilities of the |+> and |-> control outcomes. Constructed so
/// p_plus + p_minus == 1 exactly.
struct OutcomeProbabilities {
    double p_plus;
    double p_minus;

    static OutcomeProbabilities from_p_plus(double p) {
        if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) {
            throw std::invalid_argument("outcome probability outside [0, 1]");
        }
        p = p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
        return OutcomeProbabilities{p, 1.0 - p};
    }
};

/// Componentwise sums (n*xbar, n*pbar); displacements of one type commute and
/// compose additively.
inline std::pair<double, double> total_displacements(const DisplacementSequence& seq) {
    double sx = 0.0, sp = 0.0;
    for (double v : seq.x_list) {
        sx += v;
    }
    for (double v : seq.p_list) {
        sp += v;
    }
    return {sx, sp};
}

/// Phase accrued between the two orders: value = (sum x_j)(sum p_k).
inline GeometricPhase geometric_phase(const DisplacementSequence& seq) {
    auto [sx, sp] = total_displacements(seq);
    double value = sx * sp;
    size_t n = seq.n();
    double per_pair = n > 0 ? value / (static_cast<double>(n) * static_cast<double>(n)) : 0.0;
    return GeometricPhase{value, per_pair};
}

/// Ideal Fourier-basis fringe: p_plus = (1 + cos value)/2.
inline OutcomeProbabilities ideal_probabilities(const GeometricPhase& phase) {
    if (!std::isfinite(phase.value)) {
        throw std::invalid_argument("ideal_probabilities: non-finite phase");
    }
    return OutcomeProbabilities::from_p_plus((1.0 + std::cos(phase.value)) / 2.0);
}

}  // namespace switchsim
