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
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "switchsim/rng.hpp"

namespace switchsim {

/// Photon tally of one experimental repetition: k_minus of m detected photons
/// landed in the |-> port.
struct TrialOutcome {
    int k_minus;
    int m;

    TrialOutcome(int k_minus, int m) : k_minus(k_minus), m(m) {
        if (m < 1 || k_minus < 0 || k_minus > m) {
            throw std::invalid_argument("trial outcome requires 0 <= k_minus <= m, m >= 1");
        }
    }
};

/// Interval of admissible A values. Estimation is local: the interval must
/// map under a -> n^2 a into one half-period of the fringe so the cosine is
/// invertible on it.
struct PriorInterval {
    double lo;
    double hi;

    PriorInterval(double lo, double hi) : lo(lo), hi(hi) {
        if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi) {
            throw std::invalid_argument("prior interval requires finite lo <= hi");
        }
    }
};

struct Estimate {
    double a_hat;
    bool clamped;  // likelihood boundary or prior edge hit
};

struct RmseResult {
    double rmse;
    int trials;
    double a_true;
};

struct BootstrapResult {
    double rmse_std;
    int resamples;
    uint64_t seed;
};

/// Ideal per-photon Fisher information about A: n^4.
inline double fisher_ideal(int n) {
    if (n < 0) {
        throw std::invalid_argument("fisher_ideal: n must be >= 0");
    }
    double n2 = static_cast<double>(n) * static_cast<double>(n);
    return n2 * n2;
}

/// Visibility-degraded Fisher information
/// nu^2 n^4 sin^2(n^2 a) / (1 - nu^2 cos^2(n^2 a)).
///
/// At nu = 1 the ratio collapses analytically to n^4 for every phase; at the
/// fringe extrema that value is the removable 0/0 limit, reported through
/// removable_limit when a caller passes the flag.
inline double fisher_noisy(int n, double a, double nu, bool* removable_limit = nullptr) {
    if (!(nu >= 0.0 && nu <= 1.0)) {
        throw std::invalid_argument("fisher_noisy: visibility must be in [0, 1]");
    }
    if (n < 0 || !std::isfinite(a)) {
        throw std::invalid_argument("fisher_noisy: invalid n or a");
    }
    if (removable_limit != nullptr) {
        *removable_limit = false;
    }
    double n2 = static_cast<double>(n) * static_cast<double>(n);
    double theta = n2 * a;
    if (nu == 1.0) {
        if (removable_limit != nullptr && std::sin(theta) == 0.0) {
            *removable_limit = true;
        }
        return n2 * n2;
    }
    double s = std::sin(theta);
    double c = std::cos(theta);
    return nu * nu * n2 * n2 * s * s / (1.0 - nu * nu * c * c);
}

/// Cramer-Rao bound 1/sqrt(m F). Zero Fisher information is signaled by a
/// +infinity bound.
inline double crb(int m, double fisher) {
    if (m < 1 || fisher < 0.0) {
        throw std::invalid_argument("crb: m >= 1 and fisher >= 0 required");
    }
    if (fisher == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / std::sqrt(static_cast<double>(m) * fisher);
}

struct PhaseEstimate {
    double theta_hat;
    bool clamped;
};

/// Closed-form MLE of the total fringe phase theta from k of m counts in the
/// |-> port under p_minus = (1 - nu cos theta)/2, restricted to the prior
/// phase interval [theta_lo, theta_hi].
///
/// The interval must sit inside one half-period [k0 pi, (k0+1) pi]; there the
/// likelihood is unimodal in theta and the maximizer is the projection of the
/// unconstrained solution arccos((1 - 2k/m)/nu) onto the interval. clamped
/// reports either the arccos argument leaving [-1, 1] or a prior-edge hit.
inline PhaseEstimate mle_phase(int k, int m, double nu, double theta_lo, double theta_hi) {
    if (m < 1 || k < 0 || k > m) {
        throw std::invalid_argument("mle_phase: need 0 <= k <= m, m >= 1");
    }
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw std::invalid_argument("mle_phase: visibility must be in (0, 1] for identifiability");
    }
    if (!(std::isfinite(theta_lo) && std::isfinite(theta_hi)) || theta_lo > theta_hi) {
        throw std::invalid_argument("mle_phase: invalid phase interval");
    }
    const double pi = std::acos(-1.0);
    const double tol = 1e-9 * (1.0 + std::abs(theta_lo) + std::abs(theta_hi));
    double k0 = std::floor(theta_lo / pi);
    if (theta_lo - k0 * pi >= pi - tol) {
        k0 += 1.0;  // lo sits on the upper block boundary within rounding
    }
    if (theta_hi > (k0 + 1.0) * pi + tol) {
        throw std::invalid_argument("mle_phase: prior spans more than a half-period of the fringe");
    }
    double c = (1.0 - 2.0 * static_cast<double>(k) / static_cast<double>(m)) / nu;
    bool clamped = false;
    if (c > 1.0) {
        c = 1.0;
        clamped = true;
    } else if (c < -1.0) {
        c = -1.0;
        clamped = true;
    }
    bool even = std::fmod(std::abs(k0), 2.0) < 0.5;
    double theta = k0 * pi + std::acos(even ? c : -c);
    if (theta < theta_lo) {
        theta = theta_lo;
        clamped = true;
    } else if (theta > theta_hi) {
        theta = theta_hi;
        clamped = true;
    }
    return PhaseEstimate{theta, clamped};
}

/// MLE of the per-pair phase A for one trial. The prior is an interval of A
/// values; see mle_phase for the invertibility requirement.
inline Estimate mle_estimate(const TrialOutcome& outcome, int n, double nu,
                             const PriorInterval& prior) {
    if (n < 1) {
        throw std::invalid_argument("mle_estimate: n must be >= 1");
    }
    double n2 = static_cast<double>(n) * static_cast<double>(n);
    PhaseEstimate pe = mle_phase(outcome.k_minus, outcome.m, nu, n2 * prior.lo, n2 * prior.hi);
    double a_hat = pe.theta_hat / n2;
    // Scaling the clamped phase back down can overshoot the interval by one
    // rounding step; the estimate contract keeps a_hat inside the prior.
    a_hat = a_hat < prior.lo ? prior.lo : (a_hat > prior.hi ? prior.hi : a_hat);
    return Estimate{a_hat, pe.clamped};
}

/// The full half-period block of A values whose phase block contains
/// n^2 a_center: [k0 pi, (k0+1) pi] / n^2.
inline PriorInterval half_period_prior(double a_center, int n) {
    if (n < 1 || !std::isfinite(a_center)) {
        throw std::invalid_argument("half_period_prior: n >= 1 and finite a_center required");
    }
    const double pi = std::acos(-1.0);
    double n2 = static_cast<double>(n) * static_cast<double>(n);
    double k0 = std::floor(n2 * a_center / pi);
    return PriorInterval{k0 * pi / n2, (k0 + 1.0) * pi / n2};
}

inline RmseResult rmse(const std::vector<Estimate>& estimates, double a_true) {
    if (estimates.empty()) {
        throw std::invalid_argument("rmse: empty estimate list");
    }
    double s = 0.0;
    for (const Estimate& e : estimates) {
        double d = e.a_hat - a_true;
        s += d * d;
    }
    return RmseResult{std::sqrt(s / static_cast<double>(estimates.size())),
                      static_cast<int>(estimates.size()), a_true};
}

/// Stream-domain tags used with derive_stream.
inline constexpr uint64_t kStreamTrial = 1;
inline constexpr uint64_t kStreamBootstrap = 2;

/// Standard deviation of the RMSE statistic over with-replacement resamples
/// of the estimate list. Deterministic for a fixed seed; resample r draws
/// from the stream derive_stream(seed, {kStreamBootstrap, r}).
inline BootstrapResult bootstrap_rmse_std(const std::vector<Estimate>& estimates, double a_true,
                                          int resamples, uint64_t seed) {
    if (estimates.empty()) {
        throw std::invalid_argument("bootstrap_rmse_std: empty estimate list");
    }
    if (resamples < 100) {
        throw std::invalid_argument("bootstrap_rmse_std: need at least 100 resamples");
    }
    const size_t t = estimates.size();
    std::vector<double> sq(t);
    for (size_t i = 0; i < t; ++i) {
        double d = estimates[i].a_hat - a_true;
        sq[i] = d * d;
    }
    std::vector<double> rms(static_cast<size_t>(resamples));
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int r = 0; r < resamples; ++r) {
        SplitMix64 gen = derive_stream(seed, {kStreamBootstrap, static_cast<uint64_t>(r)});
        double acc = 0.0;
        for (size_t i = 0; i < t; ++i) {
            acc += sq[gen.next_below(t)];
        }
        double rm = std::sqrt(acc / static_cast<double>(t));
        rms[static_cast<size_t>(r)] = rm;
        sum += rm;
        lo = std::min(lo, rm);
        hi = std::max(hi, rm);
    }
    if (lo == hi) {
        return BootstrapResult{0.0, resamples, seed};
    }
    // Two-pass variance; the textbook E[x^2] - E[x]^2 form cancels badly when
    // the spread is tiny relative to the mean.
    double mean = sum / resamples;
    double var = 0.0;
    for (double rm : rms) {
        double d = rm - mean;
        var += d * d;
    }
    var /= static_cast<double>(resamples);
    return BootstrapResult{std::sqrt(var), resamples, seed};
}

}  // namespace switchsim
