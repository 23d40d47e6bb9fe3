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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "switchsim/errors.hpp"
#include "switchsim/switch_core.hpp"

namespace switchsim {

using cdouble = std::complex<double>;

/// Default truncation budget: an operation may lose at most this much norm.
inline constexpr double kDefaultTruncEps = 1e-7;

/// Hard ceiling on the Fock cutoff (memory guard: a matrix is cutoff^2
/// complex doubles).
inline constexpr int kMaxCutoff = 2048;

/// State vector in the truncated number basis.
struct FockState {
    std::vector<cdouble> amplitudes;
    int cutoff;
    double trunc_eps;

    double norm() const {
        double s = 0.0;
        for (const cdouble& a : amplitudes) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    static FockState vacuum(int cutoff, double trunc_eps = kDefaultTruncEps) {
        check_cutoff(cutoff);
        FockState psi{std::vector<cdouble>(static_cast<size_t>(cutoff)), cutoff, trunc_eps};
        psi.amplitudes[0] = 1.0;
        return psi;
    }

    /// Truncated coherent state |alpha>. Throws TruncationError if the
    /// truncated tail already exceeds the budget.
    static FockState coherent(cdouble alpha, int cutoff, double trunc_eps = kDefaultTruncEps) {
        check_cutoff(cutoff);
        if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
            throw std::invalid_argument("coherent: non-finite alpha");
        }
        FockState psi{std::vector<cdouble>(static_cast<size_t>(cutoff)), cutoff, trunc_eps};
        cdouble c = std::exp(-std::norm(alpha) / 2.0);
        psi.amplitudes[0] = c;
        for (int k = 1; k < cutoff; ++k) {
            c *= alpha / std::sqrt(static_cast<double>(k));
            psi.amplitudes[static_cast<size_t>(k)] = c;
        }
        double loss = 1.0 - psi.norm();
        if (loss > trunc_eps) {
            throw TruncationError("coherent state does not fit in cutoff", loss, trunc_eps);
        }
        return psi;
    }

  private:
    static void check_cutoff(int cutoff) {
        if (cutoff < 2 || cutoff > kMaxCutoff) {
            throw std::invalid_argument("cutoff must be in [2, kMaxCutoff]");
        }
    }
};

inline cdouble inner_product(const FockState& bra, const FockState& ket) {
    if (bra.cutoff != ket.cutoff) {
        throw std::invalid_argument("inner_product: cutoff mismatch");
    }
    cdouble s = 0.0;
    for (size_t i = 0; i < bra.amplitudes.size(); ++i) {
        s += std::conj(bra.amplitudes[i]) * ket.amplitudes[i];
    }
    return s;
}

/// Dense cutoff x cutoff operator, row-major.
struct ModeOperator {
    int cutoff;
    std::vector<cdouble> matrix;

    const cdouble& at(int row, int col) const {
        return matrix[static_cast<size_t>(row) * static_cast<size_t>(cutoff) +
                      static_cast<size_t>(col)];
    }

    FockState apply(const FockState& psi) const {
        if (psi.cutoff != cutoff) {
            throw std::invalid_argument("apply: cutoff mismatch");
        }
        FockState out{std::vector<cdouble>(static_cast<size_t>(cutoff)), cutoff, psi.trunc_eps};
        const size_t n = static_cast<size_t>(cutoff);
        for (size_t i = 0; i < n; ++i) {
            cdouble acc = 0.0;
            const cdouble* row = &matrix[i * n];
            for (size_t j = 0; j < n; ++j) {
                acc += row[j] * psi.amplitudes[j];
            }
            out.amplitudes[i] = acc;
        }
        return out;
    }
};

/// Elementwise-exact truncation of the displacement operator
/// D(alpha) = exp(alpha a^dag - alpha^* a).
///
/// Built column by column from the exact infinite-dimensional recurrence
///   sqrt(n+1) <m|D|n+1> = sqrt(m) <m-1|D|n> - alpha^* <m|D|n>,
/// with column 0 the truncated coherent state. Every element is a true
/// matrix element of the untruncated operator (all bounded by 1), so the
/// matrix is unitary on the low-occupation block and genuinely loses norm
/// near the cutoff boundary, which is what makes truncation detectable.
inline ModeOperator displacement_matrix_uncached(cdouble alpha, int cutoff) {
    if (cutoff < 2 || cutoff > kMaxCutoff) {
        throw std::invalid_argument("displacement_matrix: cutoff must be in [2, kMaxCutoff]");
    }
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw std::invalid_argument("displacement_matrix: non-finite alpha");
    }
    const size_t n = static_cast<size_t>(cutoff);
    ModeOperator op{cutoff, std::vector<cdouble>(n * n)};
    if (alpha == 0.0) {
        for (size_t i = 0; i < n; ++i) {
            op.matrix[i * n + i] = 1.0;
        }
        return op;
    }
    std::vector<double> sq(n);
    for (size_t i = 0; i < n; ++i) {
        sq[i] = std::sqrt(static_cast<double>(i));
    }
    // Column 0: <m|D|0> = e^{-|alpha|^2/2} alpha^m / sqrt(m!).
    std::vector<cdouble> col(n), next(n);
    cdouble c = std::exp(-std::norm(alpha) / 2.0);
    col[0] = c;
    for (size_t m = 1; m < n; ++m) {
        c *= alpha / sq[m];
        col[m] = c;
    }
    const cdouble ac = std::conj(alpha);
    for (size_t j = 0;; ++j) {
        for (size_t m = 0; m < n; ++m) {
            op.matrix[m * n + j] = col[m];
        }
        if (j + 1 == n) {
            break;
        }
        const double inv = 1.0 / std::sqrt(static_cast<double>(j + 1));
        next[0] = -ac * col[0] * inv;
        for (size_t m = 1; m < n; ++m) {
            next[m] = (sq[m] * col[m - 1] - ac * col[m]) * inv;
        }
        std::swap(col, next);
    }
    return op;
}

namespace detail {

struct DispKey {
    uint64_t re_bits;
    uint64_t im_bits;
    int cutoff;

    bool operator<(const DispKey& o) const {
        return std::tie(re_bits, im_bits, cutoff) < std::tie(o.re_bits, o.im_bits, o.cutoff);
    }
};

struct DispCache {
    std::mutex mu;
    std::map<DispKey, std::shared_ptr<const ModeOperator>> entries;

    static DispCache& instance() {
        static DispCache cache;
        return cache;
    }
};

}  // namespace detail

/// Memoized displacement_matrix. Safe for concurrent callers; the first
/// result computed for a key wins.
inline std::shared_ptr<const ModeOperator> displacement_matrix(cdouble alpha, int cutoff) {
    detail::DispKey key{std::bit_cast<uint64_t>(alpha.real()),
                        std::bit_cast<uint64_t>(alpha.imag()), cutoff};
    auto& cache = detail::DispCache::instance();
    {
        std::lock_guard<std::mutex> lock(cache.mu);
        auto it = cache.entries.find(key);
        if (it != cache.entries.end()) {
            return it->second;
        }
    }
    auto op = std::make_shared<const ModeOperator>(displacement_matrix_uncached(alpha, cutoff));
    std::lock_guard<std::mutex> lock(cache.mu);
    auto [it, inserted] = cache.entries.emplace(key, std::move(op));
    return it->second;
}

inline void clear_displacement_cache() {
    auto& cache = detail::DispCache::instance();
    std::lock_guard<std::mutex> lock(cache.mu);
    cache.entries.clear();
}

/// Chronological application order of the two displacement blocks.
enum class DisplacementOrder {
    XthenP,  // all position kicks first, then all momentum kicks
    PthenX,  // all momentum kicks first, then all position kicks
};

namespace detail {

inline cdouble x_alpha(double x) {
    return cdouble(x / std::sqrt(2.0), 0.0);
}

inline cdouble p_alpha(double p) {
    return cdouble(0.0, -p / std::sqrt(2.0));
}

inline FockState apply_block(const std::vector<double>& vals, bool is_x, FockState psi) {
    for (double v : vals) {
        auto op = displacement_matrix(is_x ? x_alpha(v) : p_alpha(v), psi.cutoff);
        psi = op->apply(psi);
    }
    return psi;
}

}  // namespace detail

/// Applies one causal branch of the switch to psi. The returned state's norm
/// deficit is the recorded truncation residual; exceeding psi's budget is an
/// error.
inline FockState apply_order(const DisplacementSequence& seq, DisplacementOrder order,
                             const FockState& psi) {
    double in_norm = psi.norm();
    FockState out = order == DisplacementOrder::XthenP
                        ? detail::apply_block(seq.p_list, false,
                                              detail::apply_block(seq.x_list, true, psi))
                        : detail::apply_block(seq.x_list, true,
                                              detail::apply_block(seq.p_list, false, psi));
    double loss = in_norm - out.norm();
    if (loss > psi.trunc_eps) {
        throw TruncationError("apply_order: truncation budget exceeded", loss, psi.trunc_eps);
    }
    return out;
}

/// Normalized overlap <XthenP branch | PthenX branch>. Its argument is the
/// geometric phase +(sum x_j)(sum p_k) under this library's sign convention.
inline cdouble branch_overlap(const DisplacementSequence& seq, const FockState& psi) {
    FockState a = apply_order(seq, DisplacementOrder::PthenX, psi);
    FockState b = apply_order(seq, DisplacementOrder::XthenP, psi);
    double na2 = inner_product(a, a).real();
    double nb2 = inner_product(b, b).real();
    return inner_product(b, a) / std::sqrt(na2 * nb2);
}

/// Brute-force fringe probabilities: the control is projected on |+->, giving
/// unnormalized weights (|A|^2 + |B|^2 +- 2 Re<B|A>)/4, which are then
/// renormalized to sum to 1.
inline OutcomeProbabilities oracle_probabilities(const DisplacementSequence& seq,
                                                 const FockState& psi) {
    FockState a = apply_order(seq, DisplacementOrder::PthenX, psi);
    FockState b = apply_order(seq, DisplacementOrder::XthenP, psi);
    double na2 = inner_product(a, a).real();
    double nb2 = inner_product(b, b).real();
    double re = inner_product(b, a).real();
    double w_plus = (na2 + nb2 + 2.0 * re) / 4.0;
    double w_minus = (na2 + nb2 - 2.0 * re) / 4.0;
    return OutcomeProbabilities::from_p_plus(w_plus / (w_plus + w_minus));
}

/// Basis size comfortably holding every intermediate state of the branch
/// evolutions: Poisson mean lambda of the worst-case final coherent
/// amplitude plus an 8 sqrt(lambda) + 24 guard band, rounded up to a multiple
/// of 16 and floored at `floor_cutoff`.
inline int recommended_cutoff(const DisplacementSequence& seq, double input_alpha_mag = 0.0,
                              int floor_cutoff = 64) {
    double sx = 0.0, sp = 0.0;
    for (double v : seq.x_list) {
        sx += std::abs(v);
    }
    for (double v : seq.p_list) {
        sp += std::abs(v);
    }
    double amp = std::abs(input_alpha_mag) + std::sqrt(sx * sx + sp * sp) / std::sqrt(2.0);
    double lambda = amp * amp;
    double want = std::ceil(lambda + 8.0 * std::sqrt(lambda) + 24.0);
    auto cutoff = static_cast<int>(want);
    cutoff = ((cutoff + 15) / 16) * 16;
    if (cutoff < floor_cutoff) {
        cutoff = floor_cutoff;
    }
    if (cutoff > kMaxCutoff) {
        throw std::invalid_argument("recommended_cutoff: displacements too large for the oracle");
    }
    return cutoff;
}

}  // namespace switchsim
