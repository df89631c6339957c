// Copyright 2026 The lht Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Finite-n separable testing of phi^{(x)n} against the composite family of
// sign-flipped maximally coherent vectors. Everything is driven by the
// threshold sets S_n(R) = {J : log p^n_J >= nR} and three power sums over
// them.

#pragma once

#include <optional>

#include "lht/common.hpp"
#include "lht/spectrum.hpp"
#include "lht/typelattice.hpp"

namespace lht {

/// Power sums over S_n(R), all in the log domain.
struct PowerSums {
    double R;           // per-copy threshold (snapped to the level grid)
    double log_p0;      // log |S_n(R)|
    double log_p_half;  // log sum sqrt(p^n_J)
    double log_p1;      // log sum p^n_J
};

/// The distinct per-sequence masses of p^n in decreasing order, with prefix
/// power sums. S_n(R) is constant between consecutive levels, so these
/// exhaust every threshold set.
class ThresholdGrid {
   public:
    ThresholdGrid(std::span<const double> p, int n, double budget = kDefaultTypeBudget) : n_(n), d_(p.size()) {
        check_distribution(p, false, "ThresholdGrid");
        require(!is_uniform(p), "ThresholdGrid: p must be non-uniform");
        const auto log_p = log_vector(p);
        const auto table = enumerate_types(static_cast<int>(p.size()), n, budget);
        std::vector<std::pair<double, double>> t;  // (per-sequence log-mass, log-cardinality)
        t.reserve(table.size());
        for (std::size_t i = 0; i < table.size(); ++i)
            t.emplace_back(table.per_sequence_log_mass(i, log_p), table[i].log_cardinality);
        std::sort(t.begin(), t.end(), [](auto& a, auto& b) { return a.first > b.first; });
        LogSum s0, sh, s1;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto [lm, lc] = t[i];
            s0.add(lc);
            sh.add(lc + 0.5 * lm);
            s1.add(lc + lm);
            bool last_of_level = i + 1 == t.size() || !same_level(t[i + 1].first, lm);
            if (last_of_level) {
                levels_.push_back(lm);
                sums_.push_back({lm / n, s0.value(), sh.value(), std::min(s1.value(), 0.0)});
            }
        }
    }

    int n() const { return n_; }
    std::size_t alphabet_size() const { return d_; }
    std::size_t size() const { return levels_.size(); }

    /// Per-sequence log-mass of level k (levels decrease with k).
    double level(std::size_t k) const { return levels_[k]; }
    /// Per-copy threshold of level k.
    double threshold(std::size_t k) const { return levels_[k] / n_; }
    const PowerSums& sums(std::size_t k) const { return sums_[k]; }

    /// Index of the last level with log-mass >= nR, i.e. S_n(R) = levels 0..k.
    /// nullopt when S_n(R) is empty.
    std::optional<std::size_t> index_of(double R) const {
        const double thr = n_ * R;
        const double tol = 1e-10 * (1 + std::abs(thr));
        std::optional<std::size_t> k;
        for (std::size_t i = 0; i < levels_.size(); ++i)
            if (levels_[i] >= thr - tol) k = i;
        return k;
    }

   private:
    static bool same_level(double a, double b) { return std::abs(a - b) <= 1e-10 * (1 + std::abs(a)); }

    int n_;
    std::size_t d_;
    std::vector<double> levels_;
    std::vector<PowerSums> sums_;
};

inline PowerSums power_sums(std::span<const double> p, int n, double R) {
    ThresholdGrid g(p, n);
    auto k = g.index_of(R);
    if (!k) return {R, kNegInf, kNegInf, kNegInf};
    return g.sums(*k);
}

namespace detail {

// x = P_{1/2}(R')^2 / (P_0(R) P_1(R')), y = P_{1/2}(R)^2 / (P_0(R) P_1(R)).
inline std::pair<double, double> overlap_ratios(const PowerSums& s, const PowerSums& sp) {
    double x = std::exp(2 * sp.log_p_half - s.log_p0 - sp.log_p1);
    double y = std::exp(2 * s.log_p_half - s.log_p0 - s.log_p1);
    return {std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)};
}

}  // namespace detail

/// a_n(R, R') for S_n(R) containing S_n(R').
inline double a_overlap(const PowerSums& s, const PowerSums& sp) {
    require(sp.log_p0 > kNegInf, "a_overlap: S_n(R') is empty");
    require(s.log_p0 >= sp.log_p0, "a_overlap: need R <= R'");
    const auto [x, y] = detail::overlap_ratios(s, sp);
    double c = std::sqrt(x * y) + std::sqrt((1 - x) * (1 - y));
    return std::clamp(1 - std::exp(s.log_p1) * c * c, 0.0, 1.0);
}

inline double a_overlap(std::span<const double> p, int n, double R, double R_prime) {
    require(R <= R_prime, "a_overlap: need R <= R'");
    ThresholdGrid g(p, n);
    auto k = g.index_of(R);
    auto kp = g.index_of(R_prime);
    require(kp.has_value(), "a_overlap: S_n(R') is empty");
    return a_overlap(g.sums(*k), g.sums(*kp));
}

/// Whether the coefficient vector built from S_n(R) stays entrywise
/// non-negative: sqrt(min_{J in S_n(R)} p^n_J) >= P_{1/2}/P_0 (1 - sqrt((A-1)/(B-1)))
/// with A = P_1 P_0 / P_{1/2}^2 and B = P_0 P_1(R') / P_{1/2}(R')^2.
/// Returns log(lhs) - log(rhs); non-negative means satisfied.
inline double separable_condition_margin(const ThresholdGrid& g, std::size_t k, std::size_t kp) {
    const auto& s = g.sums(k);
    const auto& sp = g.sums(kp);
    const auto [x, y] = detail::overlap_ratios(s, sp);
    double ratio;  // (A-1)/(B-1) = x (1-y) / (y (1-x))
    if (x >= 1) {
        ratio = 1;  // S_n(R) = S_n(R') with flat masses: the correction vanishes
    } else if (y >= 1) {
        ratio = 0;
    } else {
        ratio = x * (1 - y) / (y * (1 - x));
    }
    const double root = std::sqrt(ratio);
    if (root >= 1) return kInf;
    const double log_lhs = 0.5 * g.level(k);
    const double log_rhs = s.log_p_half - s.log_p0 + std::log1p(-root);
    return log_lhs - log_rhs;
}

struct ThresholdSearch {
    std::optional<double> R_min;    // smallest threshold meeting the condition
    std::optional<double> R_tilde;  // largest threshold violating it
    std::optional<std::size_t> k_min;
    std::optional<std::size_t> k_tilde;
    bool monotone;  // condition switches from false to true exactly once as R grows
};

/// Scans every level at or below R'. Thresholds are ordered by increasing R,
/// i.e. decreasing level index.
inline ThresholdSearch threshold_search(const ThresholdGrid& g, std::size_t kp) {
    ThresholdSearch out{std::nullopt, std::nullopt, std::nullopt, std::nullopt, true};
    std::vector<bool> seq;
    // Level index k >= kp means S_n(R) contains S_n(R'); walk R upwards.
    for (std::size_t i = g.size(); i-- > kp;) {
        bool ok = separable_condition_margin(g, i, kp) >= -1e-12;
        if (ok && !out.k_min) out.k_min = i;
        if (!ok) out.k_tilde = i;
        seq.push_back(ok);
    }
    out.monotone = std::is_partitioned(seq.begin(), seq.end(), [](bool b) { return !b; });
    if (out.k_min) out.R_min = g.threshold(*out.k_min);
    if (out.k_tilde) out.R_tilde = g.threshold(*out.k_tilde);
    // Re-verify by substitution.
    if (out.k_min && separable_condition_margin(g, *out.k_min, kp) < -1e-12)
        throw std::logic_error("threshold_search: R_min fails its condition");
    if (out.k_tilde && separable_condition_margin(g, *out.k_tilde, kp) >= -1e-12)
        throw std::logic_error("threshold_search: R_tilde satisfies the condition");
    return out;
}

inline ThresholdSearch threshold_search(std::span<const double> p, int n, double R_prime) {
    ThresholdGrid g(p, n);
    auto kp = g.index_of(R_prime);
    require(kp.has_value(), "threshold_search: S_n(R') is empty");
    return threshold_search(g, *kp);
}

struct SandwichResult {
    double beta_composite;  // P_{1/2}(R')^2 / (d^n P_1(R'))
    double log_beta;        // log of the bipartite type-2 error d_max^{-n} beta_composite
    double beta_value;      // exp(log_beta)
    double alpha_lower;     // a_n(R~, R'), or 0 when no threshold violates the condition
    double alpha_upper;     // a_n(R_min, R')
    double R_prime;
    std::optional<double> R_min;
    std::optional<double> R_tilde;
    bool monotone;
};

inline SandwichResult sep_sandwich(const ThresholdGrid& g, std::size_t kp, int dim_max) {
    const int n = g.n();
    const double d = static_cast<double>(g.alphabet_size());
    const auto& sp = g.sums(kp);
    const double log_bc = 2 * sp.log_p_half - n * std::log(d) - sp.log_p1;
    const double log_beta = log_bc - n * std::log(static_cast<double>(dim_max));
    const auto ts = threshold_search(g, kp);
    SandwichResult out{};
    out.beta_composite = std::exp(log_bc);
    out.log_beta = log_beta;
    out.beta_value = std::exp(log_beta);
    out.R_prime = g.threshold(kp);
    out.R_min = ts.R_min;
    out.R_tilde = ts.R_tilde;
    out.monotone = ts.monotone;
    out.alpha_upper = ts.k_min ? a_overlap(g.sums(*ts.k_min), sp) : 1.0;
    out.alpha_lower = ts.k_tilde ? a_overlap(g.sums(*ts.k_tilde), sp) : 0.0;
    return out;
}

/// Sandwich for the bipartite problem, with p the Schmidt coefficients.
inline SandwichResult sep_sandwich(const SchmidtSpectrum& spec, int n, double R_prime) {
    require(!spec.uniform(), "sep_sandwich: spectrum must be non-uniform");
    ThresholdGrid g(spec.lambdas(), n);
    auto kp = g.index_of(R_prime);
    require(kp.has_value(), "sep_sandwich: S_n(R') is empty");
    return sep_sandwich(g, *kp, spec.dim_max());
}

struct PhiOverlaps {
    double a;  // 1 - |<phi_n(R)|phi^{(x)n}>|^2
    double b;  // |<phi_n(R)|phi_0^n>|^2
};

inline PhiOverlaps phi_vector_overlaps(std::span<const double> p, int n, double R) {
    const auto s = power_sums(p, n, R);
    require(s.log_p0 > kNegInf, "phi_vector_overlaps: S_n(R) is empty");
    const double d = static_cast<double>(p.size());
    return {std::clamp(-std::expm1(s.log_p1), 0.0, 1.0),
            std::exp(2 * s.log_p_half - n * std::log(d) - s.log_p1)};
}

}  // namespace lht
