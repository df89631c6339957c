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

// Method of types: enumeration of compositions, exact tails and exact
// Neyman-Pearson trade-offs for i.i.d. sources.

#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "lht/common.hpp"
#include "lht/spectrum.hpp"

namespace lht {

inline constexpr double kDefaultTypeBudget = 1e7;

/// Number of compositions of n into d parts, C(n+d-1, d-1), as a double.
inline double count_types(int d, int n) {
    return std::exp(std::lgamma(n + d) - std::lgamma(d) - std::lgamma(n + 1.0));
}

/// Exact multinomial coefficient n! / prod(c_i!), or nullopt on uint64 overflow.
inline std::optional<std::uint64_t> multinomial(std::span<const int> counts) {
    unsigned __int128 acc = 1;
    int total = 0;
    for (int c : counts) {
        // Multiply by C(total + c, c) one factor at a time; each partial
        // product is itself a binomial coefficient, so the division is exact.
        for (int i = 1; i <= c; ++i) {
            acc = acc * static_cast<unsigned __int128>(total + i) / static_cast<unsigned __int128>(i);
            if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
        }
        total += c;
    }
    return static_cast<std::uint64_t>(acc);
}

inline double log_multinomial(std::span<const int> counts) {
    int n = 0;
    double s = 0;
    for (int c : counts) {
        n += c;
        s -= std::lgamma(c + 1.0);
    }
    return s + std::lgamma(n + 1.0);
}

/// Per-letter logs, -inf for zero entries.
inline std::vector<double> log_vector(std::span<const double> p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] > 0 ? std::log(p[i]) : kNegInf;
    return out;
}

/// sum_i c_i * log_p[i] with the convention 0 * (-inf) = 0.
inline double dot_counts(std::span<const int> counts, std::span<const double> log_p) {
    double s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        if (log_p[i] == kNegInf) return kNegInf;
        s += counts[i] * log_p[i];
    }
    return s;
}

struct TypeClass {
    std::vector<int> counts;
    double log_cardinality;
};

/// All types of length-n sequences over d letters, in lexicographic order of
/// their count vectors.
class TypeTable {
   public:
    TypeTable(int d, int n, std::vector<TypeClass> entries) : d_(d), n_(n), entries_(std::move(entries)) {}

    int d() const { return d_; }
    int n() const { return n_; }
    std::size_t size() const { return entries_.size(); }
    const TypeClass& operator[](std::size_t i) const { return entries_[i]; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    /// log p^n(x) for any x of type i.
    double per_sequence_log_mass(std::size_t i, std::span<const double> log_p) const {
        return dot_counts(entries_[i].counts, log_p);
    }

    /// log p^n(T_n(Q_i)).
    double class_log_mass(std::size_t i, std::span<const double> log_p) const {
        return entries_[i].log_cardinality + per_sequence_log_mass(i, log_p);
    }

    /// Exact |T_n(Q_i)|; throws BudgetExceeded when it does not fit in 64 bits.
    std::uint64_t cardinality(std::size_t i) const {
        auto c = multinomial(entries_[i].counts);
        if (!c) throw BudgetExceeded("type class cardinality exceeds 64 bits");
        return *c;
    }

    /// Index of a count vector, or size() when absent.
    std::size_t index_of(std::span<const int> counts) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), counts, [](const TypeClass& t, auto c) {
            return std::lexicographical_compare(t.counts.begin(), t.counts.end(), c.begin(), c.end());
        });
        if (it == entries_.end() || !std::equal(it->counts.begin(), it->counts.end(), counts.begin(), counts.end()))
            return entries_.size();
        return static_cast<std::size_t>(it - entries_.begin());
    }

   private:
    int d_;
    int n_;
    std::vector<TypeClass> entries_;
};

inline TypeTable enumerate_types(int d, int n, double budget = kDefaultTypeBudget) {
    require(d >= 1, "enumerate_types: d must be >= 1");
    require(n >= 1, "enumerate_types: n must be >= 1");
    if (count_types(d, n) > budget * (1 + 1e-9))
        throw BudgetExceeded("enumerate_types: C(n+d-1, d-1) exceeds the budget");
    std::vector<TypeClass> out;
    std::vector<int> c(d, 0);
    // The first d-1 coordinates are free, the last takes the remainder.
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == d - 1) {
            c[pos] = left;
            out.push_back({c, log_multinomial(c)});
            return;
        }
        for (int k = 0; k <= left; ++k) {
            c[pos] = k;
            rec(pos + 1, left - k);
        }
    };
    rec(0, n);
    return TypeTable(d, n, std::move(out));
}

enum class TailSide { kGreaterEq, kLessEq };

/// Exact log P(sum_i X_i >= nR) (or <= nR) for X_i i.i.d. with law p on
/// the values x. Threshold comparisons carry a relative slack of 1e-9 so that
/// sums landing on nR count as inside.
inline double exact_tail(std::span<const double> p, std::span<const double> x, int n, double R,
                         TailSide side = TailSide::kGreaterEq, double budget = kDefaultTypeBudget) {
    require(p.size() == x.size(), "exact_tail: p and x must have the same length");
    check_distribution(p, true, "exact_tail");
    const int d = static_cast<int>(p.size());
    const auto log_p = log_vector(p);
    const auto table = enumerate_types(d, n, budget);
    const double thr = n * R;
    const double tol = 1e-9 * (1 + std::abs(thr));
    LogSum acc;
    for (std::size_t i = 0; i < table.size(); ++i) {
        double s = 0;
        for (int j = 0; j < d; ++j) s += table[i].counts[j] * x[j];
        bool in = side == TailSide::kGreaterEq ? s >= thr - tol : s <= thr + tol;
        if (in) acc.add(table.class_log_mass(i, log_p));
    }
    return std::min(acc.value(), 0.0);
}

namespace detail {

/// Neyman-Pearson on per-letter log-masses; q may be sub-normalized (the
/// missing mass sits on letters where p vanishes and is rejected for free).
/// Returns log beta.
inline double np_log_beta(std::span<const double> log_p, std::span<const double> log_q, int n, double alpha,
                          double budget) {
    require(alpha >= 0 && alpha <= 1, "neyman_pearson_exact: alpha must lie in [0,1]");
    if (alpha >= 1) return kNegInf;
    const auto table = enumerate_types(static_cast<int>(log_p.size()), n, budget);
    struct Cls {
        double lp, lq, ratio;
        std::size_t idx;
    };
    std::vector<Cls> cls;
    cls.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        double sp = table.per_sequence_log_mass(i, log_p);
        double sq = table.per_sequence_log_mass(i, log_q);
        if (sq == kNegInf) continue;  // contributes nothing to beta whatever we do
        double lc = table[i].log_cardinality;
        double ratio = sp == kNegInf ? kInf : sq - sp;
        cls.push_back({sp == kNegInf ? kNegInf : lc + sp, lc + sq, ratio, i});
    }
    // Reject in order of decreasing q/p; ties keep lexicographic order.
    std::stable_sort(cls.begin(), cls.end(), [](const Cls& a, const Cls& b) { return a.ratio > b.ratio; });
    double used = 0;
    std::size_t k = 0;
    double keep_fraction = 1;
    for (; k < cls.size(); ++k) {
        double pm = std::exp(cls[k].lp);
        if (used + pm <= alpha) {
            used += pm;
            continue;
        }
        keep_fraction = 1 - (alpha - used) / pm;
        break;
    }
    if (k == cls.size()) return kNegInf;
    LogSum acc;
    if (keep_fraction > 0) acc.add(std::log(keep_fraction) + cls[k].lq);
    for (std::size_t j = k + 1; j < cls.size(); ++j) acc.add(cls[j].lq);
    return acc.value();
}

}  // namespace detail

/// Optimal type-2 error of a randomized test between p^n (null) and q^n,
/// subject to type-1 error <= alpha. Returned in the log domain.
inline double neyman_pearson_exact_log(std::span<const double> p_null, std::span<const double> q_alt, int n,
                                       double alpha, double budget = kDefaultTypeBudget) {
    require(p_null.size() == q_alt.size(), "neyman_pearson_exact: length mismatch");
    check_distribution(p_null, true, "neyman_pearson_exact(p)");
    check_distribution(q_alt, true, "neyman_pearson_exact(q)");
    return detail::np_log_beta(log_vector(p_null), log_vector(q_alt), n, alpha, budget);
}

inline double neyman_pearson_exact(std::span<const double> p_null, std::span<const double> q_alt, int n,
                                   double alpha, double budget = kDefaultTypeBudget) {
    return std::exp(neyman_pearson_exact_log(p_null, q_alt, n, alpha, budget));
}

/// Optimal one-way LOCC type-2 error, log domain. The dephased state puts
/// mass lambda_i on the d diagonal outcomes; the d_A d_B - d off-diagonal
/// outcomes are folded in analytically, so types run over d letters only.
inline double one_way_beta_exact_log(const SchmidtSpectrum& spec, int n, double alpha,
                                     double budget = kDefaultTypeBudget) {
    const auto log_p = log_vector(spec.lambdas());
    std::vector<double> log_q(spec.dim_min(), -spec.log_dim_product());
    return detail::np_log_beta(log_p, log_q, n, alpha, budget);
}

inline double one_way_beta_exact(const SchmidtSpectrum& spec, int n, double alpha,
                                 double budget = kDefaultTypeBudget) {
    return std::exp(one_way_beta_exact_log(spec, n, alpha, budget));
}

}  // namespace lht
