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

// Two-round LOCC protocols driven by a collection of non-negative measures
// on X^n. Measures are block-uniform: constant on index ranges of type
// classes, where the sequences of a type class are indexed in lexicographic
// order. Nothing here ever materializes a sequence.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "lht/common.hpp"
#include "lht/exponents.hpp"
#include "lht/sld.hpp"
#include "lht/spectrum.hpp"
#include "lht/typelattice.hpp"

namespace lht {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct Weight {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    Rational exact() const { return Rational(BigInt(num), BigInt(den)); }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Weight&, const Weight&) = default;
};

/// m(x) = weight for the `size` sequences of type `type` with lexicographic
/// index in [offset + i*stride, offset + i*stride + size), where i is the
/// copy index of the enclosing measure (see Measure::multiplicity).
struct MeasureBlock {
    std::vector<int> type;
    std::uint64_t offset = 0;
    std::uint64_t size = 0;
    std::uint64_t stride = 0;
    Weight weight;
    friend bool operator==(const MeasureBlock&, const MeasureBlock&) = default;
};

/// `multiplicity` measures sharing one block layout; copy i shifts every
/// block by i * stride.
struct Measure {
    std::vector<MeasureBlock> blocks;
    std::uint64_t multiplicity = 1;
    friend bool operator==(const Measure&, const Measure&) = default;
};

struct MeasureCollection {
    int n = 0;
    int d = 0;
    std::vector<Measure> measures;

    /// Number of measures counting multiplicities.
    std::uint64_t measure_count() const {
        std::uint64_t c = 0;
        for (const auto& m : measures) c += m.multiplicity;
        return c;
    }
    friend bool operator==(const MeasureCollection&, const MeasureCollection&) = default;
};

enum class Provenance { kExact, kUpperBound, kLowerBound };

inline std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::kExact: return "exact";
        case Provenance::kUpperBound: return "upper_bound";
        case Provenance::kLowerBound: return "lower_bound";
    }
    return "?";
}

struct TestOutcome {
    double alpha;
    double beta;
    double log_beta;
    Provenance provenance;
};

// ---------------------------------------------------------------------------
// Validation.

namespace detail {

inline std::uint64_t checked_span_end(const MeasureBlock& b, std::uint64_t mult) {
    unsigned __int128 end = static_cast<unsigned __int128>(b.offset) +
                            static_cast<unsigned __int128>(mult - 1) * b.stride + b.size;
    if (end > std::numeric_limits<std::uint64_t>::max()) throw std::invalid_argument("block range overflows");
    return static_cast<std::uint64_t>(end);
}

struct Segment {
    std::uint64_t lo, hi;  // [lo, hi)
    Rational load;         // m summed over the copies stacked on each point
};

/// Pointwise load segments of one block across the copies of its measure.
inline void block_segments(const MeasureBlock& b, std::uint64_t mult, std::vector<Segment>& out) {
    const Rational w = b.weight.exact();
    if (mult == 1) {
        out.push_back({b.offset, b.offset + b.size, w});
    } else if (b.stride == 0) {
        out.push_back({b.offset, b.offset + b.size, w * Rational(BigInt(mult))});
    } else if (b.stride == b.size) {
        out.push_back({b.offset, checked_span_end(b, mult), w});
    } else if (mult <= 100000) {
        for (std::uint64_t i = 0; i < mult; ++i) out.push_back({b.offset + i * b.stride, b.offset + i * b.stride + b.size, w});
    } else {
        throw std::invalid_argument("collection: unsupported stride pattern for a large multiplicity");
    }
}

}  // namespace detail

/// Per-type coverage sum_omega sum_{x in T(Q)} m_omega(x), exact.
using Coverage = std::map<std::vector<int>, Rational>;

/// Checks the block layout and the pointwise constraint sum_omega m_omega(x) <= 1
/// and returns the per-type coverage. Blocks of one type inside one measure
/// must share a stride and have disjoint base ranges.
inline Coverage validate_collection(const MeasureCollection& c) {
    require(c.n >= 1 && c.d >= 1, "collection: n and d must be positive");
    std::map<std::vector<int>, std::vector<detail::Segment>> segs;
    Coverage cov;
    for (std::size_t mi = 0; mi < c.measures.size(); ++mi) {
        const auto& m = c.measures[mi];
        require(m.multiplicity >= 1, "collection: multiplicity must be >= 1");
        require(!m.blocks.empty(), "collection: measure without blocks");
        std::map<std::vector<int>, std::vector<const MeasureBlock*>> by_type;
        for (const auto& b : m.blocks) {
            require(static_cast<int>(b.type.size()) == c.d, "collection: block type has wrong length");
            int tot = 0;
            for (int x : b.type) {
                require(x >= 0, "collection: negative count");
                tot += x;
            }
            require(tot == c.n, "collection: block type does not sum to n");
            require(b.size >= 1, "collection: block size must be >= 1");
            require(b.weight.den >= 1 && b.weight.num >= 1 && b.weight.num <= b.weight.den,
                    "collection: weight must lie in (0,1]");
            auto card = multinomial(b.type);
            if (!card) throw BudgetExceeded("collection: type class too large for exact indexing");
            require(detail::checked_span_end(b, m.multiplicity) <= *card, "collection: block exceeds its type class");
            detail::block_segments(b, m.multiplicity, segs[b.type]);
            cov[b.type] += b.weight.exact() * Rational(BigInt(b.size)) * Rational(BigInt(m.multiplicity));
            by_type[b.type].push_back(&b);
        }
        for (auto& [type, bs] : by_type) {
            if (bs.size() < 2) continue;
            std::sort(bs.begin(), bs.end(), [](auto* a, auto* b) { return a->offset < b->offset; });
            for (std::size_t i = 0; i < bs.size(); ++i) {
                require(m.multiplicity == 1 || bs[i]->stride == bs[0]->stride,
                        "collection: blocks of one type in one measure need a common stride");
                if (i > 0) require(bs[i - 1]->offset + bs[i - 1]->size <= bs[i]->offset, "collection: overlapping blocks");
            }
        }
    }
    for (auto& [type, ss] : segs) {
        std::vector<std::pair<std::uint64_t, std::pair<int, const Rational*>>> ev;
        for (const auto& s : ss) {
            ev.push_back({s.lo, {1, &s.load}});
            ev.push_back({s.hi, {0, &s.load}});  // removals sort first at equal positions
        }
        std::sort(ev.begin(), ev.end(), [](auto& a, auto& b) {
            return a.first != b.first ? a.first < b.first : a.second.first < b.second.first;
        });
        Rational load = 0;
        for (auto& [pos, e] : ev) {
            if (e.first) {
                load += *e.second;
                require(load <= 1, "collection: sum of measures exceeds 1 on some sequence");
            } else {
                load -= *e.second;
            }
        }
    }
    return cov;
}

// ---------------------------------------------------------------------------
// Exact error probabilities.

/// Exact (alpha, beta) of the protocol built from the collection.
///   beta  = sum_omega |m_omega| sum_x lambda_x m_omega(x)^2 / ((d_A d_B)^n sum_x lambda_x m_omega(x))
///   alpha = 1 - sum_omega sum_x lambda_x m_omega(x)
/// alpha is assembled from exact per-type coverage deficits, so a collection
/// covering every sequence with total weight one yields alpha = 0 exactly.
inline TestOutcome evaluate_test(const SchmidtSpectrum& spec, const MeasureCollection& coll) {
    require(coll.d == spec.dim_min(), "evaluate_test: collection alphabet differs from the Schmidt rank");
    const auto cov = validate_collection(coll);
    const auto log_l = log_vector(spec.lambdas());
    const double log_dim = coll.n * spec.log_dim_product();

    LogSum beta_acc;
    for (const auto& m : coll.measures) {
        LogSum s1, s2;
        double support = 0;
        for (const auto& b : m.blocks) {
            const double lm = dot_counts(b.type, log_l);
            const double ls = std::log(static_cast<double>(b.size));
            const double lw = std::log(b.weight.value());
            s1.add(ls + lm + lw);
            s2.add(ls + lm + 2 * lw);
            support += static_cast<double>(b.size);
        }
        require(s1.value() > kNegInf, "evaluate_test: measure with zero denominator");
        beta_acc.add(std::log(static_cast<double>(m.multiplicity)) + std::log(support) + s2.value() - s1.value() -
                     log_dim);
    }

    const auto table = enumerate_types(coll.d, coll.n);
    double alpha = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& q = table[i].counts;
        Rational deficit;
        auto card = multinomial(q);
        auto it = cov.find(q);
        if (it == cov.end()) {
            alpha += std::exp(table.class_log_mass(i, log_l));
            continue;
        }
        deficit = Rational(BigInt(*card)) - it->second;
        if (deficit == 0) continue;
        alpha += std::exp(table.per_sequence_log_mass(i, log_l)) * deficit.convert_to<double>();
    }
    const double log_beta = beta_acc.value();
    return {std::clamp(alpha, 0.0, 1.0), std::min(1.0, std::exp(log_beta)), log_beta, Provenance::kExact};
}

// ---------------------------------------------------------------------------
// Type partitions for the Hoeffding-type constructions.

struct TypeStats {
    std::vector<int> counts;
    std::uint64_t cardinality;
    double divergence;  // D(Q||P)
    double entropy;     // H(Q)
};

struct HoeffdingPartition {
    std::vector<TypeStats> rated;      // D - H < -H(P) and D <= r
    std::vector<TypeStats> primed;     // D - H >= -H(P)
    std::vector<TypeStats> uncovered;  // D - H < -H(P) and D > r
    TypeStats anchor;                  // element of `primed` closest to P
    std::size_t type_count;
};

inline std::vector<double> empirical(std::span<const int> counts, int n) {
    std::vector<double> q(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) q[i] = static_cast<double>(counts[i]) / n;
    return q;
}

/// Partition of the types of length n. With no rate the uncovered set is
/// empty (zero type-1 error).
inline HoeffdingPartition partition_types(const SchmidtSpectrum& spec, int n, std::optional<double> r) {
    require(!spec.uniform(), "partition_types: spectrum must be non-uniform");
    const auto p = spec.lambdas();
    const double hp = shannon_entropy(p);
    const auto table = enumerate_types(spec.dim_min(), n);
    HoeffdingPartition out{};
    out.type_count = table.size();
    const double tol = 1e-12;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto q = empirical(table[i].counts, n);
        TypeStats ts{table[i].counts, table.cardinality(i), kl_divergence(q, p), shannon_entropy(q)};
        const double v = ts.divergence - ts.entropy;
        if (v < -hp - tol) {
            if (!r || ts.divergence <= *r + tol)
                out.rated.push_back(ts);
            else
                out.uncovered.push_back(ts);
        } else {
            out.primed.push_back(ts);
            auto& pr = out.primed;
            if (!best || ts.divergence < pr[*best].divergence - tol) best = pr.size() - 1;
        }
    }
    if (!best) throw ConstructionError("partition_types: no type with D - H >= -H(P)");
    out.anchor = out.primed[*best];
    out.primed.erase(out.primed.begin() + static_cast<std::ptrdiff_t>(*best));
    return out;
}

namespace detail {

inline Measure indicator(const TypeStats& q) {
    Measure m;
    m.blocks.push_back({q.counts, 0, q.cardinality, 0, {1, 1}});
    return m;
}

inline MeasureCollection build_from_partition(const SchmidtSpectrum& spec, int n, const HoeffdingPartition& part,
                                              bool zero_error) {
    MeasureCollection c{n, spec.dim_min(), {}};
    const std::size_t k_rated = part.rated.size();
    if (k_rated == 0) {
        if (!zero_error) throw ConstructionError("hoeffding collection: no type satisfies D - H < -H(P), D <= r");
        // Nothing to pair with the anchor: every type gets its own indicator.
        c.measures.push_back(indicator(part.anchor));
        for (const auto& q : part.primed) c.measures.push_back(indicator(q));
        return c;
    }
    const std::uint64_t anchor_card = part.anchor.cardinality;
    if (anchor_card < k_rated)
        throw ConstructionError(std::string(zero_error ? "zero-error" : "hoeffding") +
                                " collection: anchor type class has fewer sequences (" +
                                std::to_string(anchor_card) + ") than rated types (" + std::to_string(k_rated) + ")");
    // Split T(P_n) into k_rated pieces; the larger pieces go first.
    const std::uint64_t base = anchor_card / k_rated;
    const std::uint64_t extra = anchor_card % k_rated;
    std::uint64_t anchor_off = 0;
    for (std::size_t qi = 0; qi < k_rated; ++qi) {
        const auto& q = part.rated[qi];
        const std::uint64_t s = base + (qi < extra ? 1 : 0);
        const std::uint64_t card = q.cardinality;
        const std::uint64_t k = (card + s - 1) / s;  // pieces of T(Q), each of size <= s
        const std::uint64_t small = card / k;
        const std::uint64_t big_count = card % k;
        const Weight w_anchor{1, k};
        std::uint64_t off = 0;
        if (big_count > 0) {
            Measure m;
            m.multiplicity = big_count;
            m.blocks.push_back({q.counts, off, small + 1, small + 1, {1, 1}});
            m.blocks.push_back({part.anchor.counts, anchor_off, s, 0, w_anchor});
            c.measures.push_back(std::move(m));
            off += big_count * (small + 1);
        }
        if (k - big_count > 0) {
            Measure m;
            m.multiplicity = k - big_count;
            m.blocks.push_back({q.counts, off, small, small, {1, 1}});
            m.blocks.push_back({part.anchor.counts, anchor_off, s, 0, w_anchor});
            c.measures.push_back(std::move(m));
        }
        anchor_off += s;
    }
    for (const auto& q : part.primed) c.measures.push_back(indicator(q));
    return c;
}

}  // namespace detail

/// Collection with type-1 error at most |T_n| e^{-nr}.
inline MeasureCollection build_hoeffding_collection(const SchmidtSpectrum& spec, int n, double r) {
    require(r >= 0, "build_hoeffding_collection: r must be >= 0");
    return detail::build_from_partition(spec, n, partition_types(spec, n, r), false);
}

/// Collection covering every sequence with total weight one (type-1 error 0).
inline MeasureCollection build_zero_error_collection(const SchmidtSpectrum& spec, int n) {
    return detail::build_from_partition(spec, n, partition_types(spec, n, std::nullopt), true);
}

/// |T_n| e^{-nr}.
inline double hoeffding_alpha_bound(const SchmidtSpectrum& spec, int n, double r) {
    return count_types(spec.dim_min(), n) * std::exp(-n * r);
}

/// log of 8 d |T_n|^3 (d_A d_B)^{-n} e^{-n sup_s(-2s/(1-s) r - H_{(1+s)/2})}.
inline double hoeffding_log_beta_bound(const SchmidtSpectrum& spec, int n, double r) {
    const int d = spec.dim_min();
    return std::log(8.0 * d) + 3 * std::log(count_types(d, n)) - n * spec.log_dim_product() -
           n * hoeffding_dual(spec.lambdas(), r);
}

/// log of 4 |T_n|^3 (d_A d_B)^{-n} e^{n H_{1/2}}.
inline double zero_error_log_beta_bound(const SchmidtSpectrum& spec, int n) {
    return std::log(4.0) + 3 * std::log(count_types(spec.dim_min(), n)) - n * spec.log_dim_product() +
           n * renyi_entropy(spec, 0.5);
}

// ---------------------------------------------------------------------------
// Shell construction for constant type-1 error.

struct ShellParams {
    double a;
    double b;
    double c;
    double t;
};

/// f(t) = b + min_{s>=0} [s (H_1 - H_{1+s}) - (s c + c - a) t].
inline double shell_f(std::span<const double> p, const ShellParams& prm, double t) {
    const double h1 = renyi_entropy(p, 1.0);
    auto g = [&](double s) { return s * (h1 - renyi_entropy(p, 1 + s)) - (s * prm.c + prm.c - prm.a) * t; };
    // g is convex in s; scan a long window and refine.
    const double s_max = 400;
    auto best = maximize_scan_golden([&](double s) { return -g(s); }, 0.0, s_max, 512, 1e-10);
    return prm.b - best.value;
}

/// Root t_0 of f; f(0) = b > 0 and f(t) <= b - (c - a) t.
inline double shell_t0(std::span<const double> p, const ShellParams& prm) {
    require(prm.c > prm.a && prm.a > 0 && prm.b > 0, "shell_t0: need c > a > 0 and b > 0");
    const double hi = prm.b / (prm.c - prm.a);
    return bisect([&](double t) { return shell_f(p, prm, t); }, 0.0, hi * (1 + 1e-9), 1e-12);
}

/// c = lattice span of -log lambda_i (1 for non-lattice spectra), a = c/2,
/// b = 0.1, t = t_0/2.
inline ShellParams default_shell_params(const SchmidtSpectrum& spec) {
    const auto l = spec.lambdas();
    std::vector<double> x(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) x[i] = -std::log(l[i]);
    double c = 1.0;
    if (!spec.uniform()) {
        const double span = lattice_span(l, x);
        if (span > 0) c = span;
    }
    ShellParams prm{c / 2, 0.1, c, 0};
    prm.t = shell_t0(l, prm) / 2;
    return prm;
}

inline constexpr std::uint64_t kMaxShellMeasures = 1000000;

/// Measures m_1..m_M with M = floor(e^{nb}), spreading each shell
/// R_k = {T - c(k+1) < -log P^n(x) <= T - ck}, k <= tn, over the measures in
/// N_k-sized cyclic windows. T = nH_1 + sqrt(n V) Phi^{-1}(1 - eps), so the
/// covered mass tends to 1 - eps and the type-1 error to eps.
inline MeasureCollection build_stein_collection(const SchmidtSpectrum& spec, int n, double eps, const ShellParams& prm,
                                                std::uint64_t max_measures = kMaxShellMeasures) {
    require(eps > 0 && eps < 1, "build_stein_collection: eps must lie in (0,1)");
    require(prm.c > prm.a && prm.a > 0 && prm.b > 0 && prm.t > 0, "build_stein_collection: need c > a > 0, b > 0, t > 0");
    const auto l = spec.lambdas();
    const auto log_l = log_vector(l);
    const int d = spec.dim_min();
    const double thr = n * renyi_entropy(l, 1.0) + std::sqrt(n * varentropy(l)) * gaussian_quantile(1 - eps);
    const double me = std::floor(std::exp(n * prm.b));
    if (me > static_cast<double>(max_measures)) throw BudgetExceeded("build_stein_collection: floor(e^{nb}) too many measures");
    const std::uint64_t M = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(me));
    const int K = static_cast<int>(std::floor(prm.t * n));

    const auto table = enumerate_types(d, n);
    struct Member {
        std::vector<int> counts;
        std::uint64_t card;
    };
    std::vector<std::vector<Member>> shells(K + 1);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double lm = -table.per_sequence_log_mass(i, log_l);
        const double u = (thr - lm) / prm.c;
        if (u < -1e-9) continue;  // -log P^n > T
        const double k = std::floor(u + 1e-9);
        // Membership is -log P <= T - ck, and strictly above T - c(k+1).
        if (k > K) continue;
        shells[static_cast<std::size_t>(k)].push_back({table[i].counts, table.cardinality(i)});
    }
    using U128 = unsigned __int128;
    auto shell_size = [&](int k) {
        U128 s = 0;
        for (auto& m : shells[k]) s += m.card;
        return s;
    };
    const U128 r0 = shell_size(0);
    if (r0 == 0) throw ConstructionError("build_stein_collection: shell R_0 is empty");
    const double n_base = static_cast<double>(r0) / static_cast<double>(M);

    std::vector<Measure> measures(M);
    for (int k = 0; k <= K; ++k) {
        const U128 rk = shell_size(k);
        if (rk == 0) continue;
        const U128 nk = static_cast<U128>(std::ceil(n_base * std::exp(-k * prm.a) - 1e-9));
        if (nk == 0) continue;
        if (nk > rk)
            throw ConstructionError("build_stein_collection: shell k=" + std::to_string(k) + " has fewer sequences (" +
                                    std::to_string(static_cast<double>(rk)) + ") than required (" +
                                    std::to_string(static_cast<double>(nk)) + ")");
        const U128 total = static_cast<U128>(M) * nk;
        if (total < rk)
            throw ConstructionError("build_stein_collection: shell k=" + std::to_string(k) +
                                    " cannot be covered by the available measures");
        const std::uint64_t q = static_cast<std::uint64_t>(total / rk);
        const U128 rem = total % rk;
        // Position ranges of the types inside the shell.
        std::vector<U128> starts;
        U128 acc = 0;
        for (auto& m : shells[k]) {
            starts.push_back(acc);
            acc += m.card;
        }
        // Emit the linear range [lo, hi) of shell positions into measure j.
        auto emit = [&](std::size_t j, U128 lo, U128 hi) {
            // Split at the boundary between (q+1)-fold and q-fold covered positions.
            std::vector<std::pair<U128, U128>> parts;
            if (lo < rem && hi > rem) {
                parts = {{lo, rem}, {rem, hi}};
            } else {
                parts = {{lo, hi}};
            }
            for (auto [a, b] : parts) {
                const std::uint64_t mult = a < rem ? q + 1 : q;
                for (std::size_t t = 0; t < shells[k].size(); ++t) {
                    const U128 ts = starts[t];
                    const U128 te = ts + shells[k][t].card;
                    const U128 x0 = std::max(a, ts);
                    const U128 x1 = std::min(b, te);
                    if (x0 >= x1) continue;
                    measures[j].blocks.push_back({shells[k][t].counts, static_cast<std::uint64_t>(x0 - ts),
                                                  static_cast<std::uint64_t>(x1 - x0), 0, Weight{1, mult}});
                }
            }
        };
        for (std::uint64_t j = 0; j < M; ++j) {
            const U128 lo = (static_cast<U128>(j) * nk) % rk;
            const U128 hi = lo + nk;
            if (hi <= rk) {
                emit(j, lo, hi);
            } else {
                emit(j, lo, rk);
                emit(j, 0, hi - rk);
            }
        }
    }
    MeasureCollection c{n, d, {}};
    for (auto& m : measures) {
        if (m.blocks.empty()) continue;
        // Adjacent ranges of one type with equal weight merge into one block.
        std::vector<MeasureBlock> merged;
        std::sort(m.blocks.begin(), m.blocks.end(), [](auto& x, auto& y) {
            return x.type != y.type ? x.type < y.type : x.offset < y.offset;
        });
        for (auto& b : m.blocks) {
            if (!merged.empty() && merged.back().type == b.type && merged.back().weight == b.weight &&
                merged.back().offset + merged.back().size == b.offset) {
                merged.back().size += b.size;
            } else {
                merged.push_back(b);
            }
        }
        m.blocks = std::move(merged);
        c.measures.push_back(std::move(m));
    }
    return c;
}

inline MeasureCollection build_stein_collection(const SchmidtSpectrum& spec, int n, double eps) {
    return build_stein_collection(spec, n, eps, default_shell_params(spec));
}

}  // namespace lht
