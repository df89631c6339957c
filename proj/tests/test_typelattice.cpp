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

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "lht/exponents.hpp"
#include "lht/typelattice.hpp"

namespace lht {
namespace {

using boost::multiprecision::cpp_int;

std::vector<double> random_simplex(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(0.02, 1.0);
    std::vector<double> p(d);
    double s = 0;
    for (auto& v : p) s += v = u(rng);
    for (auto& v : p) v /= s;
    return p;
}

cpp_int binom(int n, int k) {
    cpp_int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

TEST(Types, Counts) {
    EXPECT_EQ(enumerate_types(2, 10).size(), 11u);
    EXPECT_EQ(enumerate_types(3, 4).size(), 15u);
    EXPECT_EQ(count_types(3, 4), 15.0);
    EXPECT_THROW(enumerate_types(5, 200, 1e5), BudgetExceeded);
}

TEST(Types, LexicographicOrderAndLookup) {
    const auto t = enumerate_types(3, 3);
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_TRUE(t[i - 1].counts < t[i].counts);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t.index_of(t[i].counts), i);
    const std::vector<int> absent{4, 0, 0};
    EXPECT_EQ(t.index_of(absent), t.size());
}

TEST(Types, MultinomialAgainstBigIntegers) {
    for (int n : {10, 33, 64}) {
        for (int k = 0; k <= n; k += 7) {
            const std::vector<int> c{k, n - k};
            const auto m = multinomial(c);
            ASSERT_TRUE(m.has_value());
            EXPECT_EQ(cpp_int(*m), binom(n, k));
            EXPECT_NEAR(log_multinomial(c), std::log(binom(n, k).convert_to<double>()), 1e-9);
        }
    }
    const std::vector<int> huge{50, 50, 50};
    EXPECT_FALSE(multinomial(huge).has_value());
}

TEST(Types, TotalMassIsOne) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        const auto p = random_simplex(rng, 2 + k % 4);
        const int n = 3 + k;
        const auto t = enumerate_types(static_cast<int>(p.size()), n);
        const auto lp = log_vector(p);
        LogSum acc;
        for (std::size_t i = 0; i < t.size(); ++i) acc.add(t.class_log_mass(i, lp));
        EXPECT_NEAR(acc.value(), 0.0, 1e-12);
    }
}

TEST(ExactTail, BinomialExample) {
    const std::vector<double> p{0.5, 0.5}, x{0.0, 1.0};
    const double e = exact_tail(p, x, 20, 0.75);
    cpp_int num = 0;
    for (int k = 15; k <= 20; ++k) num += binom(20, k);
    EXPECT_EQ(num, 21700);
    EXPECT_NEAR(e, std::log(21700.0 / 1048576.0), 1e-12);
    EXPECT_NEAR(e, -3.8779, 1e-4);
}

TEST(ExactTail, FullMassBelowSupport) {
    const std::vector<double> p{0.3, 0.7}, x{0.0, 1.0};
    EXPECT_NEAR(exact_tail(p, x, 15, -0.1), 0.0, 1e-14);
}

TEST(ExactTail, SingleSample) {
    const std::vector<double> p{0.1, 0.9};
    const std::vector<double> x{-std::log(0.1), -std::log(0.9)};
    const double h = shannon_entropy(p);
    EXPECT_NEAR(exact_tail(p, x, 1, h), std::log(0.1), 1e-14);
}

TEST(ExactTail, ComplementSumsToOne) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 20; ++k) {
        const auto p = random_simplex(rng, 3);
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        const int n = 5 + k;
        const double R = 0.5 * u(rng);
        const double ge = std::exp(exact_tail(p, x, n, R, TailSide::kGreaterEq));
        // The complement of {S >= nR} is {S < nR}; with a continuous-valued x no
        // sum lands exactly on nR.
        const double le = std::exp(exact_tail(p, x, n, R, TailSide::kLessEq));
        EXPECT_NEAR(ge + le, 1.0, 1e-10);
    }
}

TEST(ExactTail, AgreesWithDirectBinomialSum) {
    const double q = 0.3;
    const std::vector<double> p{1 - q, q}, x{0.0, 1.0};
    for (int n : {20, 40, 64}) {
        // Exact rational oracle: sum_{k >= n/2} C(n,k) 3^k 7^{n-k} / 10^n.
        cpp_int num = 0, den = 1;
        for (int i = 0; i < n; ++i) den *= 10;
        for (int k = (n + 1) / 2; k <= n; ++k) {
            cpp_int t = binom(n, k);
            for (int i = 0; i < k; ++i) t *= 3;
            for (int i = 0; i < n - k; ++i) t *= 7;
            num += t;
        }
        const double oracle = std::log(num.convert_to<double>()) - std::log(den.convert_to<double>());
        EXPECT_NEAR(exact_tail(p, x, n, 0.5), oracle, 1e-10) << n;
    }
}

TEST(NeymanPearson, AlphaOneGivesZero) {
    const std::vector<double> p{0.5, 0.5}, q{0.5, 0.5};
    EXPECT_EQ(neyman_pearson_exact(p, q, 3, 1.0), 0.0);
}

TEST(NeymanPearson, FourOutcomeExample) {
    const std::vector<double> p{0.5, 0, 0, 0.5}, q(4, 0.25);
    EXPECT_NEAR(neyman_pearson_exact(p, q, 1, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(neyman_pearson_exact(p, q, 1, 0.5), 0.25, 1e-15);
}

// Exhaustive randomized NP at n = 1: the LP optimum is attained at a vertex
// that rejects a prefix of outcomes sorted by q/p and splits one.
double brute_np(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
    const int k = static_cast<int>(p.size());
    double best = 1;
    for (int mask = 0; mask < (1 << k); ++mask) {
        for (int split = -1; split < k; ++split) {
            if (split >= 0 && (mask >> split & 1)) continue;
            double a = 0, b = 0;
            for (int i = 0; i < k; ++i)
                if (mask >> i & 1) a += p[i];
                else if (i != split) b += q[i];
            if (a > alpha + 1e-15) continue;
            if (split >= 0 && p[split] > 0) {
                const double f = std::min(1.0, (alpha - a) / p[split]);
                b += (1 - f) * q[split];
            } else if (split >= 0) {
                continue;
            }
            best = std::min(best, b);
        }
    }
    return best;
}

TEST(NeymanPearson, MatchesBruteForceAtOneSample) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
        const auto p = random_simplex(rng, 4);
        const auto q = random_simplex(rng, 4);
        for (double a : {0.0, 0.1, 0.35, 0.8}) EXPECT_NEAR(neyman_pearson_exact(p, q, 1, a), brute_np(p, q, a), 1e-12);
    }
}

TEST(NeymanPearson, ConvexNonIncreasingInAlpha) {
    std::mt19937_64 rng(10);
    for (int k = 0; k < 10; ++k) {
        const auto p = random_simplex(rng, 3);
        const auto q = random_simplex(rng, 3);
        std::vector<double> b;
        for (int i = 0; i <= 10; ++i) b.push_back(neyman_pearson_exact(p, q, 6, 0.1 * i));
        for (int i = 1; i <= 10; ++i) EXPECT_LE(b[i], b[i - 1] + 1e-15);
        for (int i = 1; i < 10; ++i) EXPECT_GE(b[i - 1] + b[i + 1] - 2 * b[i], -1e-12);
    }
}

TEST(OneWay, UniformQubitValues) {
    const SchmidtSpectrum s({0.5, 0.5}, 2, 2);
    EXPECT_NEAR(one_way_beta_exact(s, 1, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(one_way_beta_exact(s, 1, 0.5), 0.25, 1e-15);
    EXPECT_EQ(one_way_beta_exact(s, 4, 1.0), 0.0);
}

TEST(OneWay, MatchesNeymanPearsonOnTheDephasedState) {
    const SchmidtSpectrum s({0.2, 0.3, 0.5}, 3, 4);
    const auto p = dephased_distribution(s);
    const std::vector<double> q(p.size(), 1.0 / p.size());
    for (int n : {1, 2, 3})
        for (double a : {0.0, 0.2, 0.6})
            EXPECT_NEAR(one_way_beta_exact_log(s, n, a), neyman_pearson_exact_log(p, q, n, a), 1e-10);
}

TEST(OneWay, SteinStrassenResidualBand) {
    const SchmidtSpectrum s({0.1, 0.9}, 2, 2);
    for (double eps : {0.1, 0.3, 0.5}) {
        const auto t = stein_strassen_terms(s, eps, ClassTag::kOneWay);
        double lo = kInf, hi = -kInf;
        for (int n = 20; n <= 200; n += 10) {
            const double r = one_way_beta_exact_log(s, n, eps) - t.evaluate(n);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        EXPECT_LE(hi - lo, 2.0) << eps;
    }
}

}  // namespace
}  // namespace lht
