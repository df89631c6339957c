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

#include <random>

#include "lht/dense_oracle.hpp"
#include "lht/exponents.hpp"
#include "lht/io.hpp"
#include "lht/protocol.hpp"

namespace lht {
namespace {

const SchmidtSpectrum kFig1({0.1, 0.9}, 2, 2);

MeasureBlock block(std::vector<int> type, std::uint64_t offset, std::uint64_t size, Weight w = {}) {
    return {std::move(type), offset, size, 0, w};
}

MeasureCollection single(int n, int d, std::vector<MeasureBlock> blocks) {
    MeasureCollection c{n, d, {}};
    c.measures.push_back({std::move(blocks), 1});
    return c;
}

TEST(Evaluate, AllOnesMeasure) {
    const auto c = single(1, 2, {block({1, 0}, 0, 1), block({0, 1}, 0, 1)});
    const auto o = evaluate_test(kFig1, c);
    EXPECT_EQ(o.alpha, 0.0);
    EXPECT_NEAR(o.beta, 0.5, 1e-15);
    EXPECT_EQ(o.provenance, Provenance::kExact);
}

TEST(Evaluate, IndicatorOfTheSmallCoefficient) {
    // Letters follow the sorted spectrum: letter 1 carries 0.1.
    const auto c = single(1, 2, {block({0, 1}, 0, 1)});
    const auto o = evaluate_test(kFig1, c);
    EXPECT_NEAR(o.alpha, 0.9, 1e-15);
    EXPECT_NEAR(o.beta, 0.25, 1e-15);
}

TEST(Evaluate, MultiplicityMatchesExpandedCopies) {
    // Type (1,1) at n = 2 has two sequences; one measure per sequence.
    MeasureCollection packed{2, 2, {}};
    packed.measures.push_back({{{{1, 1}, 0, 1, 1, {1, 2}}}, 2});
    MeasureCollection expanded{2, 2, {}};
    expanded.measures.push_back({{block({1, 1}, 0, 1, {1, 2})}, 1});
    expanded.measures.push_back({{block({1, 1}, 1, 1, {1, 2})}, 1});
    const auto a = evaluate_test(kFig1, packed), b = evaluate_test(kFig1, expanded);
    EXPECT_NEAR(a.alpha, b.alpha, 1e-15);
    EXPECT_NEAR(a.log_beta, b.log_beta, 1e-14);
}

TEST(Validate, RejectsInfeasibleCollections) {
    // Two full-weight measures on the same sequence.
    MeasureCollection c{1, 2, {}};
    c.measures.push_back({{block({1, 0}, 0, 1)}, 1});
    c.measures.push_back({{block({1, 0}, 0, 1)}, 1});
    EXPECT_THROW(validate_collection(c), std::invalid_argument);
    // Half weights stack to exactly one: allowed.
    c.measures[0].blocks[0].weight = {1, 2};
    c.measures[1].blocks[0].weight = {1, 2};
    EXPECT_NO_THROW(validate_collection(c));
    // Block past the end of its type class.
    EXPECT_THROW(validate_collection(single(2, 2, {block({1, 1}, 1, 2)})), std::invalid_argument);
    // Wrong type length or sum.
    EXPECT_THROW(validate_collection(single(2, 2, {block({1, 0}, 0, 1)})), std::invalid_argument);
    // Overlapping blocks inside one measure.
    EXPECT_THROW(validate_collection(single(2, 2, {block({1, 1}, 0, 2), block({1, 1}, 1, 1)})), std::invalid_argument);
    // Weight outside (0,1].
    EXPECT_THROW(validate_collection(single(1, 2, {block({1, 0}, 0, 1, {3, 2})})), std::invalid_argument);
}

TEST(Validate, CoverageIsExact) {
    const auto cov = validate_collection(single(2, 2, {block({1, 1}, 0, 2, {1, 3}), block({2, 0}, 0, 1)}));
    EXPECT_EQ(cov.at({1, 1}), Rational(2, 3));
    EXPECT_EQ(cov.at({2, 0}), Rational(1));
}

// Random feasible collection: each type class is cut into disjoint segments,
// each handed to a random measure with a random weight 1/k.
MeasureCollection random_collection(std::mt19937_64& rng, int d, int n) {
    std::uniform_int_distribution<int> nm(1, 4), wk(1, 3), coin(0, 3);
    const int measures = nm(rng);
    MeasureCollection c{n, d, std::vector<Measure>(measures)};
    const auto table = enumerate_types(d, n);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::uint64_t card = table.cardinality(i);
        std::uint64_t pos = 0;
        while (pos < card) {
            std::uniform_int_distribution<std::uint64_t> len(1, card - pos);
            const std::uint64_t sz = len(rng);
            if (coin(rng) > 0) {
                std::uniform_int_distribution<int> which(0, measures - 1);
                auto& m = c.measures[which(rng)];
                // Keep blocks of one type inside one measure disjoint by construction.
                m.blocks.push_back(block(table[i].counts, pos, sz, {1, static_cast<std::uint64_t>(wk(rng))}));
            }
            pos += sz;
        }
    }
    std::erase_if(c.measures, [](const Measure& m) { return m.blocks.empty(); });
    if (c.measures.empty()) c.measures.push_back({{block(table[0].counts, 0, 1)}, 1});
    return c;
}

std::vector<double> random_simplex(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(d);
    double s = 0;
    for (auto& v : p) s += v = u(rng);
    for (auto& v : p) v /= s;
    return p;
}

TEST(DenseOracle, HandExamples) {
    const auto all = dense_oracle_evaluate(kFig1, single(1, 2, {block({1, 0}, 0, 1), block({0, 1}, 0, 1)}));
    EXPECT_NEAR(all.alpha, 0.0, 1e-12);
    EXPECT_NEAR(all.beta, 0.5, 1e-12);
    const auto ind = dense_oracle_evaluate(kFig1, single(1, 2, {block({0, 1}, 0, 1)}));
    EXPECT_NEAR(ind.alpha, 0.9, 1e-12);
    EXPECT_NEAR(ind.beta, 0.25, 1e-12);
}

TEST(DenseOracle, AgreesWithClosedFormOnRandomInstances) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 30; ++k) {
        const int d = 2 + k % 2, n = 1 + (k / 2) % 2;
        const int db = d + (k % 5 == 0 && d * (d + 1) <= 9 ? 1 : 0);
        const SchmidtSpectrum s(random_simplex(rng, d), d, db);
        const auto c = random_collection(rng, d, n);
        const auto fast = evaluate_test(s, c);
        const auto rep = dense_oracle_report(s, c);
        EXPECT_NEAR(fast.alpha, rep.outcome.alpha, 1e-12) << k;
        EXPECT_NEAR(fast.beta, rep.outcome.beta, 1e-12) << k;
        EXPECT_LE(rep.completeness_error, 1e-12) << k;
        EXPECT_GE(rep.min_complement_eig, -1e-12) << k;
        EXPECT_GE(rep.accept_min_eig, -1e-12) << k;
        EXPECT_LE(rep.accept_max_eig, 1 + 1e-12) << k;
    }
}

TEST(DenseOracle, AgreesOnTheConstructions) {
    const SchmidtSpectrum s3({0.2, 0.3, 0.5}, 3, 3);
    for (const auto* s : {&kFig1, &s3}) {
        for (int n : {1, 2}) {
            const auto z = build_zero_error_collection(*s, n);
            const auto a = evaluate_test(*s, z), b = dense_oracle_evaluate(*s, z);
            EXPECT_EQ(a.alpha, 0.0);
            EXPECT_NEAR(a.alpha, b.alpha, 1e-12);
            EXPECT_NEAR(a.beta, b.beta, 1e-12);
        }
    }
}

TEST(DenseOracle, RejectsLargeDimensions) {
    const SchmidtSpectrum s({0.1, 0.2, 0.3, 0.4}, 4, 4);
    EXPECT_THROW(dense_oracle_evaluate(s, single(2, 4, {block({2, 0, 0, 0}, 0, 1)})), BudgetExceeded);
}

TEST(Hoeffding, AlphaExampleAtTen) {
    const auto c = build_hoeffding_collection(kFig1, 10, 0.3);
    const auto o = evaluate_test(kFig1, c);
    EXPECT_NEAR(hoeffding_alpha_bound(kFig1, 10, 0.3), 11 * std::exp(-3.0), 1e-12);
    EXPECT_NEAR(hoeffding_alpha_bound(kFig1, 10, 0.3), 0.5477, 1e-4);
    EXPECT_LE(o.alpha, 0.5477);
    EXPECT_LE(o.log_beta, hoeffding_log_beta_bound(kFig1, 10, 0.3));
}

TEST(Hoeffding, BoundsAcrossBlockLengths) {
    for (double r : {0.05, 0.1, 0.2}) {
        for (int n = 10; n <= 40; n += 3) {
            const auto c = build_hoeffding_collection(kFig1, n, r);
            const auto o = evaluate_test(kFig1, c);
            EXPECT_LE(o.alpha, hoeffding_alpha_bound(kFig1, n, r)) << n << " " << r;
            EXPECT_LE(o.log_beta, hoeffding_log_beta_bound(kFig1, n, r)) << n << " " << r;
        }
    }
}

TEST(Hoeffding, SmallBlockLengthsReportInfeasibility) {
    // The anchor class holds a single sequence while several rated types need pieces.
    EXPECT_THROW(build_hoeffding_collection(kFig1, 8, 0.1), ConstructionError);
}

TEST(Hoeffding, UniformRejected) {
    const SchmidtSpectrum u({0.5, 0.5}, 2, 2);
    EXPECT_THROW(build_hoeffding_collection(u, 10, 0.1), std::invalid_argument);
    EXPECT_THROW(build_zero_error_collection(u, 10), std::invalid_argument);
}

TEST(Hoeffding, CannotBeatTheTwoWayExponent) {
    for (double r : {0.05, 0.1, 0.2}) {
        for (int n = 10; n <= 40; n += 10) {
            const auto o = evaluate_test(kFig1, build_hoeffding_collection(kFig1, n, r));
            const double slack = (3 * std::log(n + 1.0) + std::log(16.0)) / n;
            EXPECT_LE(-o.log_beta / n, hoeffding_two_way(kFig1, r) + slack) << n;
        }
    }
}

TEST(ZeroError, AlphaVanishesAndBetaBounded) {
    EXPECT_NEAR(zero_error_log_beta_bound(kFig1, 10),
                std::log(4.0 * 11 * 11 * 11) - 10 * std::log(4.0) + 10 * renyi_entropy(kFig1, 0.5), 1e-12);
    for (int n : {1, 2, 3, 4, 10, 20, 30, 40}) {
        const auto c = build_zero_error_collection(kFig1, n);
        const auto o = evaluate_test(kFig1, c);
        EXPECT_EQ(o.alpha, 0.0) << n;
        EXPECT_LE(o.log_beta, zero_error_log_beta_bound(kFig1, n)) << n;
    }
}

TEST(ZeroError, SingleCopyCoversBothTypes) {
    const auto c = build_zero_error_collection(kFig1, 1);
    const auto cov = validate_collection(c);
    EXPECT_EQ(cov.size(), 2u);
    EXPECT_TRUE(std::isfinite(evaluate_test(kFig1, c).log_beta));
}

TEST(Constructions, CoverageNeverExceedsClassSize) {
    for (int n : {10, 20, 30}) {
        for (const auto& c : {build_hoeffding_collection(kFig1, n, 0.1), build_zero_error_collection(kFig1, n),
                              build_stein_collection(kFig1, n, 0.3)}) {
            for (const auto& [type, load] : validate_collection(c)) {
                EXPECT_LE(load, Rational(BigInt(*multinomial(type))));
            }
        }
    }
}

TEST(Json, RoundTrip) {
    const auto c = build_hoeffding_collection(kFig1, 12, 0.1);
    const auto j = to_json(c);
    EXPECT_EQ(j.at("version"), "v1");
    const auto back = collection_from_json(json::parse(j.dump()));
    EXPECT_EQ(back, c);
    auto bad = j;
    bad["version"] = "v0";
    EXPECT_THROW(collection_from_json(bad), std::invalid_argument);
}

TEST(Stein, ShellParameters) {
    const auto prm = default_shell_params(kFig1);
    EXPECT_NEAR(prm.c, std::log(9.0), 1e-9);
    EXPECT_NEAR(prm.a, prm.c / 2, 1e-15);
    EXPECT_NEAR(prm.b, 0.1, 1e-15);
    const double t0 = shell_t0(kFig1.lambdas(), prm);
    EXPECT_NEAR(prm.t, t0 / 2, 1e-12);
    EXPECT_NEAR(shell_f(kFig1.lambdas(), prm, t0), 0.0, 1e-9);
    EXPECT_GT(shell_f(kFig1.lambdas(), prm, t0 / 2), 0.0);
}

TEST(Stein, CoveredSequencesCarryUnitWeight) {
    const auto c = build_stein_collection(kFig1, 20, 0.3);
    for (const auto& [type, load] : validate_collection(c)) {
        const Rational card(BigInt(*multinomial(type)));
        // Shells are unions of whole type classes, each covered with total weight one.
        EXPECT_EQ(load, card) << type[0];
    }
    EXPECT_GT(c.measure_count(), 1u);
}

TEST(Stein, ReportsTheViolatingShell) {
    const auto d = default_shell_params(kFig1);
    try {
        build_stein_collection(kFig1, 20, 0.3, ShellParams{0.5, 0.1, d.c, 0.1});
        FAIL() << "expected a construction error";
    } catch (const ConstructionError& e) {
        EXPECT_NE(std::string(e.what()).find("shell k=2"), std::string::npos) << e.what();
    }
}

// Finite-n check of the fixed-error construction with the default shell
// parameters; the type-1 error should sit near eps.
TEST(Stein, TypeOneErrorNearTarget) {
    const auto o = evaluate_test(kFig1, build_stein_collection(kFig1, 40, 0.3));
    EXPECT_NEAR(o.alpha, 0.3, 0.1);
}

}  // namespace
}  // namespace lht
