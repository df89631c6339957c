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

// Closed-form asymptotics for testing a pure bipartite state against white
// noise: Hoeffding curves, critical rates, Stein-Strassen coefficients and
// the exponential-family identities behind the two-way construction.

#pragma once

#include <optional>
#include <string_view>

#include "lht/common.hpp"
#include "lht/spectrum.hpp"

namespace lht {

enum class ClassTag { kOneWay, kTwoWay, kSeparable, kGlobal };

inline std::string_view to_string(ClassTag t) {
    switch (t) {
        case ClassTag::kOneWay: return "one_way";
        case ClassTag::kTwoWay: return "two_way";
        case ClassTag::kSeparable: return "separable";
        case ClassTag::kGlobal: return "global";
    }
    return "?";
}

inline ClassTag class_tag_from_string(std::string_view s) {
    if (s == "one_way") return ClassTag::kOneWay;
    if (s == "two_way") return ClassTag::kTwoWay;
    if (s == "separable") return ClassTag::kSeparable;
    if (s == "global") return ClassTag::kGlobal;
    throw std::invalid_argument("unknown class tag: " + std::string(s));
}

inline constexpr double kSupUpper = 1 - 1e-8;

struct CriticalRates {
    double one_way;  // -H_0'
    double two_way;  // -H_{1/2}' / 4
};

inline CriticalRates critical_rates(const SchmidtSpectrum& spec) {
    return {std::max(0.0, -renyi_derivative(spec, 0.0)), std::max(0.0, -0.25 * renyi_derivative(spec, 0.5))};
}

/// sup_{0<=s<1} -s/(1-s) r - H_s + log d_A d_B.
inline double hoeffding_one_way(const SchmidtSpectrum& spec, double r) {
    require(r >= 0, "hoeffding_one_way: r must be >= 0");
    const double base = spec.log_dim_product();
    if (r == 0) return base - renyi_entropy(spec, 1.0);
    if (r >= critical_rates(spec).one_way) return base - renyi_entropy(spec, 0.0);
    auto f = [&](double s) { return -s / (1 - s) * r - renyi_entropy(spec, s); };
    return base + maximize_scan_golden(f, 0.0, kSupUpper).value;
}

/// sup_{0<=s<1} -2s/(1-s) r - H_{(1+s)/2}(p). Equals
/// min_{Q : D(Q||p) <= r} D(Q||p) - H(Q).
inline double hoeffding_dual(std::span<const double> p, double r) {
    require(r >= 0, "hoeffding_dual: r must be >= 0");
    if (r == 0) return -renyi_entropy(p, 1.0);
    if (r >= std::max(0.0, -0.25 * renyi_derivative(p, 0.5))) return -renyi_entropy(p, 0.5);
    auto f = [&](double s) { return -2 * s / (1 - s) * r - renyi_entropy(p, (1 + s) / 2); };
    return maximize_scan_golden(f, 0.0, kSupUpper).value;
}

/// sup_{0<=s<1} -2s/(1-s) r - H_{(1+s)/2} + log d_A d_B. Also the separable curve.
inline double hoeffding_two_way(const SchmidtSpectrum& spec, double r) {
    return spec.log_dim_product() + hoeffding_dual(spec.lambdas(), r);
}

struct ExponentCurve {
    ClassTag class_tag;
    std::function<double(double)> evaluator;
    double plateau_rate;
    double plateau_value;

    double operator()(double r) const { return evaluator(r); }
};

inline ExponentCurve make_curve(const SchmidtSpectrum& spec, ClassTag tag) {
    const auto rates = critical_rates(spec);
    switch (tag) {
        case ClassTag::kOneWay:
            return {tag, [spec](double r) { return hoeffding_one_way(spec, r); }, rates.one_way,
                    spec.log_dim_product() - renyi_entropy(spec, 0.0)};
        case ClassTag::kTwoWay:
        case ClassTag::kSeparable:
            return {tag, [spec](double r) { return hoeffding_two_way(spec, r); }, rates.two_way,
                    spec.log_dim_product() - renyi_entropy(spec, 0.5)};
        case ClassTag::kGlobal:
            break;
    }
    throw std::invalid_argument("make_curve: no Hoeffding curve for the global class");
}

/// Fixed point E(r*) = r*. The curve is non-increasing with maximum E(0), so
/// E(r) - r changes sign on [0, E(0)].
inline double chernoff_rate(const ExponentCurve& curve) {
    const double e0 = curve(0.0);
    if (!(e0 > 0)) throw std::domain_error("chernoff_rate: curve has no positive crossing");
    return bisect([&](double r) { return curve(r) - r; }, 0.0, e0, 1e-11);
}

struct SteinExpansion {
    double first_order;
    double second_order;
    double third_order;

    double evaluate(double n) const {
        return first_order * n + second_order * std::sqrt(n) + third_order * std::log(n);
    }
};

/// Coefficients of log beta_n(eps) ~ a n + b sqrt(n) + c log n.
inline SteinExpansion stein_strassen_terms(const SchmidtSpectrum& spec, double eps, ClassTag tag) {
    require(eps > 0 && eps < 1, "stein_strassen_terms: eps must lie in (0,1)");
    require(tag != ClassTag::kGlobal, "stein_strassen_terms: global class has a different closed form");
    const double first = -(spec.log_dim_product() - renyi_entropy(spec, 1.0));
    const double second = -std::sqrt(varentropy(spec)) * gaussian_quantile(eps);
    const double third = tag == ClassTag::kOneWay ? -0.5 : -1.0;
    return {first, second, third};
}

// ---------------------------------------------------------------------------
// Global POVMs.

/// log beta_{n,g}(eps | Psi || rho_mix) = -n log d_A d_B + log(1 - eps).
inline double global_log_beta_stein(const SchmidtSpectrum& spec, int n, double eps) {
    require(eps >= 0 && eps < 1, "global_log_beta_stein: eps must lie in [0,1)");
    return -n * spec.log_dim_product() + std::log1p(-eps);
}

/// log beta_{n,g}(e^{-nr} | Psi || rho_mix) = -n log d_A d_B + log(1 - e^{-nr}).
inline double global_log_beta_hoeffding(const SchmidtSpectrum& spec, int n, double r) {
    require(r > 0, "global_log_beta_hoeffding: r must be > 0");
    return -n * spec.log_dim_product() + std::log(-std::expm1(-n * r));
}

/// beta_{n,g}(e^{-nr} | rho_mix || Psi): 0 for r <= log d_A d_B, else 1.
inline double global_beta_reversed_hoeffding(const SchmidtSpectrum& spec, double r) {
    require(r >= 0, "global_beta_reversed_hoeffding: r must be >= 0");
    return r <= spec.log_dim_product() ? 0.0 : 1.0;
}

/// beta_{n,g}(eps | rho_mix || Psi) = 0 for every eps in (0,1).
inline double global_beta_reversed_stein(double eps) {
    require(eps > 0 && eps < 1, "global_beta_reversed_stein: eps must lie in (0,1)");
    return 0.0;
}

// ---------------------------------------------------------------------------
// Exponential family P_theta ~ p^{1-theta}.

inline std::vector<double> exp_family(std::span<const double> p, double theta) {
    require(theta >= 0 && theta <= 1, "exp_family: theta must lie in [0,1]");
    check_distribution(p, false, "exp_family");
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) w[i] = (1 - theta) * std::log(p[i]);
    const double z = log_sum_exp(w);
    for (double& x : w) x = std::exp(x - z);
    return w;
}

/// Largest reachable rate D(P_1 || p) = -log d - mean log p.
inline double max_family_rate(std::span<const double> p) {
    return kl_divergence(std::vector<double>(p.size(), 1.0 / p.size()), p);
}

/// theta with D(P_theta || p) = r.
inline double theta_of_rate(std::span<const double> p, double r) {
    check_distribution(p, false, "theta_of_rate");
    const double rmax = max_family_rate(p);
    require(r >= 0 && r <= rmax * (1 + 1e-12) + 1e-15, "theta_of_rate: r outside [0, D(uniform||p)]");
    if (r == 0) return 0.0;
    if (r >= rmax) return 1.0;
    auto g = [&](double th) { return kl_divergence(exp_family(p, th), p) - r; };
    return bisect(g, 0.0, 1.0, 1e-14);
}

/// D(P_{1/2} || p): above this rate the constraint D(Q||p) <= r is inactive.
inline double half_family_rate(std::span<const double> p) { return kl_divergence(exp_family(p, 0.5), p); }

/// min_{Q : D(Q||p) <= r} D(Q||p) - H(Q); nullopt means unconstrained.
inline double min_divergence_minus_entropy(std::span<const double> p, std::optional<double> r) {
    check_distribution(p, false, "min_divergence_minus_entropy");
    if (!r || *r >= half_family_rate(p)) return -renyi_entropy(p, 0.5);
    require(!is_uniform(p), "min_divergence_minus_entropy: p must be non-uniform");
    const auto q = exp_family(p, theta_of_rate(p, *r));
    return kl_divergence(q, p) - shannon_entropy(q);
}

// ---------------------------------------------------------------------------
// Regime thresholds of the two-way achievability statement. Two readings of
// the admissible range exist; both are exposed and the band between them is
// flagged rather than resolved.

struct RegimeThresholds {
    double narrow;  // -H_{1/2}'/4
    double wide;    // log d - H_{1/2}'/4
};

inline RegimeThresholds regime_thresholds(const SchmidtSpectrum& spec) {
    const double r = critical_rates(spec).two_way;
    return {r, std::log(static_cast<double>(spec.dim_min())) + r};
}

enum class Regime { kInside, kAmbiguous, kOutside };

inline Regime classify_regime(const SchmidtSpectrum& spec, double r) {
    const auto t = regime_thresholds(spec);
    if (r < t.narrow) return Regime::kInside;
    if (r < t.wide) return Regime::kAmbiguous;
    return Regime::kOutside;
}

inline std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::kInside: return "inside";
        case Regime::kAmbiguous: return "ambiguous";
        case Regime::kOutside: return "outside";
    }
    return "?";
}

}  // namespace lht
