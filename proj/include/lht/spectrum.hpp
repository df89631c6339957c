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

// Schmidt spectra, Renyi entropies and classical divergence statistics.
// All logarithms are natural.

#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "lht/common.hpp"

namespace lht {

// ---------------------------------------------------------------------------
// Standard normal law.

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); }

/// Inverse of the standard normal CDF, accurate to ~1e-15 absolute in the bulk.
inline double gaussian_quantile(double eps) {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("gaussian_quantile: eps must lie in (0,1)");
    // Acklam's rational approximation as a starting point.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double lo = 0.02425;
    double x;
    if (eps < lo) {
        double q = std::sqrt(-2 * std::log(eps));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (eps <= 1 - lo) {
        double q = eps - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log1p(-eps));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    // Halley refinement against the erfc-based CDF.
    for (int i = 0; i < 3; ++i) {
        // Phi(x) - eps, evaluated on the side that avoids cancellation.
        double e = (eps < 0.5) ? normal_cdf(x) - eps : (1 - eps) - 0.5 * std::erfc(x / std::sqrt(2.0));
        double u = e / normal_pdf(x);
        x = x - u / (1 + 0.5 * x * u);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Probability vectors.

/// Validates a probability vector. Zero entries are allowed only when
/// `allow_zero` is set.
inline void check_distribution(std::span<const double> p, bool allow_zero, const char* who) {
    require(!p.empty(), std::string(who) + ": empty probability vector");
    double s = 0;
    for (double x : p) {
        require(std::isfinite(x) && x >= 0, std::string(who) + ": negative or non-finite entry");
        require(allow_zero || x > 0, std::string(who) + ": entries must be strictly positive");
        s += x;
    }
    require(std::abs(s - 1) <= 1e-12, std::string(who) + ": entries must sum to 1");
}

inline bool is_uniform(std::span<const double> p, double tol = 1e-12) {
    for (double x : p)
        if (std::abs(x - p[0]) > tol) return false;
    return true;
}

/// Shannon entropy (nats) with 0 log 0 = 0.
inline double shannon_entropy(std::span<const double> p) {
    double h = 0;
    for (double x : p)
        if (x > 0) h -= x * std::log(x);
    return h;
}

/// Relative entropy D(q||p); infinite when q charges a zero of p.
inline double kl_divergence(std::span<const double> q, std::span<const double> p) {
    require(q.size() == p.size(), "kl_divergence: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0) continue;
        if (p[i] == 0) return kInf;
        s += q[i] * std::log(q[i] / p[i]);
    }
    return std::max(s, 0.0);
}

/// Renyi entropy H_alpha of a strictly positive probability vector.
inline double renyi_entropy(std::span<const double> p, double alpha) {
    require(alpha >= 0 && std::isfinite(alpha), "renyi_entropy: alpha must be finite and >= 0");
    if (alpha == 0) return std::log(static_cast<double>(p.size()));
    if (alpha == 1) return shannon_entropy(p);
    const double delta = alpha - 1;
    if (std::abs(delta) < 0.5) {
        // sum p^alpha = 1 + sum p (p^delta - 1), kept accurate for alpha near 1.
        double s = 0;
        for (double x : p) s += x * std::expm1(delta * std::log(x));
        return std::log1p(s) / (1 - alpha);
    }
    LogSum acc;
    for (double x : p)
        if (x > 0) acc.add(alpha * std::log(x));
    return acc.value() / (1 - alpha);
}

/// Varentropy sum_i p_i (log p_i + H_1)^2.
inline double varentropy(std::span<const double> p) {
    const double h = shannon_entropy(p);
    double v = 0;
    for (double x : p)
        if (x > 0) v += x * (std::log(x) + h) * (std::log(x) + h);
    return v;
}

/// dH_alpha / d alpha, in closed form: -D(P_alpha || p) / (1 - alpha)^2 with
/// P_alpha proportional to p^alpha; a cumulant series is used for alpha near 1.
inline double renyi_derivative(std::span<const double> p, double alpha) {
    require(alpha >= 0 && std::isfinite(alpha), "renyi_derivative: alpha must be finite and >= 0");
    const double delta = 1 - alpha;
    if (std::abs(delta) < 1e-4) {
        double mu = 0;
        for (double x : p) mu += x * std::log(x);
        double k2 = 0, m3 = 0, m4 = 0;
        for (double x : p) {
            double c = std::log(x) - mu;
            k2 += x * c * c;
            m3 += x * c * c * c;
            m4 += x * c * c * c * c;
        }
        double k4 = m4 - 3 * k2 * k2;
        return -(k2 / 2 - m3 * delta / 3 + k4 * delta * delta / 8);
    }
    // log Z(alpha) and the tilted distribution.
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) w[i] = alpha * std::log(p[i]);
    const double log_z = log_sum_exp(w);
    double div = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double pa = std::exp(w[i] - log_z);
        div += pa * ((alpha - 1) * std::log(p[i]) - log_z);
    }
    return -std::max(div, 0.0) / (delta * delta);
}

// ---------------------------------------------------------------------------
// Schmidt spectrum of a bipartite pure state.

class SchmidtSpectrum {
   public:
    /// Entries are sorted non-increasingly; a sum within 1e-9 of one is
    /// renormalized. Entries below 1e-15 are rejected: zero Schmidt
    /// coefficients have to be dropped by the caller.
    SchmidtSpectrum(std::vector<double> lambdas, int dim_a, int dim_b)
        : lambdas_(std::move(lambdas)), dim_a_(dim_a), dim_b_(dim_b) {
        require(dim_a >= 1 && dim_b >= 1, "SchmidtSpectrum: local dimensions must be positive");
        require(static_cast<int>(lambdas_.size()) == std::min(dim_a, dim_b),
                "SchmidtSpectrum: number of coefficients must equal min(d_A, d_B)");
        double s = 0;
        for (double x : lambdas_) {
            require(std::isfinite(x) && x >= 1e-15, "SchmidtSpectrum: coefficients must be >= 1e-15");
            s += x;
        }
        require(std::abs(s - 1) <= 1e-9, "SchmidtSpectrum: coefficients must sum to 1");
        for (double& x : lambdas_) x /= s;
        std::sort(lambdas_.begin(), lambdas_.end(), std::greater<>());
    }

    /// The family sqrt(l) sum_{i<d} |ii> + sqrt(1-(d-1) l) |dd> with d_A = d_B = d.
    static SchmidtSpectrum from_lambda(int d, double lambda) {
        require(d >= 2, "from_lambda: d must be >= 2");
        require(lambda > 0 && (d - 1) * lambda < 1, "from_lambda: need 0 < lambda < 1/(d-1)");
        std::vector<double> l(d, lambda);
        l.back() = 1 - (d - 1) * lambda;
        return SchmidtSpectrum(std::move(l), d, d);
    }

    std::span<const double> lambdas() const { return lambdas_; }
    const std::vector<double>& values() const { return lambdas_; }
    int dim_a() const { return dim_a_; }
    int dim_b() const { return dim_b_; }
    int dim_min() const { return static_cast<int>(lambdas_.size()); }
    int dim_max() const { return std::max(dim_a_, dim_b_); }
    double log_dim_product() const { return std::log(static_cast<double>(dim_a_) * dim_b_); }
    bool uniform() const { return is_uniform(lambdas_); }

    friend bool operator==(const SchmidtSpectrum&, const SchmidtSpectrum&) = default;

   private:
    std::vector<double> lambdas_;
    int dim_a_;
    int dim_b_;
};

inline double renyi_entropy(const SchmidtSpectrum& s, double alpha) { return renyi_entropy(s.lambdas(), alpha); }
inline double renyi_derivative(const SchmidtSpectrum& s, double alpha) {
    return renyi_derivative(s.lambdas(), alpha);
}
inline double varentropy(const SchmidtSpectrum& s) { return varentropy(s.lambdas()); }

/// The classically correlated state sum_i lambda_i |ii><ii| as a distribution
/// over the d_A * d_B product basis (row-major in (a, b)).
inline std::vector<double> dephased_distribution(const SchmidtSpectrum& s) {
    std::vector<double> p(static_cast<std::size_t>(s.dim_a()) * s.dim_b(), 0.0);
    for (int i = 0; i < s.dim_min(); ++i) p[static_cast<std::size_t>(i) * s.dim_b() + i] = s.lambdas()[i];
    return p;
}

// ---------------------------------------------------------------------------
// Divergence statistics of commuting states.

struct DivergenceStats {
    double rel_entropy;
    double rel_varentropy;
    /// s -> -log sum_i p_i^{1-s} q_i^s
    std::function<double(double)> psi;
};

/// D(p||q), V(p||q) and psi(s|p||q). p may vanish on some outcomes; q must
/// be strictly positive wherever p is.
inline DivergenceStats divergence_stats(std::vector<double> p, std::vector<double> q) {
    require(p.size() == q.size(), "divergence_stats: length mismatch");
    check_distribution(p, true, "divergence_stats(p)");
    check_distribution(q, true, "divergence_stats(q)");
    for (std::size_t i = 0; i < p.size(); ++i)
        require(p[i] == 0 || q[i] > 0, "divergence_stats: p must be absolutely continuous w.r.t. q");
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) d += p[i] * std::log(p[i] / q[i]);
    double v = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) {
            double c = std::log(p[i] / q[i]) - d;
            v += p[i] * c * c;
        }
    auto psi = [p, q](double s) {
        LogSum acc;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] > 0 && q[i] > 0) acc.add((1 - s) * std::log(p[i]) + s * std::log(q[i]));
        return -acc.value();
    };
    return {d, v, psi};
}

}  // namespace lht
