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

// Strong large deviations (Bahadur-Rao) for sums of i.i.d. variables under a
// possibly unnormalized weight measure.

#pragma once

#include <numeric>

#include "lht/common.hpp"
#include "lht/spectrum.hpp"
#include "lht/typelattice.hpp"

namespace lht {

inline constexpr long kLatticeDenominatorCap = 1000;
inline constexpr double kLatticeTolerance = 1e-9;

namespace detail {

/// Best rational approximation p/q of x with q <= cap, if within tol.
inline std::optional<std::pair<long, long>> rationalize(double x, long cap, double tol) {
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double y = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(y);
        if (std::abs(a) > 1e15) break;
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0;
        long k2 = ai * k1 + k0;
        if (k2 > cap) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / k1) <= tol * std::max(1.0, std::abs(x))) return std::pair{h1, k1};
        double frac = y - a;
        if (frac < 1e-300) break;
        y = 1 / frac;
    }
    return std::nullopt;
}

inline std::vector<double> support_points(std::span<const double> w, std::span<const double> x) {
    require(w.size() == x.size(), "support: weights and values differ in length");
    std::vector<double> s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        require(std::isfinite(w[i]) && w[i] >= 0, "support: weights must be finite and non-negative");
        require(std::isfinite(x[i]), "support: values must be finite");
        if (w[i] > 0) s.push_back(x[i]);
    }
    std::sort(s.begin(), s.end());
    std::vector<double> u;
    for (double v : s)
        if (u.empty() || std::abs(v - u.back()) > 1e-12 * (1 + std::abs(v))) u.push_back(v);
    return u;
}

}  // namespace detail

/// Largest x > 0 with all support differences in xZ, or 0 for non-lattice
/// variables. Ratios are tested for rationality by continued fractions.
inline double lattice_span(std::span<const double> weights, std::span<const double> x) {
    const auto s = detail::support_points(weights, x);
    if (s.size() < 2) throw std::invalid_argument("lattice_span: need at least two support points");
    const double ref = s[1] - s[0];
    std::vector<std::pair<long, long>> fr;
    for (std::size_t i = 1; i < s.size(); ++i) {
        auto q = detail::rationalize((s[i] - s[0]) / ref, kLatticeDenominatorCap, kLatticeTolerance);
        if (!q) return 0.0;
        fr.push_back(*q);
    }
    long l = 1;
    for (auto [num, den] : fr) {
        l = std::lcm(l, den);
        if (l > kLatticeDenominatorCap) return 0.0;
    }
    long g = 0;
    for (auto [num, den] : fr) g = std::gcd(g, std::abs(num) * (l / den));
    return ref * static_cast<double>(g) / static_cast<double>(l);
}

/// tau(s) = log sum_i w_i e^{s x_i} and its derivatives.
class CumulantFunction {
   public:
    CumulantFunction(std::vector<double> weights, std::vector<double> x) : x_(std::move(x)) {
        require(weights.size() == x_.size(), "CumulantFunction: length mismatch");
        for (double w : weights) {
            require(std::isfinite(w) && w >= 0, "CumulantFunction: weights must be non-negative");
            log_w_.push_back(w > 0 ? std::log(w) : kNegInf);
        }
        auto s = detail::support_points(weights, x_);
        require(!s.empty(), "CumulantFunction: zero measure");
        lo_ = s.front();
        hi_ = s.back();
    }

    double tau(double s) const {
        LogSum acc;
        for (std::size_t i = 0; i < x_.size(); ++i) acc.add(log_w_[i] + s * x_[i]);
        return acc.value();
    }

    /// Mean and variance of x under the tilted law w e^{sx} / e^{tau(s)}.
    std::pair<double, double> tilted_moments(double s) const {
        const double t = tau(s);
        double m = 0;
        for (std::size_t i = 0; i < x_.size(); ++i)
            if (log_w_[i] > kNegInf) m += std::exp(log_w_[i] + s * x_[i] - t) * x_[i];
        double v = 0;
        for (std::size_t i = 0; i < x_.size(); ++i)
            if (log_w_[i] > kNegInf) v += std::exp(log_w_[i] + s * x_[i] - t) * (x_[i] - m) * (x_[i] - m);
        return {m, v};
    }

    double tau_prime(double s) const { return tilted_moments(s).first; }
    double tau_second(double s) const { return tilted_moments(s).second; }
    double mean() const { return tau_prime(0.0); }

    /// eta(R): the s with tau'(s) = R, for R strictly inside the support hull.
    double eta(double R) const {
        if (!(R > lo_ && R < hi_)) throw std::domain_error("eta: R outside the open range of tau'");
        double a = -1, b = 1;
        while (tau_prime(a) > R) a *= 2;
        while (tau_prime(b) < R) b *= 2;
        return bisect([&](double s) { return tau_prime(s) - R; }, a, b, 1e-15);
    }

    double support_min() const { return lo_; }
    double support_max() const { return hi_; }
    std::span<const double> values() const { return x_; }

   private:
    std::vector<double> log_w_;
    std::vector<double> x_;
    double lo_;
    double hi_;
};

struct BRChi {
    double eta;
    double eta_prime;  // 1 / tau''(eta)
    double chi0;
    double chi1;
    double lattice_span;
};

/// chi_0, chi_1 of the upper tail at R >= mean.
inline BRChi br_chi(std::span<const double> weights, std::span<const double> x, double R) {
    CumulantFunction cf({weights.begin(), weights.end()}, {x.begin(), x.end()});
    const double span = lattice_span(weights, x);
    const double mean = cf.mean();
    require(R >= mean - 1e-12 * (1 + std::abs(mean)), "br_chi: R must not lie below the mean");
    const double eta = std::abs(R - mean) <= 1e-12 * (1 + std::abs(mean)) ? 0.0 : cf.eta(R);
    const double eta_prime = 1 / cf.tau_second(eta);
    const double chi0 = -R * eta + cf.tau(eta);
    double chi1;
    if (eta == 0) {
        chi1 = kInf;
    } else if (span == 0) {
        chi1 = -0.5 * std::log(2 * M_PI) - std::log(eta) + 0.5 * std::log(eta_prime);
    } else {
        chi1 = -0.5 * std::log(2 * M_PI) + 0.5 * std::log(eta_prime) + std::log(span / -std::expm1(-span * eta));
    }
    return {eta, eta_prime, chi0, chi1, span};
}

struct TailApprox {
    double lattice_span;
    double chi0;
    double chi1;
    int n;
    double approx_log_tail;
};

/// Bahadur-Rao approximation chi0 n - log(n)/2 + chi1 of log w^n{sum X >= nR}
/// (or <= nR). On the bulk side the tail carries essentially all the mass,
/// and n tau(0) is returned.
inline TailApprox br_tail_estimate(std::span<const double> weights, std::span<const double> x, int n, double R,
                                   TailSide side = TailSide::kGreaterEq) {
    require(n >= 1, "br_tail_estimate: n must be >= 1");
    std::vector<double> xs(x.begin(), x.end());
    double r = R;
    if (side == TailSide::kLessEq) {
        for (double& v : xs) v = -v;
        r = -R;
    }
    CumulantFunction cf({weights.begin(), weights.end()}, xs);
    const double span = lattice_span(weights, xs);
    if (r <= cf.mean()) {
        const double t0 = cf.tau(0.0);
        return {span, t0, 0.0, n, n * t0};
    }
    if (r >= cf.support_max()) {
        // Only the extreme point can reach the threshold.
        const double tol = 1e-12 * (1 + std::abs(r));
        if (r > cf.support_max() + tol) return {span, kNegInf, 0.0, n, kNegInf};
    }
    const auto c = br_chi(weights, xs, r);
    return {span, c.chi0, c.chi1, n, c.chi0 * n - 0.5 * std::log(static_cast<double>(n)) + c.chi1};
}

// ---------------------------------------------------------------------------
// Corrections for the threshold sets S_n(R) built from log p_i.

/// psi_p(s) = log sum_i p_i^{1+s}.
inline double psi_p(std::span<const double> p, double s) {
    LogSum acc;
    for (double v : p)
        if (v > 0) acc.add((1 + s) * std::log(v));
    return acc.value();
}

inline double g_of_span(double d) {
    require(d >= 0, "g_of_span: span must be >= 0");
    if (d == 0) return -std::log(2.0);
    return std::log(-std::expm1(-0.5 * d) / -std::expm1(-d));
}

struct GH {
    double g;
    double h1;
    double lattice_span;
    double t;  // psi_p'^{-1}(R)
};

inline GH g_and_h(std::span<const double> p, double R) {
    check_distribution(p, false, "g_and_h");
    require(!is_uniform(p), "g_and_h: p must be non-uniform");
    std::vector<double> w(p.begin(), p.end());
    std::vector<double> lp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) lp[i] = std::log(p[i]);
    CumulantFunction cf(w, lp);
    const double d = lattice_span(w, lp);
    const double t = cf.eta(R);
    if (!(t + 0.5 > 0)) throw std::domain_error("g_and_h: psi_p'^{-1}(R) must exceed -1/2");
    double h1;
    if (d == 0) {
        h1 = std::log((t + 0.5) / (t + 1));
    } else {
        h1 = std::log(-std::expm1(-(t + 0.5) * d) / -std::expm1(-(t + 1) * d));
    }
    return {g_of_span(d), h1, d, t};
}

}  // namespace lht
