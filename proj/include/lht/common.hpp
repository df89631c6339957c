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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lht {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when an exact enumeration would exceed its declared size budget.
class BudgetExceeded : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// Thrown when a finite-n construction is infeasible (e.g. an empty type set).
class ConstructionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// log(e^a + e^b) without overflow; either argument may be -inf.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

/// log(e^a - e^b) for a >= b.
inline double log_sub(double a, double b) {
    if (b == kNegInf) return a;
    if (b > a) throw std::domain_error("log_sub: negative difference");
    if (a == b) return kNegInf;
    return a + std::log(-std::expm1(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    if (m == kInf) return kInf;
    double s = 0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Streaming log-sum-exp accumulator.
class LogSum {
   public:
    void add(double x) {
        if (x == kNegInf) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

   private:
    double max_ = kNegInf;
    double sum_ = 0;
};

/// Bisection for a monotone function with a sign change on [lo, hi].
/// `increasing` tells which side is negative.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13,
                     int max_iter = 400) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw std::domain_error("bisect: no sign change in bracket");
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct ArgMax {
    double arg;
    double value;
};

/// Maximize a continuous function on [lo, hi]: coarse grid scan, then
/// golden-section refinement inside the bracket around the best grid point.
inline ArgMax maximize_scan_golden(const std::function<double(double)>& f, double lo, double hi,
                                   int grid = 256, double tol = 1e-12) {
    int best = 0;
    double best_val = -kInf;
    std::vector<double> xs(grid + 1);
    for (int i = 0; i <= grid; ++i) {
        xs[i] = lo + (hi - lo) * i / grid;
        double v = f(xs[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = xs[std::max(best - 1, 0)];
    double b = xs[std::min(best + 1, grid)];
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    ArgMax out{0.5 * (a + b), f(0.5 * (a + b))};
    if (best_val > out.value) out = {xs[best], best_val};
    return out;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace lht
