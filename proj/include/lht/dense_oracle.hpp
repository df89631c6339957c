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

// Operator-level evaluation of the two-round protocol for tiny n. Builds the
// POVM elements as explicit matrices and takes traces; used to cross-check
// the closed-form evaluator.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <complex>

#include "lht/protocol.hpp"

namespace lht {

inline constexpr int kDenseDimensionCap = 81;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Sequences of X^n in lexicographic order with their type and their index
/// inside the type class.
struct SequenceIndex {
    std::vector<std::vector<int>> seqs;
    std::vector<std::vector<int>> types;
    std::vector<std::uint64_t> rank;
};

inline SequenceIndex index_sequences(int d, int n) {
    SequenceIndex out;
    std::map<std::vector<int>, std::uint64_t> seen;
    std::vector<int> x(n, 0);
    while (true) {
        std::vector<int> t(d, 0);
        for (int v : x) ++t[v];
        out.seqs.push_back(x);
        out.rank.push_back(seen[t]++);
        out.types.push_back(std::move(t));
        int i = n - 1;
        while (i >= 0 && x[i] == d - 1) x[i--] = 0;
        if (i < 0) break;
        ++x[i];
    }
    return out;
}

/// m(x) of copy `copy` of measure m, for every sequence of the index.
inline std::vector<double> measure_values(const Measure& m, std::uint64_t copy, const SequenceIndex& idx) {
    std::vector<double> v(idx.seqs.size(), 0.0);
    for (const auto& b : m.blocks) {
        const std::uint64_t lo = b.offset + copy * b.stride;
        for (std::size_t s = 0; s < idx.seqs.size(); ++s)
            if (idx.types[s] == b.type && idx.rank[s] >= lo && idx.rank[s] < lo + b.size) v[s] += b.weight.value();
    }
    return v;
}

struct DenseReport {
    TestOutcome outcome;
    double completeness_error;  // max |sum_omega M_omega + M^c - I|
    double min_complement_eig;  // smallest eigenvalue of M^c
    double accept_min_eig;      // spectrum of the accepting element
    double accept_max_eig;
};

/// Explicit POVM construction: M_omega = sum_x m_omega(x)|x><x| on A, a
/// Fourier basis {xi_j} of span{|x> : m_omega(x) > 0} measured on B, then
/// O^{omega j} = sqrt(M sigma) |conj xi_j><conj xi_j| sqrt(M sigma) / <xi_j|M sigma|xi_j>
/// on A. The accepting element is sum sqrt(M) O sqrt(M) (x) N_j.
inline DenseReport dense_oracle_report(const SchmidtSpectrum& spec, const MeasureCollection& coll) {
    const int n = coll.n;
    require(n == 1 || n == 2, "dense_oracle: n must be 1 or 2");
    require(coll.d == spec.dim_min(), "dense_oracle: collection alphabet differs from the Schmidt rank");
    const int da = spec.dim_a(), db = spec.dim_b(), d = spec.dim_min();
    long dim = 1;
    for (int i = 0; i < n; ++i) dim *= static_cast<long>(da) * db;
    if (dim > kDenseDimensionCap) throw BudgetExceeded("dense_oracle: dimension exceeds 81");
    validate_collection(coll);

    int DA = 1, DB = 1;
    for (int i = 0; i < n; ++i) {
        DA *= da;
        DB *= db;
    }
    const auto idx = index_sequences(d, n);
    const auto l = spec.lambdas();
    std::vector<int> pos_a(idx.seqs.size()), pos_b(idx.seqs.size());
    std::vector<double> mass(idx.seqs.size());
    for (std::size_t s = 0; s < idx.seqs.size(); ++s) {
        int ia = 0, ib = 0;
        double p = 1;
        for (int v : idx.seqs[s]) {
            ia = ia * da + v;
            ib = ib * db + v;
            p *= l[v];
        }
        pos_a[s] = ia;
        pos_b[s] = ib;
        mass[s] = p;
    }

    CMatrix E = CMatrix::Zero(DA * DB, DA * DB);
    CMatrix Msum = CMatrix::Zero(DA, DA);
    const std::complex<double> I(0, 1);
    for (const auto& m : coll.measures) {
        for (std::uint64_t c = 0; c < m.multiplicity; ++c) {
            const auto mv = measure_values(m, c, idx);
            std::vector<std::size_t> supp;
            CMatrix sqM = CMatrix::Zero(DA, DA);
            for (std::size_t s = 0; s < mv.size(); ++s) {
                Msum(pos_a[s], pos_a[s]) += mv[s];
                sqM(pos_a[s], pos_a[s]) = std::sqrt(mv[s]);
                if (mv[s] > 0) supp.push_back(s);
            }
            const std::size_t K = supp.size();
            for (std::size_t j = 0; j < K; ++j) {
                CVector xi = CVector::Zero(DB);
                CVector w = CVector::Zero(DA);
                for (std::size_t k = 0; k < K; ++k) {
                    const auto ph = std::exp(2.0 * M_PI * I * static_cast<double>(j * k) / static_cast<double>(K)) /
                                    std::sqrt(static_cast<double>(K));
                    const std::size_t s = supp[k];
                    xi(pos_b[s]) = ph;
                    w(pos_a[s]) = std::sqrt(mv[s] * mass[s]) * std::conj(ph);
                }
                const CMatrix O = w * w.adjoint() / w.squaredNorm();
                const CMatrix EA = sqM * O * sqM;
                const CMatrix NB = xi * xi.adjoint();
                E += Eigen::kroneckerProduct(EA, NB).eval();
            }
        }
    }
    // Psi^{(x)n} with A and B factors grouped.
    CVector psi = CVector::Zero(DA * DB);
    for (std::size_t s = 0; s < idx.seqs.size(); ++s) psi(pos_a[s] * DB + pos_b[s]) = std::sqrt(mass[s]);

    const double accept = (psi.adjoint() * E * psi)(0, 0).real();
    const double beta = E.trace().real() / static_cast<double>(DA * DB);
    const CMatrix Mc = CMatrix::Identity(DA, DA) - Msum;
    const double completeness = (Msum + Mc - CMatrix::Identity(DA, DA)).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<CMatrix> es_c(Mc);
    Eigen::SelfAdjointEigenSolver<CMatrix> es_e(E);
    DenseReport r;
    r.outcome = {1 - accept, beta, std::log(beta), Provenance::kExact};
    r.completeness_error = completeness;
    r.min_complement_eig = es_c.eigenvalues().minCoeff();
    r.accept_min_eig = es_e.eigenvalues().minCoeff();
    r.accept_max_eig = es_e.eigenvalues().maxCoeff();
    return r;
}

inline TestOutcome dense_oracle_evaluate(const SchmidtSpectrum& spec, const MeasureCollection& coll) {
    return dense_oracle_report(spec, coll).outcome;
}

}  // namespace lht
