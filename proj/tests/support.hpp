// Copyright 2026 The qfim developers

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared test helpers: seeded random matrix generators and the independent
// oracles the implementation is checked against. Everything here is
// test-only and must stay independent of the solver paths it validates.

#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "qfim/states.hpp"
#include "qfim/types.hpp"

namespace test {

using qfim::Complex;
using qfim::ComplexMatrix;
using qfim::ComplexVector;
using qfim::Index;
using qfim::RealMatrix;
using qfim::RealVector;

inline double diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double diff(const RealMatrix& a, const RealMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double diff(const ComplexVector& a, const ComplexVector& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline ComplexMatrix random_complex(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    }
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Index dim) {
    const ComplexMatrix g = random_complex(rng, dim, dim);
    return 0.5 * (g + g.adjoint());
}

inline ComplexMatrix random_traceless_hermitian(std::mt19937_64& rng, Index dim) {
    ComplexMatrix h = random_hermitian(rng, dim);
    h.diagonal().array() -= h.trace() / static_cast<double>(dim);
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale > 0.0) h /= scale;
    return h;
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Index dim) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(rng, dim, dim));
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

// Wishart state G G† / tr, optionally mixed with the maximally mixed state so
// the smallest eigenvalue is bounded away from zero.
inline qfim::DensityMatrix random_density(std::mt19937_64& rng, Index dim, double mix = 0.0) {
    const ComplexMatrix g = random_complex(rng, dim, dim);
    ComplexMatrix w = g * g.adjoint();
    w /= w.trace().real();
    if (mix > 0.0) {
        w *= (1.0 - mix);
        w.diagonal().array() += mix / static_cast<double>(dim);
    }
    return qfim::validate_density(w);
}

// Rank-deficient state of the given rank with a random eigenbasis, plus a
// derivative set that comes from a genuine rank-preserving family: unitary
// rotations -i[G, rho] and support-restricted spectral motion.
struct RankDeficientInstance {
    qfim::DensityMatrix rho;
    qfim::DerivativeSet derivatives;
};

inline RankDeficientInstance random_rank_deficient(std::mt19937_64& rng, Index dim, Index rank,
                                                   int n_params) {
    const ComplexMatrix u = random_unitary(rng, dim);
    std::uniform_real_distribution<double> uniform(0.2, 1.0);
    RealVector p = RealVector::Zero(dim);
    double total = 0.0;
    for (Index k = 0; k < rank; ++k) {
        p(k) = uniform(rng);
        total += p(k);
    }
    p.head(rank) /= total;
    ComplexMatrix rho_m = u * p.cast<Complex>().asDiagonal() * u.adjoint();
    qfim::DensityMatrix rho = qfim::validate_density(0.5 * (rho_m + rho_m.adjoint()));

    qfim::DerivativeSet d;
    for (int i = 0; i < n_params; ++i) {
        const ComplexMatrix g = random_hermitian(rng, dim);
        ComplexMatrix deriv = Complex(0, -1) * (g * rho.matrix() - rho.matrix() * g);
        if (rank > 1 && i % 2 == 1) {
            // motion of the nonzero eigenvalues, restricted to the support
            RealVector dp = RealVector::Zero(dim);
            std::normal_distribution<double> gauss(0.0, 1.0);
            double mean = 0.0;
            for (Index k = 0; k < rank; ++k) {
                dp(k) = gauss(rng);
                mean += dp(k);
            }
            dp.head(rank).array() -= mean / static_cast<double>(rank);
            deriv += u * dp.cast<Complex>().asDiagonal() * u.adjoint();
        }
        deriv = 0.5 * (deriv + deriv.adjoint());
        deriv.diagonal().array() -= deriv.trace() / static_cast<double>(dim);
        d.push_back(deriv);
    }
    return RankDeficientInstance{std::move(rho), std::move(d)};
}

// ---------------------------------------------------------------------------
// independent oracles

// Classical Fisher information for diagonal rho and diagonal derivatives:
// F^{ij} = sum_k (d_i p_k)(d_j p_k) / p_k.
inline RealMatrix classical_fisher(const RealVector& p, const std::vector<RealVector>& dp) {
    const Index n = static_cast<Index>(dp.size());
    RealMatrix f = RealMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            for (Index k = 0; k < p.size(); ++k) {
                if (p(k) > 0.0) f(i, j) += dp[static_cast<std::size_t>(i)](k) *
                                           dp[static_cast<std::size_t>(j)](k) / p(k);
            }
        }
    }
    return f;
}

// Pure-state QFIM: H^{ij} = 4 Re(⟨∂_iψ|∂_jψ⟩ - ⟨∂_iψ|ψ⟩⟨ψ|∂_jψ⟩).
inline RealMatrix pure_state_qfim(const ComplexVector& psi,
                                  const std::vector<ComplexVector>& dpsi) {
    const Index n = static_cast<Index>(dpsi.size());
    RealMatrix h(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const Complex overlap = dpsi[static_cast<std::size_t>(i)].dot(psi) *
                                    psi.dot(dpsi[static_cast<std::size_t>(j)]);
            h(i, j) = 4.0 * (dpsi[static_cast<std::size_t>(i)].dot(dpsi[static_cast<std::size_t>(j)]) -
                             overlap)
                                .real();
        }
    }
    return h;
}

// Tikhonov-regularized pseudoinverse application (A†A + δI)⁻¹ A† b.
inline ComplexVector tikhonov_apply(const ComplexMatrix& a, const ComplexVector& b, double delta) {
    const ComplexMatrix lhs =
        a.adjoint() * a + delta * ComplexMatrix::Identity(a.cols(), a.cols());
    return lhs.fullPivLu().solve(a.adjoint() * b);
}

} // namespace test
