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

/**
 * @file
 * Dense complex linear-algebra kernels: column-major vectorization,
 * Kronecker products, Hermitian eigendecomposition, Hermitian
 * positive-definite solves, spectrally truncated pseudoinverse application,
 * and Hermitian matrix exponentials.
 *
 * Everything here is a pure function of its arguments and safe to call
 * concurrently.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "qfim/types.hpp"

namespace qfim {

/// Hermiticity tolerance: 1e-10 relative to the largest entry magnitude.
inline double hermiticity_tolerance(const ComplexMatrix& a) { return 1e-10 * max_abs(a); }

/// Largest entry magnitude of a - a†.
inline double hermiticity_deviation(const ComplexMatrix& a) {
    return max_abs(ComplexMatrix(a - a.adjoint()));
}

/// (a + a†)/2. Used to scrub float-level asymmetry before factorizations.
inline ComplexMatrix hermitize(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

namespace detail {

inline void require_square(const ComplexMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

/// Throws ValidationError if a is not Hermitian within `tol` (default:
/// hermiticity_tolerance(a)). Non-finite entries are rejected first; they
/// would otherwise slip through the tolerance comparison.
inline void require_hermitian(const ComplexMatrix& a, const char* what, double tol = -1.0) {
    require_square(a, what);
    if (!a.allFinite()) {
        throw ValidationError("finiteness", std::numeric_limits<double>::quiet_NaN(),
                              std::string(what) + ": matrix contains NaN or Inf entries");
    }
    if (tol < 0.0) tol = hermiticity_tolerance(a);
    const double dev = hermiticity_deviation(a);
    if (dev > tol) {
        throw ValidationError("hermiticity", dev,
                              std::string(what) + ": matrix is not Hermitian, max |A - A^dag| = " +
                                  format_double(dev) + " exceeds tolerance " + format_double(tol));
    }
}

} // namespace detail

/// Stacks the columns of a matrix into one column vector, first column on top.
inline ComplexVector vectorize(const ComplexMatrix& a) {
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

/// Inverse of vectorize for square targets: reshapes a length-n^2 vector into
/// an n-by-n matrix column by column.
inline ComplexMatrix unvectorize(const ComplexVector& v, Index n) {
    if (n <= 0 || v.size() != n * n) {
        throw DimensionError("unvectorize: vector of length " + std::to_string(v.size()) +
                             " cannot fill a " + std::to_string(n) + "x" + std::to_string(n) +
                             " matrix");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

/// Kronecker product a ⊗ b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Eigendecomposition of a Hermitian matrix.
struct HermitianEig {
    RealVector eigenvalues;     ///< ascending
    ComplexMatrix eigenvectors; ///< unitary, columns match eigenvalues
};

/// Hermitian eigendecomposition A = U diag(λ) U†, eigenvalues ascending.
/// The input is validated against hermiticity_tolerance and symmetrized
/// before the solve.
inline HermitianEig hermitian_eig(const ComplexMatrix& a) {
    detail::require_hermitian(a, "hermitian_eig");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(a));
    if (solver.info() != Eigen::Success) {
        throw Error("hermitian_eig: eigensolver failed to converge");
    }
    return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

/// Solves M X = RHS for Hermitian positive definite M by Cholesky
/// factorization (the inverse is never formed). Factorizes once for all
/// right-hand sides.
inline ComplexMatrix solve_hpd(const ComplexMatrix& m, const ComplexMatrix& rhs) {
    detail::require_square(m, "solve_hpd");
    if (rhs.rows() != m.rows()) {
        throw DimensionError("solve_hpd: rhs has " + std::to_string(rhs.rows()) +
                             " rows, expected " + std::to_string(m.rows()));
    }
    Eigen::LLT<ComplexMatrix> llt(hermitize(m));
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m), Eigen::EigenvaluesOnly);
        const double min_pivot = es.info() == Eigen::Success ? es.eigenvalues()(0)
                                                             : std::numeric_limits<double>::quiet_NaN();
        throw SingularityError(min_pivot,
                               "solve_hpd: Cholesky factorization failed, matrix is not positive "
                               "definite (smallest eigenvalue " +
                                   format_double(min_pivot) + ")");
    }
    return llt.solve(rhs);
}

inline ComplexVector solve_hpd(const ComplexMatrix& m, const ComplexVector& rhs) {
    return ComplexVector(solve_hpd(m, ComplexMatrix(rhs)));
}

/// Applies the Moore-Penrose pseudoinverse of a Hermitian PSD matrix to RHS
/// via spectral truncation: eigenvalues at or below dim·ε·λ_max are treated
/// as exact zeros. Coincides with solve_hpd when m is definite.
inline ComplexMatrix pseudoinverse_apply(const ComplexMatrix& m, const ComplexMatrix& rhs) {
    detail::require_square(m, "pseudoinverse_apply");
    if (rhs.rows() != m.rows()) {
        throw DimensionError("pseudoinverse_apply: rhs has " + std::to_string(rhs.rows()) +
                             " rows, expected " + std::to_string(m.rows()));
    }
    const HermitianEig eig = hermitian_eig(m);
    const double lambda_max = eig.eigenvalues.size() ? eig.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    const double cutoff = static_cast<double>(m.rows()) * kEps * lambda_max;
    ComplexVector inv = ComplexVector::Zero(eig.eigenvalues.size());
    for (Index k = 0; k < eig.eigenvalues.size(); ++k) {
        if (eig.eigenvalues(k) > cutoff) inv(k) = 1.0 / eig.eigenvalues(k);
    }
    return eig.eigenvectors * inv.asDiagonal() * (eig.eigenvectors.adjoint() * rhs);
}

inline ComplexVector pseudoinverse_apply(const ComplexMatrix& m, const ComplexVector& rhs) {
    return ComplexVector(pseudoinverse_apply(m, ComplexMatrix(rhs)));
}

/// exp(A) for Hermitian A, computed spectrally as U diag(e^λ) U†.
inline ComplexMatrix matrix_exp(const ComplexMatrix& a) {
    const HermitianEig eig = hermitian_eig(a);
    const ComplexVector exp_vals = eig.eigenvalues.array().exp().matrix().cast<Complex>();
    return eig.eigenvectors * exp_vals.asDiagonal() * eig.eigenvectors.adjoint();
}

/// exp(-i A) for Hermitian A; unitary to machine precision by construction.
inline ComplexMatrix unitary_exp_neg_i(const ComplexMatrix& a) {
    const HermitianEig eig = hermitian_eig(a);
    ComplexVector phases(eig.eigenvalues.size());
    for (Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::exp(Complex(0.0, -eig.eigenvalues(k)));
    }
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

} // namespace qfim
