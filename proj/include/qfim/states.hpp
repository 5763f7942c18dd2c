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
 * Validated density matrices, parametrized state families with analytic or
 * finite-difference derivatives, white-noise regularization, and unitary
 * parameter encodings.
 */

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qfim/linalg.hpp"
#include "qfim/types.hpp"

namespace qfim {

/// Tolerance on |trace - 1| for density-matrix validation.
inline constexpr double kTraceTolerance = 1e-10;
/// Eigenvalues of a density matrix may undershoot zero by at most this much.
inline constexpr double kPsdTolerance = 1e-10;
/// Hermiticity/tracelessness tolerance for parameter derivatives.
inline constexpr double kDerivativeTolerance = 1e-8;

/**
 * @brief A validated quantum state: Hermitian, unit-trace, positive
 * semidefinite, with its spectral decomposition cached at construction.
 *
 * "Full rank" means every eigenvalue exceeds dim·ε·λ_max; formulas that
 * invert the state (or the operator built from it) require this and raise
 * SingularityError otherwise.
 */
class DensityMatrix {
  public:
    /// Validates an arbitrary matrix as a density matrix. The input is
    /// symmetrized once it passes the hermiticity check, so float-level
    /// asymmetry does not reach downstream factorizations.
    static DensityMatrix validate(const ComplexMatrix& m) {
        detail::require_square(m, "validate_density");
        if (!m.allFinite()) {
            throw ValidationError("finiteness", std::numeric_limits<double>::quiet_NaN(),
                                  "validate_density: matrix contains NaN or Inf entries");
        }
        detail::require_hermitian(m, "validate_density");
        ComplexMatrix sym = hermitize(m);
        const double trace = sym.trace().real();
        if (std::abs(trace - 1.0) > kTraceTolerance) {
            throw ValidationError("trace", trace,
                                  "validate_density: trace = " + format_double(trace) +
                                      ", expected 1 within " + format_double(kTraceTolerance));
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
        if (solver.info() != Eigen::Success) {
            throw Error("validate_density: eigensolver failed to converge");
        }
        if (solver.eigenvalues()(0) < -kPsdTolerance) {
            throw ValidationError("positivity", solver.eigenvalues()(0),
                                  "validate_density: smallest eigenvalue " +
                                      format_double(solver.eigenvalues()(0)) + " is below -" +
                                      format_double(kPsdTolerance));
        }
        return DensityMatrix(std::move(sym), solver.eigenvalues(), solver.eigenvectors());
    }

    Index dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }
    /// Cached spectrum, ascending.
    const RealVector& eigenvalues() const { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

    double min_eigenvalue() const { return eigenvalues_(0); }
    double max_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }

    /// Numerical proxy for invertibility: dim·ε·λ_max.
    double rank_tolerance() const {
        return static_cast<double>(dim()) * kEps * std::max(max_eigenvalue(), 0.0);
    }
    bool full_rank() const { return min_eigenvalue() > rank_tolerance(); }
    Index rank() const {
        const double tol = rank_tolerance();
        return (eigenvalues_.array() > tol).count();
    }

  private:
    DensityMatrix(ComplexMatrix m, RealVector evals, ComplexMatrix evecs)
        : matrix_(std::move(m)), eigenvalues_(std::move(evals)), eigenvectors_(std::move(evecs)) {}

    friend DensityMatrix regularize(const DensityMatrix&, double);
    friend DensityMatrix conjugate_by_unitary(const DensityMatrix&, const ComplexMatrix&);

    ComplexMatrix matrix_;
    RealVector eigenvalues_;
    ComplexMatrix eigenvectors_;
};

inline DensityMatrix validate_density(const ComplexMatrix& m) { return DensityMatrix::validate(m); }

/**
 * White-noise regularization ρ_ν = (1-ν)ρ + (ν/dim)·I for 0 < ν < 1.
 * Every eigenvalue of the result lies strictly inside (0, 1), so ρ_ν is
 * always invertible. Shares the eigenbasis of ρ, so the cached spectrum is
 * transformed instead of recomputed.
 */
inline DensityMatrix regularize(const DensityMatrix& rho, double nu) {
    if (!(nu > 0.0 && nu < 1.0)) {
        throw DomainError("regularize: nu = " + format_double(nu) + " is outside (0, 1)");
    }
    const double mix = nu / static_cast<double>(rho.dim());
    ComplexMatrix m = (1.0 - nu) * rho.matrix();
    m.diagonal().array() += mix;
    RealVector evals = (1.0 - nu) * rho.eigenvalues();
    evals.array() += mix;
    return DensityMatrix(std::move(m), std::move(evals), rho.eigenvectors());
}

/// U ρ U† without revalidation; the spectrum is invariant, the eigenbasis
/// rotates. U must be unitary (not checked).
inline DensityMatrix conjugate_by_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
    return DensityMatrix(hermitize(u * rho.matrix() * u.adjoint()), rho.eigenvalues(),
                         ComplexMatrix(u * rho.eigenvectors()));
}

/// Parameter derivatives ∂_i ρ at one evaluation point, one matrix per
/// parameter. Each entry must be Hermitian and traceless (derivative of a
/// unit-trace Hermitian family).
using DerivativeSet = std::vector<ComplexMatrix>;

namespace detail {

inline double derivative_tolerance(const ComplexMatrix& d) {
    return kDerivativeTolerance * std::max(1.0, max_abs(d));
}

inline void require_derivative(const ComplexMatrix& d, Index dim, const std::string& what) {
    if (d.rows() != dim || d.cols() != dim) {
        throw DimensionError(what + ": expected " + std::to_string(dim) + "x" +
                             std::to_string(dim) + ", got " + std::to_string(d.rows()) + "x" +
                             std::to_string(d.cols()));
    }
    if (!d.allFinite()) {
        throw ValidationError("finiteness", std::numeric_limits<double>::quiet_NaN(),
                              what + ": matrix contains NaN or Inf entries");
    }
    const double tol = derivative_tolerance(d);
    const double dev = hermiticity_deviation(d);
    if (dev > tol) {
        throw ValidationError("hermiticity", dev,
                              what + ": derivative is not Hermitian, max |D - D^dag| = " +
                                  format_double(dev));
    }
    const double tr = std::abs(d.trace());
    if (tr > tol) {
        throw ValidationError("tracelessness", tr,
                              what + ": derivative has |trace| = " + format_double(tr) +
                                  ", expected 0 within " + format_double(tol));
    }
}

inline void require_derivative_set(const DerivativeSet& d, Index dim, const char* what) {
    for (std::size_t i = 0; i < d.size(); ++i) {
        require_derivative(d[i], dim, std::string(what) + ": derivative " + std::to_string(i));
    }
}

/// Re-Hermitize and project out the trace; both drift under finite
/// differencing and must hold exactly for the solver formulas.
inline ComplexMatrix clean_derivative(const ComplexMatrix& d) {
    ComplexMatrix out = hermitize(d);
    out.diagonal().array() -= out.trace() / static_cast<double>(out.rows());
    return out;
}

} // namespace detail

/**
 * @brief A differentiable map from a real parameter vector ε to a density
 * matrix.
 *
 * When analytic_partials is non-empty it must hold one map per parameter
 * returning ∂_i ρ(ε); otherwise derivatives are obtained by central finite
 * differences. `evaluate` must be safe to call concurrently.
 */
struct StateFamily {
    int n_params = 0;
    Index dim = 0;
    std::function<DensityMatrix(const RealVector&)> evaluate;
    std::vector<std::function<ComplexMatrix(const RealVector&)>> analytic_partials;

    bool has_analytic() const { return !analytic_partials.empty(); }
};

namespace detail {

inline void require_family_point(const StateFamily& family, const RealVector& eps) {
    if (!family.evaluate) throw DomainError("state family has no evaluate map");
    if (eps.size() != family.n_params) {
        throw DimensionError("parameter vector has length " + std::to_string(eps.size()) +
                             ", family expects " + std::to_string(family.n_params));
    }
}

} // namespace detail

/**
 * Central-difference derivatives (ρ(ε+h·e_i) - ρ(ε-h·e_i)) / 2h with
 * per-parameter step h = cbrt(ε_machine)·max(1, |ε_i|). Results are
 * re-Hermitized and trace-projected.
 */
inline DerivativeSet finite_difference_derivatives(const StateFamily& family,
                                                   const RealVector& eps) {
    detail::require_family_point(family, eps);
    const double base_step = std::cbrt(kEps);
    DerivativeSet out;
    out.reserve(static_cast<std::size_t>(family.n_params));
    for (int i = 0; i < family.n_params; ++i) {
        const double h = base_step * std::max(1.0, std::abs(eps(i)));
        RealVector shifted = eps;
        try {
            shifted(i) = eps(i) + h;
            const ComplexMatrix plus = family.evaluate(shifted).matrix();
            shifted(i) = eps(i) - h;
            const ComplexMatrix minus = family.evaluate(shifted).matrix();
            out.push_back(detail::clean_derivative((plus - minus) / (2.0 * h)));
        } catch (const Error& e) {
            throw Error("finite_difference_derivatives: evaluation failed for parameter " +
                        std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

/// User-supplied analytic derivatives, validated Hermitian and traceless.
inline DerivativeSet analytic_derivatives(const StateFamily& family, const RealVector& eps) {
    detail::require_family_point(family, eps);
    if (family.analytic_partials.size() != static_cast<std::size_t>(family.n_params)) {
        throw DimensionError("family supplies " + std::to_string(family.analytic_partials.size()) +
                             " analytic partials for " + std::to_string(family.n_params) +
                             " parameters");
    }
    DerivativeSet out;
    out.reserve(family.analytic_partials.size());
    for (std::size_t i = 0; i < family.analytic_partials.size(); ++i) {
        ComplexMatrix d = family.analytic_partials[i](eps);
        detail::require_derivative(d, family.dim, "analytic derivative " + std::to_string(i));
        out.push_back(hermitize(d));
    }
    return out;
}

/// Analytic derivatives when the family has them, finite differences
/// otherwise.
inline DerivativeSet family_derivatives(const StateFamily& family, const RealVector& eps) {
    return family.has_analytic() ? analytic_derivatives(family, eps)
                                 : finite_difference_derivatives(family, eps);
}

/**
 * @brief Unitary parameter encoding ρ(ε) = U(ε) ρ₀ U(ε)† with
 * U(ε) = exp(-i Σ_j K_j ε_j) generated by Hermitian operators K_j.
 */
struct UnitaryEncoding {
    std::vector<ComplexMatrix> generators;
    DensityMatrix initial_state;
};

/// Largest entry magnitude over all pairwise commutators [K_i, K_j].
inline double max_pairwise_commutator(const std::vector<ComplexMatrix>& generators) {
    double worst = 0.0;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            worst = std::max(worst, max_abs(ComplexMatrix(generators[i] * generators[j] -
                                                          generators[j] * generators[i])));
        }
    }
    return worst;
}

namespace detail {

inline void require_encoding(const UnitaryEncoding& enc) {
    const Index dim = enc.initial_state.dim();
    for (std::size_t j = 0; j < enc.generators.size(); ++j) {
        const ComplexMatrix& k = enc.generators[j];
        if (k.rows() != dim || k.cols() != dim) {
            throw DimensionError("generator " + std::to_string(j) + " is " +
                                 std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                                 ", state dimension is " + std::to_string(dim));
        }
        require_hermitian(k, "unitary encoding generator");
    }
}

/// Commutation tolerance, scaled by the generator magnitudes.
inline double commutator_tolerance(const std::vector<ComplexMatrix>& generators) {
    double scale = 1.0;
    for (const auto& k : generators) scale = std::max(scale, max_abs(k) * max_abs(k));
    return 1e-10 * scale;
}

inline bool generators_commute(const std::vector<ComplexMatrix>& generators) {
    return max_pairwise_commutator(generators) <= commutator_tolerance(generators);
}

/// -i [K, ρ]; exactly Hermitian and traceless in exact arithmetic.
inline ComplexMatrix commutator_derivative(const ComplexMatrix& k, const ComplexMatrix& rho) {
    return clean_derivative(Complex(0.0, -1.0) * (k * rho - rho * k));
}

} // namespace detail

/// An encoded state together with its parameter derivatives.
struct EncodedState {
    DensityMatrix rho;
    DerivativeSet derivatives;
};

namespace detail {

/// The state of a unitary encoding at ε, without derivatives.
inline DensityMatrix encode_state(const UnitaryEncoding& enc, const RealVector& eps) {
    const Index dim = enc.initial_state.dim();
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (Index j = 0; j < eps.size(); ++j) total += eps(j) * enc.generators[j];
    return conjugate_by_unitary(enc.initial_state, unitary_exp_neg_i(total));
}

} // namespace detail

/**
 * Evaluates a unitary encoding at ε. The exponential U(ε) is applied
 * spectrally to the Hermitian total generator, so U is unitary to machine
 * precision. For pairwise-commuting generators the derivatives are analytic,
 * ∂_i ρ(ε) = U [-i K_i, ρ₀] U†; otherwise they fall back to central finite
 * differences over the encoded family.
 */
inline EncodedState encode_unitary(const UnitaryEncoding& enc, const RealVector& eps) {
    detail::require_encoding(enc);
    if (eps.size() != static_cast<Index>(enc.generators.size())) {
        throw DimensionError("encode_unitary: " + std::to_string(enc.generators.size()) +
                             " generators but " + std::to_string(eps.size()) + " parameters");
    }
    const Index dim = enc.initial_state.dim();
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (Index j = 0; j < eps.size(); ++j) total += eps(j) * enc.generators[j];
    const ComplexMatrix u = unitary_exp_neg_i(total);
    DensityMatrix rho = conjugate_by_unitary(enc.initial_state, u);

    DerivativeSet derivatives;
    if (detail::generators_commute(enc.generators)) {
        derivatives.reserve(enc.generators.size());
        for (const auto& k : enc.generators) {
            const ComplexMatrix c = detail::commutator_derivative(k, enc.initial_state.matrix());
            derivatives.push_back(detail::clean_derivative(u * c * u.adjoint()));
        }
    } else {
        StateFamily family;
        family.n_params = static_cast<int>(enc.generators.size());
        family.dim = dim;
        family.evaluate = [enc](const RealVector& point) { return detail::encode_state(enc, point); };
        derivatives = finite_difference_derivatives(family, eps);
    }
    return EncodedState{std::move(rho), std::move(derivatives)};
}

} // namespace qfim
