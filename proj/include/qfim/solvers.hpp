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
 * Every computational route to the quantum Fisher information matrix and the
 * symmetric logarithmic derivatives, plus the infinitesimal Bures distance
 * and a cross-method comparison harness.
 *
 * Routes and their domains:
 *  - vectorized        linear solve against ρ̄⊗I + I⊗ρ (full rank only)
 *  - eigen             spectral sum over eigenpairs (any rank)
 *  - eigen-matrix-form Kronecker similarity with a diagonal middle factor
 *                      (full rank only)
 *  - integral          quadrature of 2∫ tr[e^{-ρt} ∂_iρ e^{-ρt} ∂_jρ] dt
 *                      (full rank only)
 *  - regularized-limit ν→0 limit over states (1-ν)ρ + (ν/dim)I (any rank)
 *  - pseudoinverse     Moore-Penrose variant of the linear solve (any rank)
 *
 * All QFIMs are returned exactly real symmetric; the discarded imaginary
 * residue and pre-symmetrization asymmetry are surfaced in diagnostics.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfim/linalg.hpp"
#include "qfim/states.hpp"
#include "qfim/types.hpp"

namespace qfim {

enum class Method {
    vectorized,
    eigen,
    eigen_matrix_form,
    integral,
    regularized_limit,
    pseudoinverse,
};

inline constexpr Method kAllMethods[] = {
    Method::vectorized,       Method::eigen,             Method::eigen_matrix_form,
    Method::integral,         Method::regularized_limit, Method::pseudoinverse,
};

inline constexpr std::string_view method_name(Method m) {
    switch (m) {
        case Method::vectorized: return "vectorized";
        case Method::eigen: return "eigen";
        case Method::eigen_matrix_form: return "eigen-matrix-form";
        case Method::integral: return "integral";
        case Method::regularized_limit: return "regularized-limit";
        case Method::pseudoinverse: return "pseudoinverse";
    }
    return "unknown";
}

/// Geometric ν schedule for the regularized limit: ν_k = nu0·ratio^k,
/// k = 0..max_steps-1. Convergence is declared when successive iterates (raw
/// or Richardson-extrapolated) differ by less than tol_limit in scaled
/// max-norm.
struct NuSchedule {
    double nu0 = 1e-3;
    double ratio = 0.1;
    int max_steps = 6;
    double tol_limit = 1e-7;
};

/// Gauss-Legendre quadrature controls for the integral route. Panels are
/// graded dyadically from ~1/(2λ_max) up to t_max_factor/λ_min and split
/// until successive estimates agree to tol in scaled max-norm.
struct QuadratureSpec {
    int nodes = 32;
    double t_max_factor = 50.0;
    double tol = 1e-9;
    int max_refinements = 12;
};

struct Diagnostics {
    /// max |H_raw^{ij} - H_raw^{ji}| before symmetrization.
    double max_asymmetry = 0.0;
    /// max over i of max-norm of (L_i ρ + ρ L_i)/2 - ∂_i ρ; only meaningful
    /// when SLDs are emitted.
    double max_lyapunov_residual = 0.0;
    /// max |Im H_raw^{ij}| discarded when making H real.
    double imag_discard = 0.0;
    /// ν values actually evaluated by the regularized limit.
    std::optional<std::vector<double>> nu_sequence_used;
};

struct QfimResult {
    RealMatrix h; ///< real symmetric, PSD up to -1e-8 on eigenvalues
    std::optional<std::vector<ComplexMatrix>> slds;
    Method method = Method::vectorized;
    Diagnostics diagnostics;
};

/// Matrix of the superoperator X ↦ ρX + Xρ acting on vec(X):
/// conj(ρ) ⊗ I + I ⊗ ρ. Hermitian PSD with eigenvalues λ_k + λ_l; invertible
/// exactly when ρ is.
inline ComplexMatrix anticommutator_matrix(const DensityMatrix& rho) {
    const Index n = rho.dim();
    const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
    return kron(rho.matrix().conjugate(), identity) + kron(identity, rho.matrix());
}

namespace detail {

inline void require_full_rank(const DensityMatrix& rho, const char* what) {
    if (!rho.full_rank()) {
        throw SingularityError(rho.min_eigenvalue(),
                               std::string(what) + ": density matrix is rank-deficient (smallest "
                                                   "eigenvalue " +
                                   format_double(rho.min_eigenvalue()) +
                                   "); use the eigen, regularized-limit, or pseudoinverse route");
    }
}

/// Columns are vec(∂_i ρ).
inline ComplexMatrix derivative_columns(const DerivativeSet& d, Index dim) {
    ComplexMatrix cols(dim * dim, static_cast<Index>(d.size()));
    for (std::size_t j = 0; j < d.size(); ++j) cols.col(static_cast<Index>(j)) = vectorize(d[j]);
    return cols;
}

/// Turns the raw (complex, nearly Hermitian) quadratic-form matrix into the
/// exactly real symmetric QFIM, recording what was discarded.
inline RealMatrix finish_qfim(const ComplexMatrix& h_raw, Diagnostics& diag) {
    diag.imag_discard = h_raw.size() ? h_raw.imag().cwiseAbs().maxCoeff() : 0.0;
    diag.max_asymmetry = max_abs(ComplexMatrix(h_raw - h_raw.transpose()));
    RealMatrix real = h_raw.real();
    return 0.5 * (real + real.transpose());
}

inline double lyapunov_residual(const ComplexMatrix& rho, const ComplexMatrix& sld,
                                const ComplexMatrix& drho) {
    return max_abs(ComplexMatrix(0.5 * (sld * rho + rho * sld) - drho));
}

/// SLDs from the solved columns X (vec(L_i) = 2 X.col(i)), with the worst
/// Lyapunov residual recorded.
inline std::vector<ComplexMatrix> slds_from_columns(const ComplexMatrix& x, const DensityMatrix& rho,
                                                    const DerivativeSet& d, Diagnostics& diag) {
    std::vector<ComplexMatrix> slds;
    slds.reserve(d.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        ComplexMatrix sld = hermitize(unvectorize(2.0 * x.col(static_cast<Index>(i)), rho.dim()));
        worst = std::max(worst, lyapunov_residual(rho.matrix(), sld, d[i]));
        slds.push_back(std::move(sld));
    }
    diag.max_lyapunov_residual = worst;
    return slds;
}

/// Shared core of the vectorized and pseudoinverse routes:
/// H^{ij} = 2 vec(∂_i ρ)† X_j with M X_j = vec(∂_j ρ).
inline QfimResult qfim_from_solver(const DensityMatrix& rho, const DerivativeSet& d, Method method,
                                   bool pseudo, bool want_slds) {
    require_derivative_set(d, rho.dim(), method == Method::pseudoinverse ? "qfim_pseudoinverse"
                                                                         : "qfim_vectorized");
    const ComplexMatrix m = anticommutator_matrix(rho);
    const ComplexMatrix b = derivative_columns(d, rho.dim());
    const ComplexMatrix x = pseudo ? pseudoinverse_apply(m, b) : solve_hpd(m, b);
    QfimResult result;
    result.method = method;
    result.h = finish_qfim(2.0 * (b.adjoint() * x), result.diagnostics);
    if (want_slds) result.slds = slds_from_columns(x, rho, d, result.diagnostics);
    return result;
}

inline double scaled_max_norm(const RealMatrix& a) { return std::max(1.0, max_abs(a)); }

inline void require_nu_schedule(const NuSchedule& nu) {
    if (!(nu.nu0 > 0.0 && nu.nu0 < 1.0)) {
        throw DomainError("nu schedule: nu0 = " + format_double(nu.nu0) + " is outside (0, 1)");
    }
    if (!(nu.ratio > 0.0 && nu.ratio < 1.0)) {
        throw DomainError("nu schedule: ratio = " + format_double(nu.ratio) +
                          " is outside (0, 1)");
    }
    if (nu.max_steps < 2) {
        throw DomainError("nu schedule: max_steps = " + std::to_string(nu.max_steps) +
                          " but at least 2 iterates are needed");
    }
}

inline void require_quadrature(const QuadratureSpec& quad) {
    if (quad.nodes < 8) {
        throw DomainError("quadrature: nodes = " + std::to_string(quad.nodes) +
                          " but at least 8 are required");
    }
    if (!(quad.t_max_factor > 0.0) || !(quad.tol > 0.0) || quad.max_refinements < 1) {
        throw DomainError("quadrature: t_max_factor, tol, and max_refinements must be positive");
    }
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendreRule gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            deriv = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / deriv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

} // namespace detail

/**
 * Symmetric logarithmic derivative for one parameter, from the linear system
 * vec(L) = 2 (ρ̄⊗I + I⊗ρ)⁻¹ vec(∂ρ). The result is re-Hermitized and solves
 * (Lρ + ρL)/2 = ∂ρ up to the solver residual. Requires full rank.
 */
inline ComplexMatrix sld_vectorized(const DensityMatrix& rho, const ComplexMatrix& drho) {
    detail::require_derivative(drho, rho.dim(), "sld_vectorized");
    detail::require_full_rank(rho, "sld_vectorized");
    const ComplexVector x = solve_hpd(anticommutator_matrix(rho), vectorize(drho));
    return hermitize(unvectorize(2.0 * x, rho.dim()));
}

/**
 * QFIM by one Cholesky factorization of ρ̄⊗I + I⊗ρ:
 * H^{ij} = 2 vec(∂_i ρ)† M⁻¹ vec(∂_j ρ), with the SLDs recovered from the
 * same solve. Works in any basis; requires full rank.
 */
inline QfimResult qfim_vectorized(const DensityMatrix& rho, const DerivativeSet& d) {
    detail::require_full_rank(rho, "qfim_vectorized");
    return detail::qfim_from_solver(rho, d, Method::vectorized, /*pseudo=*/false,
                                    /*want_slds=*/true);
}

/**
 * Spectral-sum QFIM over eigenpairs of ρ = Σ p_k |k⟩⟨k|:
 * H^{ij} = 2 Σ_{p_k+p_l > 0} ⟨k|∂_iρ|l⟩⟨l|∂_jρ|k⟩ / (p_k + p_l).
 *
 * Handles rank-deficient states by omitting pairs with p_k + p_l below
 * dim·ε. SLDs are assembled in the eigenbasis on the admitted pairs and
 * rotated back; for valid rank-preserving families the omitted pairs carry
 * no derivative weight and the Lyapunov residual stays at roundoff.
 */
inline QfimResult qfim_eigen(const DensityMatrix& rho, const DerivativeSet& d) {
    detail::require_derivative_set(d, rho.dim(), "qfim_eigen");
    const Index n = rho.dim();
    const Index k = static_cast<Index>(d.size());
    const RealVector& p = rho.eigenvalues();
    const ComplexMatrix& u = rho.eigenvectors();
    const double tol_sum = static_cast<double>(n) * kEps;

    std::vector<ComplexMatrix> rotated(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) rotated[i] = u.adjoint() * d[i] * u;

    ComplexMatrix h_raw = ComplexMatrix::Zero(k, k);
    std::vector<ComplexMatrix> slds_eig(d.size(), ComplexMatrix::Zero(n, n));
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            const double s = p(a) + p(b);
            if (s <= tol_sum) continue;
            for (Index i = 0; i < k; ++i) {
                const Complex left = rotated[static_cast<std::size_t>(i)](a, b);
                slds_eig[static_cast<std::size_t>(i)](a, b) = 2.0 * left / s;
                for (Index j = 0; j < k; ++j) {
                    h_raw(i, j) += 2.0 * left * rotated[static_cast<std::size_t>(j)](b, a) / s;
                }
            }
        }
    }

    QfimResult result;
    result.method = Method::eigen;
    result.h = detail::finish_qfim(h_raw, result.diagnostics);
    std::vector<ComplexMatrix> slds;
    slds.reserve(d.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        ComplexMatrix sld = hermitize(u * slds_eig[i] * u.adjoint());
        worst = std::max(worst, detail::lyapunov_residual(rho.matrix(), sld, d[i]));
        slds.push_back(std::move(sld));
    }
    result.diagnostics.max_lyapunov_residual = worst;
    result.slds = std::move(slds);
    return result;
}

/**
 * The combined route: diagonalize ρ = U D U† once, then evaluate
 * H^{ij} = 2 vec(∂_iρ)† (Ū⊗U) (D⊗I + I⊗D)⁻¹ (Ū⊗U)† vec(∂_jρ)
 * with the Kronecker factors materialized and the diagonal middle factor
 * inverted entrywise. Requires full rank.
 */
inline QfimResult qfim_eigen_matrix_form(const DensityMatrix& rho, const DerivativeSet& d) {
    detail::require_derivative_set(d, rho.dim(), "qfim_eigen_matrix_form");
    detail::require_full_rank(rho, "qfim_eigen_matrix_form");
    const Index n = rho.dim();
    const RealVector& p = rho.eigenvalues();
    const ComplexMatrix v = kron(rho.eigenvectors().conjugate(), rho.eigenvectors());

    ComplexVector inverse_sums(n * n);
    for (Index m = 0; m < n * n; ++m) inverse_sums(m) = 1.0 / (p(m / n) + p(m % n));

    const ComplexMatrix b = detail::derivative_columns(d, n);
    const ComplexMatrix y = v.adjoint() * b;
    const ComplexMatrix z = inverse_sums.asDiagonal() * y;

    QfimResult result;
    result.method = Method::eigen_matrix_form;
    result.h = detail::finish_qfim(2.0 * (y.adjoint() * z), result.diagnostics);
    result.slds = detail::slds_from_columns(v * z, rho, d, result.diagnostics);
    return result;
}

/**
 * Quadrature of the integral representation
 * H^{ij} = 2 ∫₀^∞ tr[e^{-ρt} ∂_iρ e^{-ρt} ∂_jρ] dt,
 * truncated at T = t_max_factor/λ_min where the integrand has decayed below
 * e^{-2·t_max_factor}. Panels are graded dyadically (each spans at most one
 * doubling of t) so the mixed decay scales e^{-(p_k+p_l)t} are all resolved;
 * every panel is split in half per refinement round until two successive
 * estimates agree.
 *
 * This route exists as an independent cross-check of the solver-based
 * formulas; it emits no SLDs. Diverges on rank-deficient input.
 */
inline QfimResult qfim_integral(const DensityMatrix& rho, const DerivativeSet& d,
                                const QuadratureSpec& quad = {}) {
    detail::require_quadrature(quad);
    detail::require_derivative_set(d, rho.dim(), "qfim_integral");
    if (!rho.full_rank()) {
        throw SingularityError(rho.min_eigenvalue(),
                               "qfim_integral: integrand does not decay for a rank-deficient "
                               "density matrix (smallest eigenvalue " +
                                   format_double(rho.min_eigenvalue()) + ")");
    }
    const Index k = static_cast<Index>(d.size());
    const RealVector& p = rho.eigenvalues();
    const ComplexMatrix& u = rho.eigenvectors();

    const double t_max = quad.t_max_factor / rho.min_eigenvalue();
    std::vector<double> edges{0.0, std::min(0.5 / rho.max_eigenvalue(), t_max)};
    while (edges.back() < t_max) edges.push_back(std::min(2.0 * edges.back(), t_max));

    const detail::GaussLegendreRule rule = detail::gauss_legendre(quad.nodes);

    const auto integrand = [&](double t, ComplexMatrix& acc, double weight) {
        const ComplexVector decay_vals = (-t * p.array()).exp().matrix().cast<Complex>();
        const ComplexMatrix decay = u * decay_vals.asDiagonal() * u.adjoint();
        std::vector<ComplexMatrix> mid(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) mid[i] = decay * d[i] * decay;
        for (Index i = 0; i < k; ++i) {
            for (Index j = 0; j < k; ++j) {
                acc(i, j) +=
                    weight * 2.0 * (mid[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)]).trace();
            }
        }
    };

    RealMatrix previous;
    Diagnostics diag;
    int splits = 1;
    std::vector<RealMatrix> history;
    for (int round = 0; round <= quad.max_refinements; ++round) {
        ComplexMatrix h_raw = ComplexMatrix::Zero(k, k);
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            for (int s = 0; s < splits; ++s) {
                const double lo = edges[e] + (edges[e + 1] - edges[e]) * s / splits;
                const double hi = edges[e] + (edges[e + 1] - edges[e]) * (s + 1) / splits;
                const double mid_t = 0.5 * (hi + lo);
                const double half = 0.5 * (hi - lo);
                for (int q = 0; q < quad.nodes; ++q) {
                    integrand(mid_t + half * rule.nodes[static_cast<std::size_t>(q)], h_raw,
                              half * rule.weights[static_cast<std::size_t>(q)]);
                }
            }
        }
        Diagnostics round_diag;
        RealMatrix h = detail::finish_qfim(h_raw, round_diag);
        history.push_back(h);
        if (round > 0 && max_abs(RealMatrix(h - previous)) <= quad.tol * detail::scaled_max_norm(h)) {
            QfimResult result;
            result.method = Method::integral;
            result.h = std::move(h);
            result.diagnostics = round_diag;
            return result;
        }
        previous = std::move(h);
        splits *= 2;
    }
    throw ConvergenceError(std::move(history),
                           "qfim_integral: quadrature did not settle within " +
                               std::to_string(quad.max_refinements) + " refinement rounds");
}

/**
 * The ν→0 limit for arbitrary (including rank-deficient) states:
 * H = 2 lim_{ν→0} vec(∂_iρ_ν)† (ρ̄_ν⊗I + I⊗ρ_ν)⁻¹ vec(∂_jρ_ν)
 * over ρ_ν = (1-ν)ρ + (ν/dim)I, with ∂_iρ_ν = (1-ν)∂_iρ.
 *
 * Iterates over the geometric ν schedule; convergence is declared when
 * successive raw iterates, or successive two-point Richardson extrapolants
 * (which cancel the O(ν) term), differ by less than tol_limit in scaled
 * max-norm. The extrapolated matrix is returned. The ν values actually used
 * are recorded in diagnostics. Throws ConvergenceError with the iterate
 * history when the schedule is exhausted; at rank-deficient points with
 * derivatives that do not come from a rank-preserving family this limit can
 * genuinely diverge (a removable discontinuity of the metric), which callers
 * may want to surface rather than suppress.
 */
inline QfimResult qfim_regularized_limit(const DensityMatrix& rho, const DerivativeSet& d,
                                         const NuSchedule& schedule = {}) {
    detail::require_nu_schedule(schedule);
    detail::require_derivative_set(d, rho.dim(), "qfim_regularized_limit");

    std::vector<RealMatrix> history;
    std::vector<double> nus;
    RealMatrix extrapolated_prev;
    Diagnostics last_diag;
    double nu = schedule.nu0;
    for (int step = 0; step < schedule.max_steps; ++step, nu *= schedule.ratio) {
        const DensityMatrix rho_nu = regularize(rho, nu);
        DerivativeSet d_nu;
        d_nu.reserve(d.size());
        for (const auto& drho : d) d_nu.push_back((1.0 - nu) * drho);

        QfimResult iterate = detail::qfim_from_solver(rho_nu, d_nu, Method::regularized_limit,
                                                      /*pseudo=*/false, /*want_slds=*/false);
        last_diag = iterate.diagnostics;
        history.push_back(std::move(iterate.h));
        nus.push_back(nu);

        if (step >= 1) {
            const double nu_prev = nus[static_cast<std::size_t>(step - 1)];
            const RealMatrix& h_prev = history[static_cast<std::size_t>(step - 1)];
            const RealMatrix& h_cur = history[static_cast<std::size_t>(step)];
            // linear-in-ν Richardson: value at ν = 0 from the last two iterates
            RealMatrix extrapolated = (h_cur * nu_prev - h_prev * nu) / (nu_prev - nu);
            const double scale = detail::scaled_max_norm(h_cur);
            const bool raw_converged =
                max_abs(RealMatrix(h_cur - h_prev)) < schedule.tol_limit * scale;
            const bool ext_converged =
                step >= 2 && max_abs(RealMatrix(extrapolated - extrapolated_prev)) <
                                 schedule.tol_limit * scale;
            if (raw_converged || ext_converged) {
                QfimResult result;
                result.method = Method::regularized_limit;
                result.h = 0.5 * (extrapolated + extrapolated.transpose());
                result.diagnostics = last_diag;
                result.diagnostics.nu_sequence_used = nus;
                return result;
            }
            extrapolated_prev = std::move(extrapolated);
        }
    }
    throw ConvergenceError(std::move(history),
                           "qfim_regularized_limit: no convergence within " +
                               std::to_string(schedule.max_steps) +
                               " steps (nu down to " + format_double(nus.back()) +
                               "); the limit may not exist at this point");
}

/**
 * Moore-Penrose variant of the linear-solve route, valid for any rank:
 * H^{ij} = 2 vec(∂_iρ)† (ρ̄⊗I + I⊗ρ)⁺ vec(∂_jρ).
 * Coincides with qfim_vectorized on full-rank states. SLDs are the
 * minimal-norm solutions; their Lyapunov residual is recorded and is only
 * guaranteed small for full-rank input.
 */
inline QfimResult qfim_pseudoinverse(const DensityMatrix& rho, const DerivativeSet& d) {
    return detail::qfim_from_solver(rho, d, Method::pseudoinverse, /*pseudo=*/true,
                                    /*want_slds=*/true);
}

/**
 * QFIM for parameters encoded as ρ(ε) = U(ε) ρ₀ U(ε)† with pairwise
 * commuting Hermitian generators, in which case the QFIM is independent of ε:
 * H^{ij} = 2 vec([K_i,ρ₀])† (ρ̄₀⊗I + I⊗ρ₀)⁻¹ vec([K_j,ρ₀]).
 *
 * For rank-deficient ρ₀ the same commutator derivatives are pushed through
 * the ν-regularized limit (where [K, ρ_{0ν}] = (1-ν)[K, ρ₀]). The reported
 * method reflects the path taken. Non-commuting generators raise DomainError
 * carrying the largest commutator norm.
 */
inline QfimResult qfim_unitary_commuting(const UnitaryEncoding& enc,
                                         const NuSchedule& schedule = {}) {
    detail::require_encoding(enc);
    const double worst = max_pairwise_commutator(enc.generators);
    if (worst > detail::commutator_tolerance(enc.generators)) {
        throw DomainError("qfim_unitary_commuting: generators do not commute, max commutator "
                          "norm = " +
                          format_double(worst));
    }
    DerivativeSet d;
    d.reserve(enc.generators.size());
    for (const auto& k : enc.generators) {
        d.push_back(detail::commutator_derivative(k, enc.initial_state.matrix()));
    }
    if (enc.initial_state.full_rank()) {
        return qfim_vectorized(enc.initial_state, d);
    }
    return qfim_regularized_limit(enc.initial_state, d, schedule);
}

/**
 * Squared infinitesimal Bures distance between ρ and ρ + dρ:
 * d_B² = (1/2) vec(dρ)† (ρ̄⊗I + I⊗ρ)⁻¹ vec(dρ).
 * Equal to (1/4) Σ_{ij} H^{ij} dε_i dε_j when dρ = Σ_i ∂_iρ dε_i.
 * Requires full rank and a Hermitian traceless dρ.
 */
inline double bures_infinitesimal(const DensityMatrix& rho, const ComplexMatrix& drho_total) {
    detail::require_derivative(drho_total, rho.dim(), "bures_infinitesimal");
    detail::require_full_rank(rho, "bures_infinitesimal");
    const ComplexVector b = vectorize(hermitize(drho_total));
    const ComplexVector x = solve_hpd(anticommutator_matrix(rho), b);
    return 0.5 * b.dot(x).real();
}

/// One method's entry in a comparison report.
struct MethodRun {
    Method method = Method::vectorized;
    bool ok = false;
    RealMatrix h;
    std::string error;
    double seconds = 0.0;
};

struct CompareReport {
    std::vector<MethodRun> runs; ///< fixed order: the order of kAllMethods
    /// Pairwise relative max-norm deviations between successful runs, indexed
    /// like kAllMethods; NaN where either side failed.
    RealMatrix deviations;
    double max_relative_deviation = 0.0;
    std::vector<std::pair<Method, Method>> flagged; ///< pairs above tolerance
    double tolerance = 1e-6;
    bool all_within_tolerance = true;
};

/// ‖a-b‖_max / max(‖a‖_max, ‖b‖_max); 0 when both vanish.
inline double relative_deviation(const RealMatrix& a, const RealMatrix& b) {
    const double scale = std::max(max_abs(a), max_abs(b));
    if (scale == 0.0) return 0.0;
    return max_abs(RealMatrix(a - b)) / scale;
}

/**
 * Runs every route on the same input, records per-method timings and
 * failures (failures are reported, never rethrown), and flags any pair of
 * successful results whose relative max-norm deviation exceeds 1e-6.
 * The report ordering is deterministic.
 */
inline CompareReport compare_methods(const DensityMatrix& rho, const DerivativeSet& d,
                                     const NuSchedule& schedule = {},
                                     const QuadratureSpec& quad = {}) {
    CompareReport report;
    constexpr std::size_t n_methods = std::size(kAllMethods);
    for (Method method : kAllMethods) {
        MethodRun run;
        run.method = method;
        const auto start = std::chrono::steady_clock::now();
        try {
            QfimResult result;
            switch (method) {
                case Method::vectorized: result = qfim_vectorized(rho, d); break;
                case Method::eigen: result = qfim_eigen(rho, d); break;
                case Method::eigen_matrix_form: result = qfim_eigen_matrix_form(rho, d); break;
                case Method::integral: result = qfim_integral(rho, d, quad); break;
                case Method::regularized_limit:
                    result = qfim_regularized_limit(rho, d, schedule);
                    break;
                case Method::pseudoinverse: result = qfim_pseudoinverse(rho, d); break;
            }
            run.ok = true;
            run.h = std::move(result.h);
        } catch (const Error& e) {
            run.ok = false;
            run.error = e.what();
        }
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.runs.push_back(std::move(run));
    }

    report.deviations =
        RealMatrix::Constant(n_methods, n_methods, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n_methods; ++i) {
        if (!report.runs[i].ok) continue;
        report.deviations(static_cast<Index>(i), static_cast<Index>(i)) = 0.0;
        for (std::size_t j = i + 1; j < n_methods; ++j) {
            if (!report.runs[j].ok) continue;
            const double dev = relative_deviation(report.runs[i].h, report.runs[j].h);
            report.deviations(static_cast<Index>(i), static_cast<Index>(j)) = dev;
            report.deviations(static_cast<Index>(j), static_cast<Index>(i)) = dev;
            report.max_relative_deviation = std::max(report.max_relative_deviation, dev);
            if (dev > report.tolerance) {
                report.flagged.emplace_back(kAllMethods[i], kAllMethods[j]);
            }
        }
    }
    report.all_within_tolerance = report.flagged.empty();
    return report;
}

/// Method selection for the top-level dispatcher.
enum class Strategy {
    automatic,
    vectorized,
    eigen,
    eigen_matrix_form,
    integral,
    regularized_limit,
    pseudoinverse,
};

struct MethodChoice {
    Strategy strategy = Strategy::automatic;
    NuSchedule nu;
    QuadratureSpec quadrature;
};

/// Agreement threshold between the eigen and regularized-limit values at a
/// rank-deficient point before a removable-discontinuity warning is raised.
inline constexpr double kDiscontinuityTolerance = 1e-5;

/// Dispatcher output. At rank-deficient points the automatic strategy
/// confirms the spectral-sum value against the regularized limit;
/// cross_check carries that confirming run whenever it converged. If the two
/// disagree beyond kDiscontinuityTolerance (or the limit fails to converge),
/// the warning fires and both values are reported instead of silently
/// choosing.
struct ComputeOutcome {
    QfimResult result;
    std::optional<QfimResult> cross_check;
    bool discontinuity_warning = false;
    std::string warning;
};

inline ComputeOutcome compute_qfim(const DensityMatrix& rho, const DerivativeSet& d,
                                   const MethodChoice& choice = {}) {
    ComputeOutcome outcome;
    switch (choice.strategy) {
        case Strategy::vectorized: outcome.result = qfim_vectorized(rho, d); return outcome;
        case Strategy::eigen: outcome.result = qfim_eigen(rho, d); return outcome;
        case Strategy::eigen_matrix_form:
            outcome.result = qfim_eigen_matrix_form(rho, d);
            return outcome;
        case Strategy::integral: outcome.result = qfim_integral(rho, d, choice.quadrature); return outcome;
        case Strategy::regularized_limit:
            outcome.result = qfim_regularized_limit(rho, d, choice.nu);
            return outcome;
        case Strategy::pseudoinverse: outcome.result = qfim_pseudoinverse(rho, d); return outcome;
        case Strategy::automatic: break;
    }
    if (rho.full_rank()) {
        outcome.result = qfim_vectorized(rho, d);
        return outcome;
    }
    outcome.result = qfim_eigen(rho, d);
    try {
        QfimResult limit = qfim_regularized_limit(rho, d, choice.nu);
        const double dev = max_abs(RealMatrix(limit.h - outcome.result.h));
        if (dev > kDiscontinuityTolerance * detail::scaled_max_norm(outcome.result.h)) {
            outcome.discontinuity_warning = true;
            outcome.warning = "eigen and regularized-limit values differ by " +
                              format_double(dev) +
                              " at a rank-deficient point (removable discontinuity); both are "
                              "reported";
        }
        outcome.cross_check = std::move(limit);
    } catch (const ConvergenceError& e) {
        outcome.discontinuity_warning = true;
        outcome.warning = std::string("regularized limit did not converge at a rank-deficient "
                                      "point (likely removable discontinuity): ") +
                          e.what();
    }
    return outcome;
}

/// Dispatcher for unitary encodings. Commuting generators with the automatic
/// strategy use the parameter-independent commutator form; anything else
/// expands the encoding at ε and dispatches on the state and derivatives.
inline ComputeOutcome compute_qfim(const UnitaryEncoding& enc, const RealVector& eps,
                                   const MethodChoice& choice = {}) {
    if (choice.strategy == Strategy::automatic && detail::generators_commute(enc.generators)) {
        ComputeOutcome outcome;
        outcome.result = qfim_unitary_commuting(enc, choice.nu);
        return outcome;
    }
    const EncodedState encoded = encode_unitary(enc, eps);
    return compute_qfim(encoded.rho, encoded.derivatives, choice);
}

} // namespace qfim
