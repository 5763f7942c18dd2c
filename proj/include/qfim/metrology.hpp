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
 * Quantum Cramér-Rao analysis: the covariance bound Cov(ε̂) ≥ H⁻¹, its
 * scalar consequences via the Sylvester criterion, and the optimal
 * measurement bases read off the SLD eigenvectors.
 */

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qfim/linalg.hpp"
#include "qfim/solvers.hpp"
#include "qfim/types.hpp"

namespace qfim {

/// One scalar inequality implied by Cov(ε̂) - H⁻¹ ⪰ 0.
struct ScalarConstraint {
    enum class Kind {
        variance_floor,     ///< Var(ε̂_i) ≥ (H⁻¹)_{ii}
        covariance_product, ///< 2x2 determinant condition in product form
        principal_minor,    ///< det of the leading k×k of Cov - H⁻¹ ≥ 0
    };
    Kind kind = Kind::variance_floor;
    std::vector<int> params; ///< parameter indices involved (for minors: 0..k-1)
    std::string text;        ///< human-readable rendering
};

struct CrbReport {
    RealMatrix h_inverse;        ///< covariance lower bound (pseudoinverse if singular)
    RealVector variance_floors;  ///< (H⁻¹)_{ii}
    std::vector<ScalarConstraint> constraints;
    std::vector<ComplexMatrix> optimal_bases; ///< per parameter; empty without SLDs
    std::vector<std::string> parameter_names;
    bool identifiable = true; ///< false when H is singular
    RealMatrix null_space;    ///< columns span unidentifiable parameter combinations

    /// Evaluates one constraint against a covariance matrix.
    bool constraint_satisfied(std::size_t index, const RealMatrix& cov) const {
        const ScalarConstraint& c = constraints.at(index);
        switch (c.kind) {
            case ScalarConstraint::Kind::variance_floor: {
                const int i = c.params.at(0);
                return cov(i, i) >= h_inverse(i, i);
            }
            case ScalarConstraint::Kind::covariance_product: {
                const int i = c.params.at(0);
                const int j = c.params.at(1);
                const double gap_i = cov(i, i) - h_inverse(i, i);
                const double gap_j = cov(j, j) - h_inverse(j, j);
                const double cross = cov(i, j) - h_inverse(i, j);
                return cross * cross <= gap_i * gap_j;
            }
            case ScalarConstraint::Kind::principal_minor: {
                const Index k = static_cast<Index>(c.params.size());
                const RealMatrix gap = cov - h_inverse;
                return gap.topLeftCorner(k, k).determinant() >= 0.0;
            }
        }
        return false;
    }

    std::vector<bool> check(const RealMatrix& cov) const {
        std::vector<bool> out(constraints.size());
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            out[i] = constraint_satisfied(i, cov);
        }
        return out;
    }
};

/**
 * Eigenbases of the SLDs: the measurement that saturates the per-parameter
 * bound. Each basis is orthonormal with a fixed phase convention: every
 * vector is scaled so its largest-magnitude entry (first such index on ties)
 * is real and positive. Within degenerate eigenspaces only the projectors
 * are meaningful.
 */
/// First index whose magnitude is within one part in 1e9 of the maximum.
/// Exact-magnitude ties (common in measurement bases, e.g. (±e^{iθ}, 1)/√2)
/// must resolve to the same pivot regardless of last-ulp noise.
inline Index phase_pivot(const ComplexVector& v) {
    const double top = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= top * (1.0 - 1e-9)) return i;
    }
    return 0;
}

inline std::vector<ComplexMatrix> optimal_bases(const std::vector<ComplexMatrix>& slds) {
    std::vector<ComplexMatrix> bases;
    bases.reserve(slds.size());
    for (const auto& sld : slds) {
        HermitianEig eig = hermitian_eig(sld);
        ComplexMatrix basis = std::move(eig.eigenvectors);
        for (Index col = 0; col < basis.cols(); ++col) {
            const Complex entry = basis(phase_pivot(basis.col(col)), col);
            if (std::abs(entry) > 0.0) basis.col(col) *= std::conj(entry) / std::abs(entry);
        }
        bases.push_back(std::move(basis));
    }
    return bases;
}

namespace detail {

inline std::string default_name(int i) { return "e" + std::to_string(i + 1); }

inline std::string floor_text(const std::string& name, double floor) {
    return "Var(" + name + ") >= " + format_double(floor);
}

inline std::string product_text(const std::string& a, const std::string& b, double floor_a,
                                double floor_b, double cross) {
    const std::string cov = "Cov(" + a + "," + b + ")";
    const std::string lhs =
        std::abs(cross) > 0.0 ? "(" + cov + " - " + format_double(cross) + ")^2" : cov + "^2";
    return lhs + " <= (Var(" + a + ") - " + format_double(floor_a) + ")*(Var(" + b + ") - " +
           format_double(floor_b) + ")";
}

} // namespace detail

/**
 * Cramér-Rao report from a QFIM. For invertible H the full bound H⁻¹ is
 * computed spectrally (and exactly symmetrized); for singular H the report
 * is restricted to the identifiable subspace, with the null-space basis of
 * unidentifiable parameter combinations attached.
 *
 * Rendered constraints: for one parameter the variance floor; for two, the
 * three scalar inequalities of the 2x2 Sylvester criterion (both floors and
 * the covariance product bound); for more, per-parameter floors plus the
 * leading-principal-minor conditions of order 2..n evaluated against a
 * user-supplied covariance via CrbReport::check.
 */
inline CrbReport cramer_rao(const QfimResult& qfim, std::vector<std::string> parameter_names = {}) {
    const Index n = qfim.h.rows();
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(qfim.h);
    if (solver.info() != Eigen::Success) {
        throw Error("cramer_rao: eigensolver failed on the QFIM");
    }
    const RealVector& evals = solver.eigenvalues();
    const RealMatrix& evecs = solver.eigenvectors();
    const double lambda_max = evals.size() ? std::max(evals(evals.size() - 1), 0.0) : 0.0;
    const double tol = static_cast<double>(n) * kEps * lambda_max;

    CrbReport report;
    report.identifiable = evals.size() ? evals(0) > tol : true;

    RealVector inverted = RealVector::Zero(n);
    Index null_count = 0;
    for (Index k = 0; k < n; ++k) {
        if (evals(k) > tol) {
            inverted(k) = 1.0 / evals(k);
        } else {
            ++null_count;
        }
    }
    RealMatrix h_inverse = evecs * inverted.asDiagonal() * evecs.transpose();
    report.h_inverse = 0.5 * (h_inverse + h_inverse.transpose());
    report.variance_floors = report.h_inverse.diagonal();
    report.null_space = evecs.leftCols(null_count);

    report.parameter_names = std::move(parameter_names);
    for (int i = static_cast<int>(report.parameter_names.size()); i < n; ++i) {
        report.parameter_names.push_back(detail::default_name(i));
    }

    const auto& names = report.parameter_names;
    for (int i = 0; i < n; ++i) {
        ScalarConstraint floor;
        floor.kind = ScalarConstraint::Kind::variance_floor;
        floor.params = {i};
        floor.text = detail::floor_text(names[static_cast<std::size_t>(i)],
                                        report.variance_floors(i));
        report.constraints.push_back(std::move(floor));
    }
    if (n == 2) {
        ScalarConstraint product;
        product.kind = ScalarConstraint::Kind::covariance_product;
        product.params = {0, 1};
        product.text = detail::product_text(names[0], names[1], report.variance_floors(0),
                                            report.variance_floors(1), report.h_inverse(0, 1));
        report.constraints.push_back(std::move(product));
    } else if (n > 2) {
        for (int k = 2; k <= n; ++k) {
            ScalarConstraint minor;
            minor.kind = ScalarConstraint::Kind::principal_minor;
            minor.params.resize(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) minor.params[static_cast<std::size_t>(i)] = i;
            minor.text = "det of leading " + std::to_string(k) + "x" + std::to_string(k) +
                         " of (Cov - Hinv) >= 0";
            report.constraints.push_back(std::move(minor));
        }
    }

    if (qfim.slds) report.optimal_bases = optimal_bases(*qfim.slds);
    return report;
}

} // namespace qfim
