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
 * Bundled state families with analytic derivatives, usable from the library
 * and addressable by id from problem files.
 */

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qfim/states.hpp"
#include "qfim/types.hpp"

namespace qfim::families {

inline constexpr const char* kPhaseNoiseQubit = "phase-noise-qubit";
inline constexpr const char* kBellPhase = "bell-phase";

/**
 * Single qubit carrying a phase θ under white noise ν:
 * ρ(θ,ν) = (1-ν)|ψ_θ⟩⟨ψ_θ| + (ν/2)I with |ψ_θ⟩ = (|0⟩ + e^{-iθ}|1⟩)/√2,
 * i.e. ρ = ½ [[1, (1-ν)e^{iθ}], [(1-ν)e^{-iθ}, 1]].
 * Parameters (θ, ν), ν ∈ [0, 1]; analytic derivatives.
 */
inline StateFamily phase_noise_qubit() {
    StateFamily family;
    family.n_params = 2;
    family.dim = 2;
    family.evaluate = [](const RealVector& eps) {
        const double theta = eps(0);
        const double nu = eps(1);
        ComplexMatrix rho(2, 2);
        const Complex off = 0.5 * (1.0 - nu) * std::exp(Complex(0.0, theta));
        rho << 0.5, off, std::conj(off), 0.5;
        return validate_density(rho);
    };
    family.analytic_partials = {
        [](const RealVector& eps) {
            const double theta = eps(0);
            const double nu = eps(1);
            ComplexMatrix d(2, 2);
            const Complex off = Complex(0.0, 0.5) * (1.0 - nu) * std::exp(Complex(0.0, theta));
            d << 0.0, off, std::conj(off), 0.0;
            return d;
        },
        [](const RealVector& eps) {
            const double theta = eps(0);
            ComplexMatrix d(2, 2);
            const Complex off = -0.5 * std::exp(Complex(0.0, theta));
            d << 0.0, off, std::conj(off), 0.0;
            return d;
        },
    };
    return family;
}

inline std::vector<std::string> phase_noise_qubit_names() { return {"theta", "nu"}; }

/**
 * Two-qubit phase estimation on the maximally entangled state
 * |ψ₀⟩ = (|00⟩ + |11⟩)/√2, with the phase written on both qubits by the
 * total number operator K = N⊗I + I⊗N = diag(0, 1, 1, 2). The initial state
 * is pure, so QFIM evaluation goes through the regularized limit.
 */
inline UnitaryEncoding bell_phase() {
    ComplexMatrix rho0 = ComplexMatrix::Zero(4, 4);
    rho0(0, 0) = rho0(0, 3) = rho0(3, 0) = rho0(3, 3) = 0.5;
    ComplexMatrix k = ComplexMatrix::Zero(4, 4);
    k(1, 1) = 1.0;
    k(2, 2) = 1.0;
    k(3, 3) = 2.0;
    return UnitaryEncoding{{std::move(k)}, validate_density(rho0)};
}

inline std::vector<std::string> bell_phase_names() { return {"theta"}; }

} // namespace qfim::families
