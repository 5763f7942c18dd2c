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

// Walks through the two bundled families: QFIM, SLDs, optimal measurement
// bases, and the Cramér-Rao variance floors.

#include <iostream>

#include "qfim/qfim.hpp"

int main() {
    using namespace qfim;

    std::cout << "== noisy phase qubit (theta = 0.3, nu = 0.5) ==\n";
    const StateFamily family = families::phase_noise_qubit();
    RealVector eps(2);
    eps << 0.3, 0.5;
    const DensityMatrix rho = family.evaluate(eps);
    const DerivativeSet d = analytic_derivatives(family, eps);

    const QfimResult result = qfim_vectorized(rho, d);
    std::cout << "QFIM:\n" << result.h << "\n";

    const CrbReport crb = cramer_rao(result, families::phase_noise_qubit_names());
    for (const auto& constraint : crb.constraints) std::cout << constraint.text << "\n";
    std::cout << "optimal basis for theta (columns):\n" << crb.optimal_bases[0] << "\n";

    const CompareReport report = compare_methods(rho, d);
    std::cout << "\ncross-method check: max relative deviation "
              << report.max_relative_deviation << "\n";

    std::cout << "\n== entangled two-qubit phase estimation ==\n";
    const QfimResult bell = qfim_unitary_commuting(families::bell_phase());
    std::cout << "QFIM = " << bell.h(0, 0) << " via " << method_name(bell.method) << "\n";
    const CrbReport bell_crb = cramer_rao(bell, families::bell_phase_names());
    std::cout << bell_crb.constraints[0].text << "\n";
    return 0;
}
