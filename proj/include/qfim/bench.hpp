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
 * Seeded random ensembles and the per-method timing harness behind
 * `qfim bench`.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qfim/solvers.hpp"
#include "qfim/states.hpp"
#include "qfim/types.hpp"

namespace qfim::bench {

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
inline ComplexMatrix random_ginibre(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    return g;
}

/// G G† / tr(G G†): full rank almost surely.
inline DensityMatrix random_density(Index dim, std::mt19937_64& rng) {
    const ComplexMatrix g = random_ginibre(dim, rng);
    ComplexMatrix w = g * g.adjoint();
    w /= w.trace().real();
    return validate_density(w);
}

/// Hermitian traceless Gaussian, scaled to unit max-norm.
inline ComplexMatrix random_traceless_hermitian(Index dim, std::mt19937_64& rng) {
    ComplexMatrix h = hermitize(random_ginibre(dim, rng));
    h.diagonal().array() -= h.trace() / static_cast<double>(dim);
    const double scale = max_abs(h);
    if (scale > 0.0) h /= scale;
    return h;
}

struct BenchOptions {
    std::vector<int> dims{2, 4, 8, 16};
    int trials = 5;
    std::uint64_t seed = 1;
    int n_params = 2;
    NuSchedule nu;
    QuadratureSpec quadrature;
};

struct MethodStats {
    Method method = Method::vectorized;
    int runs = 0;
    int failures = 0;
    double mean_seconds = 0.0;
    double stddev_seconds = 0.0;
};

struct BenchRow {
    int dim = 0;
    int trials = 0;
    std::vector<MethodStats> methods; ///< ordered like kAllMethods
    double max_relative_deviation = 0.0;
    bool agree = true; ///< all successful pairs within 1e-6 on every trial
};

/**
 * Runs every method on `trials` seeded random instances per dimension and
 * aggregates per-method timing statistics plus the cross-method agreement
 * check. The ensemble is deterministic under a fixed seed; only the timing
 * columns vary between runs.
 */
inline std::vector<BenchRow> run_bench(const BenchOptions& options) {
    if (options.trials < 1) throw DomainError("bench: trials must be >= 1");
    for (int dim : options.dims) {
        if (dim < 2) throw DomainError("bench: dims must be >= 2");
    }
    std::vector<BenchRow> rows;
    for (int dim : options.dims) {
        std::mt19937_64 rng(options.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(dim)));
        BenchRow row;
        row.dim = dim;
        row.trials = options.trials;
        std::vector<std::vector<double>> times(std::size(kAllMethods));
        std::vector<int> failures(std::size(kAllMethods), 0);
        for (int trial = 0; trial < options.trials; ++trial) {
            const DensityMatrix rho = random_density(dim, rng);
            DerivativeSet d;
            for (int i = 0; i < options.n_params; ++i) {
                d.push_back(random_traceless_hermitian(dim, rng));
            }
            const CompareReport report = compare_methods(rho, d, options.nu, options.quadrature);
            row.max_relative_deviation =
                std::max(row.max_relative_deviation, report.max_relative_deviation);
            row.agree = row.agree && report.all_within_tolerance;
            for (std::size_t m = 0; m < report.runs.size(); ++m) {
                if (report.runs[m].ok) {
                    times[m].push_back(report.runs[m].seconds);
                } else {
                    ++failures[m];
                }
            }
        }
        for (std::size_t m = 0; m < std::size(kAllMethods); ++m) {
            MethodStats stats;
            stats.method = kAllMethods[m];
            stats.runs = static_cast<int>(times[m].size());
            stats.failures = failures[m];
            if (!times[m].empty()) {
                double mean = 0.0;
                for (double t : times[m]) mean += t;
                mean /= static_cast<double>(times[m].size());
                double var = 0.0;
                for (double t : times[m]) var += (t - mean) * (t - mean);
                var /= static_cast<double>(times[m].size());
                stats.mean_seconds = mean;
                stats.stddev_seconds = std::sqrt(var);
            }
            row.methods.push_back(stats);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// CSV rendering, one row per (dim, method).
inline std::string to_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "dim,trials,method,failures,mean_seconds,stddev_seconds,max_rel_deviation,agree\n";
    for (const auto& row : rows) {
        for (const auto& stats : row.methods) {
            out << row.dim << ',' << row.trials << ',' << method_name(stats.method) << ','
                << stats.failures << ',' << format_double(stats.mean_seconds) << ','
                << format_double(stats.stddev_seconds) << ','
                << format_double(row.max_relative_deviation) << ','
                << (row.agree ? "true" : "false") << '\n';
        }
    }
    return out.str();
}

} // namespace qfim::bench
