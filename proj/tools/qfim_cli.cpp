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

// Command-line front end.
//
// Subcommands: compute, sld, compare, bench, bures.
// Exit codes: 0 success; 2 usage error or malformed input file; 3 math-level
// failure (singularity, non-convergence, invalid state); 4 method
// disagreement in `compare`.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qfim/qfim.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitMath = 3;
constexpr int kExitMismatch = 4;

struct SolverFlags {
    std::string method = "auto";
    double tol = 0.0; // 0 = keep defaults
    double nu0 = 0.0;
    double nu_ratio = 0.0;
    int nu_steps = 0;
    int quad_nodes = 0;
    std::string output;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags, bool with_method = true) {
    if (with_method) {
        cmd->add_option("--method", flags.method, "one of auto|vectorized|eigen|eigen-matrix|"
                                                  "integral|regularized|pseudoinverse")
            ->check(CLI::IsMember({"auto", "vectorized", "eigen", "eigen-matrix", "integral",
                                   "regularized", "pseudoinverse"}));
    }
    cmd->add_option("--tol", flags.tol,
                    "convergence tolerance override for the regularized limit and the "
                    "integral quadrature")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nu0", flags.nu0, "first nu of the regularization schedule")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nu-ratio", flags.nu_ratio, "geometric ratio of the nu schedule")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nu-steps", flags.nu_steps, "maximum nu schedule length")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--quad-nodes", flags.quad_nodes,
                    "Gauss-Legendre nodes per panel for the integral route (>= 8)")
        ->check(CLI::Range(8, 1024));
    cmd->add_option("-o,--output", flags.output, "write the result to this file instead of stdout");
}

qfim::MethodChoice make_choice(const SolverFlags& flags) {
    qfim::MethodChoice choice;
    if (flags.method == "vectorized") choice.strategy = qfim::Strategy::vectorized;
    else if (flags.method == "eigen") choice.strategy = qfim::Strategy::eigen;
    else if (flags.method == "eigen-matrix") choice.strategy = qfim::Strategy::eigen_matrix_form;
    else if (flags.method == "integral") choice.strategy = qfim::Strategy::integral;
    else if (flags.method == "regularized") choice.strategy = qfim::Strategy::regularized_limit;
    else if (flags.method == "pseudoinverse") choice.strategy = qfim::Strategy::pseudoinverse;
    else choice.strategy = qfim::Strategy::automatic;
    if (flags.nu0 > 0.0) choice.nu.nu0 = flags.nu0;
    if (flags.nu_ratio > 0.0) choice.nu.ratio = flags.nu_ratio;
    if (flags.nu_steps > 0) choice.nu.max_steps = flags.nu_steps;
    if (flags.quad_nodes > 0) choice.quadrature.nodes = flags.quad_nodes;
    if (flags.tol > 0.0) {
        choice.nu.tol_limit = flags.tol;
        choice.quadrature.tol = flags.tol;
    }
    return choice;
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw qfim::Error("cannot write to " + output_path);
    out << text;
}

/// Loading and resolving are the input stage: anything wrong there (including
/// an invalid density matrix) is a malformed-file error, not a math failure.
qfim::io::ResolvedProblem load_resolved(const std::string& input) {
    const qfim::io::Problem problem = qfim::io::load_problem(input);
    try {
        return qfim::io::resolve_problem(problem);
    } catch (const qfim::io::ParseError&) {
        throw;
    } catch (const qfim::Error& e) {
        throw qfim::io::ParseError("", std::string("invalid input: ") + e.what());
    }
}

qfim::ComputeOutcome run_choice(const qfim::io::ResolvedProblem& problem,
                                const qfim::MethodChoice& choice) {
    if (problem.encoding && choice.strategy == qfim::Strategy::automatic) {
        return qfim::compute_qfim(*problem.encoding, problem.eps, choice);
    }
    return qfim::compute_qfim(problem.rho, problem.derivatives, choice);
}

/// SLDs for --sld when the chosen route does not produce them (integral,
/// regularized limit): fall back to the spectral-sum construction, which is
/// defined for any rank.
std::string attach_slds(qfim::ComputeOutcome& outcome, const qfim::io::ResolvedProblem& problem) {
    if (outcome.result.slds) return {};
    qfim::QfimResult spectral = qfim::qfim_eigen(problem.rho, problem.derivatives);
    outcome.result.slds = std::move(spectral.slds);
    outcome.result.diagnostics.max_lyapunov_residual =
        spectral.diagnostics.max_lyapunov_residual;
    return std::string(qfim::method_name(qfim::Method::eigen));
}

int run_compute(const std::string& input, const SolverFlags& flags, bool want_slds, bool want_crb) {
    qfim::io::ResolvedProblem problem = load_resolved(input);
    const qfim::MethodChoice choice = make_choice(flags);
    qfim::ComputeOutcome outcome = run_choice(problem, choice);
    std::string sld_source;
    if (want_slds || want_crb) sld_source = attach_slds(outcome, problem);

    std::optional<qfim::CrbReport> crb;
    if (want_crb) crb = qfim::cramer_rao(outcome.result, problem.parameter_names);

    qfim::io::Json j = qfim::io::result_to_json(outcome, problem.parameter_names, want_slds, crb);
    if (!sld_source.empty() && want_slds) j["slds_method"] = sld_source;
    emit(j.dump(2) + "\n", flags.output);
    return 0;
}

int run_compare(const std::string& input, const SolverFlags& flags) {
    qfim::io::ResolvedProblem problem = load_resolved(input);
    const qfim::MethodChoice choice = make_choice(flags);
    const qfim::CompareReport report =
        qfim::compare_methods(problem.rho, problem.derivatives, choice.nu, choice.quadrature);
    std::cout << qfim::io::compare_report_table(report);
    if (!flags.output.empty()) {
        emit(qfim::io::compare_report_to_json(report).dump(2) + "\n", flags.output);
    }
    return report.all_within_tolerance ? 0 : kExitMismatch;
}

int run_bench(const std::vector<int>& dims, int trials, std::uint64_t seed,
              const SolverFlags& flags) {
    qfim::bench::BenchOptions options;
    if (!dims.empty()) options.dims = dims;
    options.trials = trials;
    options.seed = seed;
    const qfim::MethodChoice choice = make_choice(flags);
    options.nu = choice.nu;
    options.quadrature = choice.quadrature;
    emit(qfim::bench::to_csv(qfim::bench::run_bench(options)), flags.output);
    return 0;
}

int run_bures(const std::string& input, std::vector<double> deps, const SolverFlags& flags) {
    qfim::io::ResolvedProblem problem = load_resolved(input);
    const std::size_t n = problem.derivatives.size();
    if (deps.empty()) deps.assign(n, 1.0);
    if (deps.size() != n) {
        throw qfim::io::ParseError("--deps", "expected " + std::to_string(n) +
                                                 " entries, one per parameter");
    }
    qfim::ComplexMatrix drho = qfim::ComplexMatrix::Zero(problem.rho.dim(), problem.rho.dim());
    for (std::size_t i = 0; i < n; ++i) drho += deps[i] * problem.derivatives[i];

    const double bures_sq = qfim::bures_infinitesimal(problem.rho, drho);

    // cross-check: (1/4) deps^T H deps
    const qfim::ComputeOutcome outcome = run_choice(problem, make_choice(flags));
    double quadratic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            quadratic += deps[i] * outcome.result.h(static_cast<qfim::Index>(i),
                                                    static_cast<qfim::Index>(j)) * deps[j];
        }
    }
    quadratic *= 0.25;

    qfim::io::Json j;
    j["version"] = qfim::io::kFormatVersion;
    j["bures_distance_squared"] = bures_sq;
    j["qfim_quadratic_form"] = quadratic;
    j["difference"] = bures_sq - quadratic;
    j["parameter_names"] = problem.parameter_names;
    j["deps"] = deps;
    emit(j.dump(2) + "\n", flags.output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Fisher information toolbox"};
    app.require_subcommand(1);

    SolverFlags compute_flags, sld_flags, compare_flags, bench_flags, bures_flags;
    std::string compute_input, sld_input, compare_input, bures_input;
    bool compute_slds = false, compute_crb = false, sld_crb = false;
    std::vector<int> bench_dims;
    int bench_trials = 5;
    std::uint64_t bench_seed = 1;
    std::vector<double> bures_deps;

    CLI::App* compute = app.add_subcommand("compute", "QFIM (and optionally SLDs / Cramér-Rao "
                                                      "report) for a problem file");
    compute->add_option("input", compute_input, "problem file (JSON)")->required();
    add_solver_flags(compute, compute_flags);
    compute->add_flag("--sld", compute_slds, "include the symmetric logarithmic derivatives");
    compute->add_flag("--crb", compute_crb, "append the Cramér-Rao report");

    CLI::App* sld = app.add_subcommand("sld", "symmetric logarithmic derivatives for a problem "
                                              "file");
    sld->add_option("input", sld_input, "problem file (JSON)")->required();
    add_solver_flags(sld, sld_flags);
    sld->add_flag("--crb", sld_crb, "append the Cramér-Rao report");

    CLI::App* compare = app.add_subcommand("compare", "run every applicable method and report "
                                                      "pairwise deviations and timings");
    compare->add_option("input", compare_input, "problem file (JSON)")->required();
    add_solver_flags(compare, compare_flags, /*with_method=*/false);

    CLI::App* bench = app.add_subcommand("bench", "per-method timings on seeded random full-rank "
                                                  "ensembles (CSV)");
    bench->add_option("--dims", bench_dims, "Hilbert-space dimensions (default 2 4 8 16)")
        ->check(CLI::Range(2, 64));
    bench->add_option("--trials", bench_trials, "instances per dimension")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_seed, "RNG seed");
    add_solver_flags(bench, bench_flags, /*with_method=*/false);

    CLI::App* bures = app.add_subcommand("bures", "squared infinitesimal Bures distance for a "
                                                  "parameter displacement");
    bures->add_option("input", bures_input, "problem file (JSON)")->required();
    bures->add_option("--deps", bures_deps, "parameter displacements d-epsilon (default all 1)");
    add_solver_flags(bures, bures_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (compute->parsed()) return run_compute(compute_input, compute_flags, compute_slds,
                                                  compute_crb);
        if (sld->parsed()) return run_compute(sld_input, sld_flags, /*want_slds=*/true, sld_crb);
        if (compare->parsed()) return run_compare(compare_input, compare_flags);
        if (bench->parsed()) return run_bench(bench_dims, bench_trials, bench_seed, bench_flags);
        if (bures->parsed()) return run_bures(bures_input, bures_deps, bures_flags);
    } catch (const qfim::io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const qfim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMath;
    }
    return 0;
}
