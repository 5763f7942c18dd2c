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
 * The JSON interchange format for problems and results.
 *
 * Complex matrices travel as separate "re"/"im" real arrays in row-major
 * order; all numbers serialize as the shortest decimal that round-trips the
 * underlying binary64, so parse -> serialize -> parse is bit-exact.
 *
 * A problem file carries exactly one of three input forms:
 *   rho + derivatives          explicit matrices
 *   generators + initial_state unitary encoding (optional "parameters" = ε)
 *   family                     a bundled family id with parameter values
 */

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfim/families.hpp"
#include "qfim/metrology.hpp"
#include "qfim/solvers.hpp"
#include "qfim/states.hpp"
#include "qfim/types.hpp"

namespace qfim::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1";

/// Malformed input file or field. The offending field (or parse location)
/// is part of the message.
class ParseError : public Error {
  public:
    ParseError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

enum class ProblemForm { matrices, encoding, family };

struct Problem {
    std::string version;
    Index dim = 0;
    ProblemForm form = ProblemForm::matrices;
    std::vector<std::string> parameter_names; // empty means defaults / family-provided

    // matrices form
    std::optional<ComplexMatrix> rho;
    std::vector<ComplexMatrix> derivatives;

    // encoding form
    std::vector<ComplexMatrix> generators;
    std::optional<ComplexMatrix> initial_state;
    std::optional<RealVector> parameters; // ε; zeros when absent

    // family form
    std::string family_id;
    std::map<std::string, double> family_parameters;
};

// ---------------------------------------------------------------------------
// matrix <-> json

inline Json complex_matrix_to_json(const ComplexMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

namespace detail {

inline std::vector<double> number_array(const Json& j, Index expected, const std::string& field) {
    if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
    if (static_cast<Index>(j.size()) != expected) {
        throw ParseError(field, "expected " + std::to_string(expected) + " entries, got " +
                                    std::to_string(j.size()));
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ParseError(field + "[" + std::to_string(i) + "]", "expected a number");
        }
        const double x = j[i].get<double>();
        if (!std::isfinite(x)) {
            throw ParseError(field + "[" + std::to_string(i) + "]", "entry is not finite");
        }
        out.push_back(x);
    }
    return out;
}

} // namespace detail

/// Parses a {"re": [...], "im": [...]} object into a dim x dim matrix.
/// "im" may be omitted for real matrices.
inline ComplexMatrix complex_matrix_from_json(const Json& j, Index dim, const std::string& field) {
    if (!j.is_object()) throw ParseError(field, "expected an object with \"re\"/\"im\" arrays");
    if (!j.contains("re")) throw ParseError(field + ".re", "missing");
    const std::vector<double> re = detail::number_array(j["re"], dim * dim, field + ".re");
    std::vector<double> im(static_cast<std::size_t>(dim * dim), 0.0);
    if (j.contains("im")) im = detail::number_array(j["im"], dim * dim, field + ".im");
    ComplexMatrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index jj = 0; jj < dim; ++jj) {
            const std::size_t idx = static_cast<std::size_t>(i * dim + jj);
            m(i, jj) = Complex(re[idx], im[idx]);
        }
    }
    return m;
}

inline Json real_matrix_to_json(const RealMatrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// problem files

inline Problem problem_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("", "problem file must be a JSON object");
    Problem problem;

    if (!j.contains("version")) throw ParseError("version", "missing (format version is mandatory)");
    if (!j["version"].is_string()) throw ParseError("version", "expected a string");
    problem.version = j["version"].get<std::string>();
    if (problem.version != kFormatVersion) {
        throw ParseError("version", "unsupported format version \"" + problem.version +
                                        "\", expected \"" + kFormatVersion + "\"");
    }

    if (!j.contains("dim")) throw ParseError("dim", "missing");
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0) {
        throw ParseError("dim", "expected a positive integer");
    }
    problem.dim = j["dim"].get<Index>();

    const bool has_matrices = j.contains("rho") || j.contains("derivatives");
    const bool has_encoding = j.contains("generators") || j.contains("initial_state");
    const bool has_family = j.contains("family");
    if (has_matrices + has_encoding + has_family != 1) {
        throw ParseError("", "exactly one of {rho+derivatives, generators+initial_state, family} "
                             "must be present");
    }

    if (j.contains("parameter_names")) {
        if (has_family) {
            throw ParseError("parameter_names", "not allowed with a family (names are fixed by "
                                                "the family)");
        }
        if (!j["parameter_names"].is_array()) throw ParseError("parameter_names", "expected an array");
        for (const auto& name : j["parameter_names"]) {
            if (!name.is_string()) throw ParseError("parameter_names", "entries must be strings");
            problem.parameter_names.push_back(name.get<std::string>());
        }
    }

    if (has_matrices) {
        problem.form = ProblemForm::matrices;
        if (!j.contains("rho")) throw ParseError("rho", "missing");
        if (!j.contains("derivatives")) throw ParseError("derivatives", "missing");
        problem.rho = complex_matrix_from_json(j["rho"], problem.dim, "rho");
        if (!j["derivatives"].is_array() || j["derivatives"].empty()) {
            throw ParseError("derivatives", "expected a non-empty array of matrices");
        }
        for (std::size_t i = 0; i < j["derivatives"].size(); ++i) {
            problem.derivatives.push_back(complex_matrix_from_json(
                j["derivatives"][i], problem.dim, "derivatives[" + std::to_string(i) + "]"));
        }
        if (!problem.parameter_names.empty() &&
            problem.parameter_names.size() != problem.derivatives.size()) {
            throw ParseError("parameter_names",
                             "length " + std::to_string(problem.parameter_names.size()) +
                                 " does not match the " + std::to_string(problem.derivatives.size()) +
                                 " derivatives");
        }
    } else if (has_encoding) {
        problem.form = ProblemForm::encoding;
        if (!j.contains("generators")) throw ParseError("generators", "missing");
        if (!j.contains("initial_state")) throw ParseError("initial_state", "missing");
        if (!j["generators"].is_array() || j["generators"].empty()) {
            throw ParseError("generators", "expected a non-empty array of matrices");
        }
        for (std::size_t i = 0; i < j["generators"].size(); ++i) {
            problem.generators.push_back(complex_matrix_from_json(
                j["generators"][i], problem.dim, "generators[" + std::to_string(i) + "]"));
        }
        problem.initial_state = complex_matrix_from_json(j["initial_state"], problem.dim,
                                                         "initial_state");
        if (j.contains("parameters")) {
            const std::vector<double> eps = detail::number_array(
                j["parameters"], static_cast<Index>(problem.generators.size()), "parameters");
            problem.parameters = Eigen::Map<const RealVector>(eps.data(),
                                                              static_cast<Index>(eps.size()));
        }
        if (!problem.parameter_names.empty() &&
            problem.parameter_names.size() != problem.generators.size()) {
            throw ParseError("parameter_names",
                             "length " + std::to_string(problem.parameter_names.size()) +
                                 " does not match the " + std::to_string(problem.generators.size()) +
                                 " generators");
        }
    } else {
        problem.form = ProblemForm::family;
        const Json& fam = j["family"];
        if (!fam.is_object()) throw ParseError("family", "expected an object");
        if (!fam.contains("id") || !fam["id"].is_string()) {
            throw ParseError("family.id", "missing or not a string");
        }
        problem.family_id = fam["id"].get<std::string>();
        if (fam.contains("parameters")) {
            if (!fam["parameters"].is_object()) {
                throw ParseError("family.parameters", "expected an object of name -> value");
            }
            for (const auto& [key, value] : fam["parameters"].items()) {
                if (!value.is_number()) {
                    throw ParseError("family.parameters." + key, "expected a number");
                }
                problem.family_parameters[key] = value.get<double>();
            }
        }
    }
    return problem;
}

inline Json problem_to_json(const Problem& problem) {
    Json j;
    j["version"] = problem.version;
    j["dim"] = problem.dim;
    if (!problem.parameter_names.empty()) j["parameter_names"] = problem.parameter_names;
    switch (problem.form) {
        case ProblemForm::matrices: {
            j["rho"] = complex_matrix_to_json(*problem.rho);
            Json ds = Json::array();
            for (const auto& d : problem.derivatives) ds.push_back(complex_matrix_to_json(d));
            j["derivatives"] = std::move(ds);
            break;
        }
        case ProblemForm::encoding: {
            Json gs = Json::array();
            for (const auto& g : problem.generators) gs.push_back(complex_matrix_to_json(g));
            j["generators"] = std::move(gs);
            j["initial_state"] = complex_matrix_to_json(*problem.initial_state);
            if (problem.parameters) {
                Json eps = Json::array();
                for (Index i = 0; i < problem.parameters->size(); ++i) {
                    eps.push_back((*problem.parameters)(i));
                }
                j["parameters"] = std::move(eps);
            }
            break;
        }
        case ProblemForm::family: {
            Json fam;
            fam["id"] = problem.family_id;
            Json params;
            for (const auto& [key, value] : problem.family_parameters) params[key] = value;
            fam["parameters"] = std::move(params);
            j["family"] = std::move(fam);
            break;
        }
    }
    return j;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", std::string("invalid JSON: ") + e.what());
    }
    return problem_from_json(j);
}

// ---------------------------------------------------------------------------
// resolution to solver inputs

/// A problem expanded to concrete solver inputs. `encoding` is kept when the
/// problem came in (or expands to) unitary-encoded form so the automatic
/// strategy can use the parameter-independent commutator route.
struct ResolvedProblem {
    DensityMatrix rho;
    DerivativeSet derivatives;
    std::vector<std::string> parameter_names;
    std::optional<UnitaryEncoding> encoding;
    RealVector eps;
};

namespace detail {

inline double family_parameter(const Problem& problem, const std::string& name) {
    const auto it = problem.family_parameters.find(name);
    if (it == problem.family_parameters.end()) {
        throw ParseError("family.parameters." + name,
                         "missing (required by family \"" + problem.family_id + "\")");
    }
    return it->second;
}

inline std::vector<std::string> default_names(std::size_t count) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t i = 0; i < count; ++i) names.push_back("e" + std::to_string(i + 1));
    return names;
}

} // namespace detail

inline ResolvedProblem resolve_problem(const Problem& problem) {
    switch (problem.form) {
        case ProblemForm::matrices: {
            DensityMatrix rho = validate_density(*problem.rho);
            qfim::detail::require_derivative_set(problem.derivatives, problem.dim, "derivatives");
            std::vector<std::string> names = problem.parameter_names.empty()
                                                 ? detail::default_names(problem.derivatives.size())
                                                 : problem.parameter_names;
            return ResolvedProblem{std::move(rho), problem.derivatives, std::move(names),
                                   std::nullopt, RealVector()};
        }
        case ProblemForm::encoding: {
            UnitaryEncoding enc{problem.generators, validate_density(*problem.initial_state)};
            RealVector eps = problem.parameters
                                 ? *problem.parameters
                                 : RealVector(RealVector::Zero(
                                       static_cast<Index>(problem.generators.size())));
            EncodedState encoded = encode_unitary(enc, eps);
            std::vector<std::string> names = problem.parameter_names.empty()
                                                 ? detail::default_names(problem.generators.size())
                                                 : problem.parameter_names;
            return ResolvedProblem{std::move(encoded.rho), std::move(encoded.derivatives),
                                   std::move(names), std::move(enc), std::move(eps)};
        }
        case ProblemForm::family: break;
    }

    if (problem.family_id == families::kPhaseNoiseQubit) {
        if (problem.dim != 2) {
            throw ParseError("dim", "family \"" + problem.family_id + "\" has dim 2");
        }
        const StateFamily family = families::phase_noise_qubit();
        RealVector eps(2);
        eps << detail::family_parameter(problem, "theta"), detail::family_parameter(problem, "nu");
        DensityMatrix rho = family.evaluate(eps);
        DerivativeSet d = analytic_derivatives(family, eps);
        return ResolvedProblem{std::move(rho), std::move(d), families::phase_noise_qubit_names(),
                               std::nullopt, std::move(eps)};
    }
    if (problem.family_id == families::kBellPhase) {
        if (problem.dim != 4) {
            throw ParseError("dim", "family \"" + problem.family_id + "\" has dim 4");
        }
        UnitaryEncoding enc = families::bell_phase();
        RealVector eps(1);
        eps << detail::family_parameter(problem, "theta");
        EncodedState encoded = encode_unitary(enc, eps);
        return ResolvedProblem{std::move(encoded.rho), std::move(encoded.derivatives),
                               families::bell_phase_names(), std::move(enc), std::move(eps)};
    }
    throw ParseError("family.id", "unknown family \"" + problem.family_id + "\" (available: " +
                                      std::string(families::kPhaseNoiseQubit) + ", " +
                                      std::string(families::kBellPhase) + ")");
}

// ---------------------------------------------------------------------------
// result files

inline Json diagnostics_to_json(const Diagnostics& diag) {
    Json j;
    j["max_asymmetry"] = diag.max_asymmetry;
    j["max_lyapunov_residual"] = diag.max_lyapunov_residual;
    j["imag_discard"] = diag.imag_discard;
    if (diag.nu_sequence_used) j["nu_sequence_used"] = *diag.nu_sequence_used;
    return j;
}

inline Json crb_to_json(const CrbReport& report) {
    Json j;
    j["identifiable"] = report.identifiable;
    j["h_inverse"] = real_matrix_to_json(report.h_inverse);
    Json floors = Json::array();
    for (Index i = 0; i < report.variance_floors.size(); ++i) {
        floors.push_back(report.variance_floors(i));
    }
    j["variance_floors"] = std::move(floors);
    Json constraints = Json::array();
    for (const auto& c : report.constraints) {
        Json entry;
        switch (c.kind) {
            case ScalarConstraint::Kind::variance_floor: entry["kind"] = "variance-floor"; break;
            case ScalarConstraint::Kind::covariance_product:
                entry["kind"] = "covariance-product";
                break;
            case ScalarConstraint::Kind::principal_minor: entry["kind"] = "principal-minor"; break;
        }
        entry["params"] = c.params;
        entry["text"] = c.text;
        constraints.push_back(std::move(entry));
    }
    j["constraints"] = std::move(constraints);
    if (!report.optimal_bases.empty()) {
        Json bases = Json::array();
        for (const auto& basis : report.optimal_bases) {
            bases.push_back(complex_matrix_to_json(basis));
        }
        j["optimal_bases"] = std::move(bases);
    }
    if (report.null_space.cols() > 0) j["null_space"] = real_matrix_to_json(report.null_space);
    return j;
}

inline Json qfim_result_to_json(const QfimResult& result) {
    Json j;
    j["method"] = std::string(method_name(result.method));
    j["qfim"] = real_matrix_to_json(result.h);
    j["diagnostics"] = diagnostics_to_json(result.diagnostics);
    return j;
}

inline Json result_to_json(const ComputeOutcome& outcome,
                           const std::vector<std::string>& parameter_names, bool include_slds,
                           const std::optional<CrbReport>& crb = std::nullopt) {
    Json j;
    j["version"] = kFormatVersion;
    j["method"] = std::string(method_name(outcome.result.method));
    j["parameter_names"] = parameter_names;
    j["qfim"] = real_matrix_to_json(outcome.result.h);
    j["diagnostics"] = diagnostics_to_json(outcome.result.diagnostics);
    if (include_slds && outcome.result.slds) {
        Json slds = Json::array();
        for (const auto& sld : *outcome.result.slds) slds.push_back(complex_matrix_to_json(sld));
        j["slds"] = std::move(slds);
    }
    if (crb) j["crb"] = crb_to_json(*crb);
    if (outcome.discontinuity_warning) {
        j["warnings"] = Json::array({outcome.warning});
        if (outcome.cross_check) j["alternate"] = qfim_result_to_json(*outcome.cross_check);
    } else if (outcome.cross_check) {
        Json confirmation;
        confirmation["method"] = std::string(method_name(outcome.cross_check->method));
        confirmation["max_deviation"] =
            max_abs(RealMatrix(outcome.cross_check->h - outcome.result.h));
        j["confirmation"] = std::move(confirmation);
    }
    return j;
}

// ---------------------------------------------------------------------------
// comparison reports

inline Json compare_report_to_json(const CompareReport& report) {
    Json j;
    j["tolerance"] = report.tolerance;
    j["all_within_tolerance"] = report.all_within_tolerance;
    j["max_relative_deviation"] = report.max_relative_deviation;
    Json runs = Json::array();
    for (const auto& run : report.runs) {
        Json entry;
        entry["method"] = std::string(method_name(run.method));
        entry["ok"] = run.ok;
        entry["seconds"] = run.seconds;
        if (run.ok) {
            entry["qfim"] = real_matrix_to_json(run.h);
        } else {
            entry["error"] = run.error;
        }
        runs.push_back(std::move(entry));
    }
    j["runs"] = std::move(runs);
    Json devs = Json::array();
    for (Index i = 0; i < report.deviations.rows(); ++i) {
        Json row = Json::array();
        for (Index k = 0; k < report.deviations.cols(); ++k) {
            const double v = report.deviations(i, k);
            if (std::isnan(v)) {
                row.push_back(nullptr);
            } else {
                row.push_back(v);
            }
        }
        devs.push_back(std::move(row));
    }
    j["deviations"] = std::move(devs);
    Json flagged = Json::array();
    for (const auto& [a, b] : report.flagged) {
        flagged.push_back(Json::array({std::string(method_name(a)), std::string(method_name(b))}));
    }
    j["flagged_pairs"] = std::move(flagged);
    return j;
}

inline std::string compare_report_table(const CompareReport& report) {
    std::ostringstream out;
    out << "method              status  time [ms]    max |H| / error\n";
    for (const auto& run : report.runs) {
        char head[64];
        std::snprintf(head, sizeof(head), "%-19s %-7s %10.3f   ",
                      std::string(method_name(run.method)).c_str(), run.ok ? "ok" : "failed",
                      run.seconds * 1e3);
        out << head;
        if (run.ok) {
            out << format_double(max_abs(run.h));
        } else {
            out << run.error;
        }
        out << "\n";
    }
    out << "max pairwise relative deviation: " << format_double(report.max_relative_deviation)
        << " (tolerance " << format_double(report.tolerance) << ")\n";
    if (report.all_within_tolerance) {
        out << "result: all applicable methods agree\n";
    } else {
        out << "result: " << report.flagged.size() << " method pair(s) exceed the tolerance\n";
    }
    return out.str();
}

} // namespace qfim::io
