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
 * Scalar/matrix aliases, the error hierarchy, and small shared helpers.
 */

#pragma once

#include <charconv>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qfim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Mismatched or invalid matrix/vector dimensions.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// An argument outside its mathematical domain (bad ν, non-commuting
/// generators, invalid schedule, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A structural invariant of an input failed (non-Hermitian, wrong trace,
/// negative eigenvalue, non-traceless derivative). Carries the name of the
/// violated invariant and the observed magnitude.
class ValidationError : public Error {
  public:
    ValidationError(std::string invariant, double magnitude, const std::string& message)
        : Error(message), invariant_(std::move(invariant)), magnitude_(magnitude) {}

    const std::string& invariant() const noexcept { return invariant_; }
    double magnitude() const noexcept { return magnitude_; }

  private:
    std::string invariant_;
    double magnitude_;
};

/// A factorization or formula hit a (numerically) singular operator.
/// Carries the smallest pivot/eigenvalue encountered.
class SingularityError : public Error {
  public:
    SingularityError(double min_pivot, const std::string& message)
        : Error(message), min_pivot_(min_pivot) {}

    double min_pivot() const noexcept { return min_pivot_; }

  private:
    double min_pivot_;
};

/// An iterative scheme exhausted its budget. Carries the iterate history.
class ConvergenceError : public Error {
  public:
    ConvergenceError(std::vector<RealMatrix> history, const std::string& message)
        : Error(message), history_(std::move(history)) {}

    const std::vector<RealMatrix>& history() const noexcept { return history_; }

  private:
    std::vector<RealMatrix> history_;
};

/// Shortest decimal string that round-trips the given binary64 value.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Largest entry magnitude; 0 for empty matrices.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

} // namespace qfim
