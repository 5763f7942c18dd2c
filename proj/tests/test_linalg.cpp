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

#include <catch2/catch_amalgamated.hpp>

#include "qfim/linalg.hpp"
#include "support.hpp"

using namespace qfim;
using test::diff;

TEST_CASE("vectorize stacks columns top to bottom", "[linalg]") {
    ComplexMatrix a(2, 2);
    a << Complex(1, 0), Complex(3, 0), Complex(2, 0), Complex(4, 0); // [[1,3],[2,4]]
    ComplexVector v = vectorize(a);
    REQUIRE(v.size() == 4);
    CHECK(v(0) == Complex(1, 0));
    CHECK(v(1) == Complex(2, 0));
    CHECK(v(2) == Complex(3, 0));
    CHECK(v(3) == Complex(4, 0));

    ComplexVector id = vectorize(ComplexMatrix::Identity(2, 2));
    CHECK(id(0) == Complex(1, 0));
    CHECK(id(1) == Complex(0, 0));
    CHECK(id(2) == Complex(0, 0));
    CHECK(id(3) == Complex(1, 0));

    ComplexMatrix scalar(1, 1);
    scalar << Complex(1, 2);
    CHECK(vectorize(scalar)(0) == Complex(1, 2));
}

TEST_CASE("unvectorize inverts vectorize", "[linalg]") {
    ComplexVector v(4);
    v << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
    ComplexMatrix m = unvectorize(v, 2);
    CHECK(m(0, 0) == Complex(1, 0));
    CHECK(m(1, 0) == Complex(2, 0));
    CHECK(m(0, 1) == Complex(3, 0));
    CHECK(m(1, 1) == Complex(4, 0));

    ComplexVector id(4);
    id << 1, 0, 0, 1;
    CHECK(diff(unvectorize(id, 2), ComplexMatrix::Identity(2, 2)) == 0.0);

    ComplexVector one(1);
    one << Complex(5, 0);
    CHECK(unvectorize(one, 1)(0, 0) == Complex(5, 0));

    CHECK_THROWS_AS(unvectorize(v, 3), DimensionError);
}

TEST_CASE("vectorize/unvectorize round trip is exact", "[linalg]") {
    std::mt19937_64 rng(42);
    for (Index n : {1, 2, 3, 5, 8, 16}) {
        const ComplexMatrix a = test::random_complex(rng, n, n);
        CHECK(diff(unvectorize(vectorize(a), n), a) == 0.0);
    }
}

TEST_CASE("kron basics", "[linalg]") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    CHECK(diff(kron(i2, i2), ComplexMatrix::Identity(4, 4)) == 0.0);

    ComplexMatrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const ComplexMatrix k = kron(swap, i2);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.block(0, 2, 2, 2) = i2;
    expected.block(2, 0, 2, 2) = i2;
    CHECK(diff(k, expected) == 0.0);
}

TEST_CASE("vec identity: kron(C^T, A) vec(B) = vec(A B C)", "[linalg][property]") {
    std::mt19937_64 rng(7);
    for (Index n : {2, 3, 4, 8}) {
        const ComplexMatrix a = test::random_complex(rng, n, n);
        const ComplexMatrix b = test::random_complex(rng, n, n);
        const ComplexMatrix c = test::random_complex(rng, n, n);
        const ComplexVector lhs = kron(c.transpose(), a) * vectorize(b);
        const ComplexVector rhs = vectorize(a * b * c);
        const double tol = (n == 2 ? 1e-13 : 1e-12) * rhs.cwiseAbs().maxCoeff();
        CHECK(diff(lhs, rhs) < tol);
    }
}

TEST_CASE("trace identity: tr(A^dag B) = vec(A)^dag vec(B)", "[linalg][property]") {
    std::mt19937_64 rng(11);
    for (Index n : {2, 4, 6}) {
        const ComplexMatrix a = test::random_complex(rng, n, n);
        const ComplexMatrix b = test::random_complex(rng, n, n);
        const Complex lhs = (a.adjoint() * b).trace();
        const Complex rhs = vectorize(a).dot(vectorize(b));
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
    }
}

TEST_CASE("mixed product: kron(A1,B1) kron(A2,B2) = kron(A1 A2, B1 B2)", "[linalg][property]") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 4; ++rep) {
        const ComplexMatrix a1 = test::random_complex(rng, 3, 3);
        const ComplexMatrix a2 = test::random_complex(rng, 3, 3);
        const ComplexMatrix b1 = test::random_complex(rng, 2, 2);
        const ComplexMatrix b2 = test::random_complex(rng, 2, 2);
        const ComplexMatrix lhs = kron(a1, b1) * kron(a2, b2);
        const ComplexMatrix rhs = kron(a1 * a2, b1 * b2);
        CHECK(diff(lhs, rhs) < 1e-12 * rhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("hermitian_eig on simple matrices", "[linalg]") {
    ComplexMatrix d(2, 2);
    d << 0.2, 0, 0, 0.8;
    const HermitianEig eig = hermitian_eig(d);
    CHECK(eig.eigenvalues(0) == Catch::Approx(0.2));
    CHECK(eig.eigenvalues(1) == Catch::Approx(0.8));
    CHECK(diff(ComplexMatrix(eig.eigenvectors.cwiseAbs().cast<Complex>()),
               ComplexMatrix::Identity(2, 2)) < 1e-12);

    ComplexMatrix proj(2, 2);
    proj << 0.5, 0.5, 0.5, 0.5;
    const HermitianEig peig = hermitian_eig(proj);
    CHECK(peig.eigenvalues(0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(peig.eigenvalues(1) == Catch::Approx(1.0));
    // eigenvector of the unit eigenvalue is (1,1)/sqrt(2) up to phase
    const ComplexVector top = peig.eigenvectors.col(1);
    CHECK(std::abs(top(0) - top(1)) < 1e-12);
    CHECK(std::abs(std::abs(top(0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("hermitian_eig matches the closed form for the noisy phase qubit", "[linalg]") {
    // eigenvalues of rho(theta, nu) are (1 -(1-nu))/2 and (1+(1-nu))/2
    const double theta = 0.0, nu = 0.5;
    ComplexMatrix rho(2, 2);
    rho << 0.5, 0.5 * (1 - nu) * std::exp(Complex(0, theta)),
        0.5 * (1 - nu) * std::exp(Complex(0, -theta)), 0.5;
    const HermitianEig eig = hermitian_eig(rho);
    CHECK(eig.eigenvalues(0) == Catch::Approx(0.25));
    CHECK(eig.eigenvalues(1) == Catch::Approx(0.75));
}

TEST_CASE("hermitian_eig rejects non-Hermitian input with the deviation", "[linalg]") {
    ComplexMatrix bad(2, 2);
    bad << 1.0, Complex(0, 1), Complex(0, 1), 1.0; // (0,1) entry should be -i
    try {
        hermitian_eig(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.invariant() == "hermiticity");
        CHECK(e.magnitude() == Catch::Approx(2.0));
    }

    ComplexMatrix poisoned = ComplexMatrix::Identity(2, 2);
    poisoned(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try {
        hermitian_eig(poisoned);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.invariant() == "finiteness");
    }
}

TEST_CASE("hermitian_eig reconstruction and unitarity residuals", "[linalg][property]") {
    std::mt19937_64 rng(17);
    for (Index n : {2, 5, 9, 16}) {
        const ComplexMatrix a = test::random_hermitian(rng, n);
        const HermitianEig eig = hermitian_eig(a);
        const ComplexMatrix recon = eig.eigenvectors *
                                    eig.eigenvalues.cast<Complex>().asDiagonal() *
                                    eig.eigenvectors.adjoint();
        const double scale = a.cwiseAbs().maxCoeff();
        CHECK(diff(recon, hermitize(a)) <= 1e-10 * scale);
        CHECK(diff(ComplexMatrix(eig.eigenvectors.adjoint() * eig.eigenvectors),
                   ComplexMatrix::Identity(n, n)) <= 1e-10);
    }
}

TEST_CASE("solve_hpd on identity-like systems", "[linalg]") {
    ComplexVector rhs(4);
    rhs << 1, 2, 3, 4;
    CHECK(diff(solve_hpd(ComplexMatrix::Identity(4, 4), rhs), rhs) < 1e-14);

    ComplexMatrix two = 2.0 * ComplexMatrix::Identity(2, 2);
    ComplexVector b(2);
    b << 2, 4;
    ComplexVector expected(2);
    expected << 1, 2;
    CHECK(diff(solve_hpd(two, b), expected) < 1e-14);
}

TEST_CASE("solve_hpd matches the explicit inverse", "[linalg][property]") {
    std::mt19937_64 rng(23);
    const Index n = 8;
    const ComplexMatrix g = test::random_complex(rng, n, n);
    const ComplexMatrix m = g * g.adjoint() + 0.5 * ComplexMatrix::Identity(n, n);
    const ComplexVector rhs = test::random_complex(rng, n, 1);
    const ComplexVector x = solve_hpd(m, rhs);
    const ComplexVector oracle = m.inverse() * rhs;
    CHECK(diff(x, oracle) < 1e-10 * oracle.cwiseAbs().maxCoeff());
    // residual guarantee
    CHECK((m * x - rhs).cwiseAbs().maxCoeff() <
          1e-10 * (m.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff()));
}

TEST_CASE("solve_hpd reports the smallest pivot on singular input", "[linalg]") {
    ComplexMatrix singular(2, 2);
    singular << 1, 0, 0, 0;
    ComplexVector rhs(2);
    rhs << 1, 1;
    try {
        solve_hpd(singular, rhs);
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(e.min_pivot() == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("pseudoinverse_apply truncates null directions", "[linalg]") {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, 0;
    ComplexVector rhs(2);
    rhs << 2, 3;
    ComplexVector expected(2);
    expected << 2, 0;
    CHECK(diff(pseudoinverse_apply(m, rhs), expected) < 1e-14);

    const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
    ComplexVector any(3);
    any << Complex(1, 1), Complex(-2, 0.5), Complex(0, 3);
    CHECK(diff(pseudoinverse_apply(id, any), any) < 1e-14);
}

TEST_CASE("pseudoinverse_apply agrees with the Tikhonov limit", "[linalg][property]") {
    // Rank-4 PSD whose kernel is exact in floating point (a dense definite
    // block under a permutation). With a rotated kernel the delta = 1e-12
    // system would amplify the ~1e-16 representation noise of the kernel
    // projection to ~1e-4 and the oracle itself would be meaningless.
    std::mt19937_64 rng(29);
    const Index n = 6, r = 4;
    const ComplexMatrix g = test::random_complex(rng, r, r);
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m.topLeftCorner(r, r) = g * g.adjoint() + 0.1 * ComplexMatrix::Identity(r, r);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    for (Index i = 0; i < n; ++i) perm.indices()(i) = static_cast<int>((i * 5 + 2) % n);
    m = perm * m * perm.transpose();

    const ComplexVector rhs = test::random_complex(rng, n, 1);
    const ComplexVector pinv = pseudoinverse_apply(m, rhs);
    const ComplexVector tikhonov = test::tikhonov_apply(m, rhs, 1e-12);
    CHECK(diff(pinv, tikhonov) < 1e-6 * pinv.cwiseAbs().maxCoeff());
}

TEST_CASE("pseudoinverse_apply equals solve_hpd on definite systems", "[linalg][property]") {
    std::mt19937_64 rng(31);
    const Index n = 5;
    const ComplexMatrix g = test::random_complex(rng, n, n);
    const ComplexMatrix m = g * g.adjoint() + ComplexMatrix::Identity(n, n);
    const ComplexVector rhs = test::random_complex(rng, n, 1);
    CHECK(diff(pseudoinverse_apply(m, rhs), solve_hpd(m, rhs)) < 1e-9);
}

TEST_CASE("matrix_exp on Hermitian input", "[linalg]") {
    CHECK(diff(matrix_exp(ComplexMatrix::Zero(3, 3)), ComplexMatrix::Identity(3, 3)) < 1e-14);

    ComplexMatrix d(2, 2);
    d << std::log(2.0), 0, 0, 0;
    ComplexMatrix expected(2, 2);
    expected << 2, 0, 0, 1;
    CHECK(diff(matrix_exp(d), expected) < 1e-14);

    // exp(-rho * 0) = I for any density matrix
    ComplexMatrix rho(2, 2);
    rho << 0.5, 0.25, 0.25, 0.5;
    CHECK(diff(matrix_exp(0.0 * rho), ComplexMatrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("unitary_exp_neg_i produces a unitary", "[linalg]") {
    std::mt19937_64 rng(37);
    const ComplexMatrix h = test::random_hermitian(rng, 4);
    const ComplexMatrix u = unitary_exp_neg_i(h);
    CHECK(diff(ComplexMatrix(u.adjoint() * u), ComplexMatrix::Identity(4, 4)) < 1e-13);
}
