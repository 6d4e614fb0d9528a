#include <cmath>

#include "coordsim/linalg.hpp"
#include "coordsim/random.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coordsim;
using namespace coordsim::testing;

TEST_SUITE("linalg") {
  TEST_CASE("kron follows the first-factor-most-significant convention") {
    Matrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 1, 1, 0;
    const Matrix k = kron(a, b);
    CHECK(k(0, 1) == cplx(1.0));
    CHECK(k(1, 0) == cplx(1.0));
    CHECK(k(2, 1) == cplx(3.0));
    CHECK(k(3, 0) == cplx(3.0));
    CHECK(k(1, 2) == cplx(2.0));
    CHECK(k(2, 3) == cplx(4.0));
  }

  TEST_CASE("kron_accumulate adds a weighted Kronecker product") {
    Stream rng(7);
    const Matrix a = random_density_matrix(rng, 3);
    const Matrix b = random_density_matrix(rng, 2);
    Matrix out = Matrix::Identity(6, 6);
    kron_accumulate(cplx(0.5, 0.25), a, b, out);
    const Matrix expected = Matrix::Identity(6, 6) + cplx(0.5, 0.25) * kron(a, b);
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-15);

    RealVector da = a.diagonal().real(), db = b.diagonal().real();
    RealVector dout = RealVector::Zero(6);
    kron_accumulate(2.0, da, db, dout);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(dout[i] == doctest::Approx(2.0 * da[i / 2] * db[i % 2]));
  }

  TEST_CASE("hermitian eigenvalues and trace norm") {
    Matrix m(2, 2);
    m << 0.5, 0.6, 0.6, 0.5;
    const RealVector ev = hermitian_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(-0.1));
    CHECK(ev[1] == doctest::Approx(1.1));
    CHECK(hermitian_trace_norm(m) == doctest::Approx(1.2));
  }

  TEST_CASE("diagonal detection and spectrum entropy") {
    CHECK(is_diagonal(Matrix::Identity(3, 3)));
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = 1e-30;
    CHECK_FALSE(is_diagonal(m));
    RealVector p(2);
    p << 0.25, 0.75;
    CHECK(spectrum_entropy(p) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
  }

  TEST_CASE("hermitian_log2 of a diagonal state") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.5;
    m(1, 1) = 0.25;
    const Matrix l = hermitian_log2(m);
    CHECK(l(0, 0).real() == doctest::Approx(-1.0));
    CHECK(l(1, 1).real() == doctest::Approx(-2.0));
  }
}
