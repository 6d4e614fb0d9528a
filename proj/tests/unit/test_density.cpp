#include <cmath>
#include <functional>

#include "coordsim/density.hpp"
#include "coordsim/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coordsim;
using namespace coordsim::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

const double kSqrtHalf = std::sqrt(0.5);

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("validate_density accepts the maximally mixed qubit unchanged") {
    const Matrix m = Matrix::Identity(2, 2) / 2.0;
    const auto rho = validate_density(m, "A");
    CHECK(rho.matrix() == m);
    CHECK(rho.dim() == 2);
  }

  TEST_CASE("validate_density rejects bad matrices") {
    Matrix neg(2, 2);
    neg << 0.5, 0.6, 0.6, 0.5;
    CHECK(code_of([&] { validate_density(neg, "A"); }) == ErrorCode::NotPSD);
    try {
      validate_density(neg, "A");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("magnitude 0.1") != std::string::npos);
    }
    CHECK(code_of([] { validate_density(Matrix::Identity(2, 2), "A"); }) == ErrorCode::NotUnitTrace);
    Matrix nh = Matrix::Identity(2, 2) / 2.0;
    nh(0, 1) = 0.1;
    CHECK(code_of([&] { validate_density(nh, "A"); }) == ErrorCode::NotHermitian);
    CHECK(code_of([] { validate_density(Matrix::Identity(4, 4) / 4.0, {{"A", 2}, {"B", 3}}); }) ==
          ErrorCode::DimMismatch);
  }

  TEST_CASE("eigenvalues slightly below zero are clipped") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0 + 1e-10;
    m(1, 1) = -1e-10;
    const auto rho = validate_density(m, "A");
    CHECK(hermitian_eigenvalues(rho.matrix()).minCoeff() >= 0.0);
    CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("tensor products") {
    const auto t = tensor(state(basis(2, 0), "A"), state(basis(2, 1), "B"));
    CHECK(t.matrix() == basis(4, 1));
    CHECK(t.labels() == std::vector<std::string>{"A", "B"});
    const auto mixed = tensor(state(Matrix::Identity(2, 2) / 2.0, "A"), state(Matrix::Identity(2, 2) / 2.0, "B"));
    CHECK((mixed.matrix() - Matrix::Identity(4, 4) / 4.0).norm() < 1e-15);
  }

  TEST_CASE("tensor: unit trace on random pairs, duplicate labels and caps rejected") {
    Stream rng(11);
    for (int k = 0; k < 100; ++k) {
      const auto a = random_state(rng, {{"A", 2}});
      const auto b = random_state(rng, {{"B", 3}});
      CHECK(std::abs(tensor(a, b).matrix().trace().real() - 1.0) < 1e-12);
    }
    const auto a = state(basis(2, 0), "A");
    CHECK(code_of([&] { tensor(a, a); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { tensor(a, state(basis(2, 0), "B"), 3); }) == ErrorCode::DimensionCap);
  }

  TEST_CASE("partial trace") {
    const auto rho = bell();
    const auto a = partial_trace(rho, rho.cut({"A"}));
    CHECK((a.matrix() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-15);

    Stream rng(3);
    const auto x = random_state(rng, {{"A", 2}});
    const auto y = random_state(rng, {{"B", 3}});
    const auto xy = tensor(x, y);
    CHECK((partial_trace(xy, xy.cut({"A"})).matrix() - x.matrix()).norm() < 1e-14);
    CHECK((partial_trace(xy, xy.cut({"B"})).matrix() - y.matrix()).norm() < 1e-14);
    CHECK(code_of([&] { partial_trace(xy, RegisterCut{{"A"}, {"Z"}}); }) == ErrorCode::BadCut);
  }

  TEST_CASE("reorder permutes registers") {
    Stream rng(5);
    const auto x = random_state(rng, {{"A", 2}});
    const auto y = random_state(rng, {{"B", 3}});
    const auto swapped = reorder(tensor(x, y), {"B", "A"});
    CHECK((swapped.matrix() - tensor(y, x).matrix()).norm() < 1e-14);
  }

  TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_entropy(state(Matrix::Identity(2, 2) / 2.0, "A")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(von_neumann_entropy(state(projector({0.6, cplx(0.0, 0.8)}), "A"))) < 1e-9);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.25;
    d(1, 1) = 0.75;
    CHECK(std::abs(von_neumann_entropy(state(d, "A")) - 0.811278124459) < 1e-9);
  }

  TEST_CASE("conditional entropy") {
    const auto rho = bell();
    CHECK(conditional_entropy(rho, rho.cut({"A"})) == doctest::Approx(-1.0).epsilon(1e-12));
    Stream rng(9);
    const auto a = random_state(rng, {{"A", 2}});
    const auto b = random_state(rng, {{"B", 2}});
    const auto ab = tensor(a, b);
    CHECK(conditional_entropy(ab, ab.cut({"A"})) == doctest::Approx(von_neumann_entropy(a)).epsilon(1e-10));
  }

  TEST_CASE("conditional entropy of c-q states is the average conditional entropy") {
    Stream rng(13);
    for (int k = 0; k < 100; ++k) {
      const auto p = random_pmf(rng, 3);
      Matrix m = Matrix::Zero(9, 9);
      double expected = 0.0;
      for (std::size_t x = 0; x < 3; ++x) {
        const auto theta = random_state(rng, {{"B", 3}});
        m += p[x] * kron(basis(3, x), theta.matrix());
        expected += p[x] * von_neumann_entropy(theta);
      }
      const auto sigma = validate_density(m, {{"X", 3}, {"B", 3}});
      const double h = conditional_entropy(sigma, sigma.cut({"B"}));
      CHECK(h == doctest::Approx(expected).epsilon(1e-9));
      CHECK(h >= -1e-7);
    }
  }

  TEST_CASE("mutual information") {
    Stream rng(17);
    const auto ab = tensor(random_state(rng, {{"A", 2}}), random_state(rng, {{"B", 2}}));
    CHECK(mutual_information(ab, ab.cut({"A"})) == doctest::Approx(0.0));
    CHECK(mutual_information(bell(), bell().cut({"A"})) == doctest::Approx(2.0).epsilon(1e-12));
    const auto corr = validate_density(0.5 * (basis(4, 0) + basis(4, 3)), {{"A", 2}, {"B", 2}});
    CHECK(mutual_information(corr, corr.cut({"A"})) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("subadditivity on random bipartite states") {
    Stream rng(19);
    int violations = 0;
    for (int k = 0; k < 100; ++k) {
      const auto rho = random_state(rng, {{"A", 2}, {"B", 3}}, 1 + k % 6);
      const double lhs = von_neumann_entropy(rho);
      const double rhs = von_neumann_entropy(partial_trace(rho, rho.cut({"A"}))) +
                         von_neumann_entropy(partial_trace(rho, rho.cut({"B"})));
      if (lhs > rhs + 1e-7) ++violations;
    }
    CHECK(violations == 0);
  }

  TEST_CASE("trace distance") {
    const auto z = state(basis(2, 0), "A");
    CHECK(trace_distance(z, z) == 0.0);
    CHECK(trace_distance(z, state(basis(2, 1), "A")) == doctest::Approx(2.0));
    CHECK(trace_distance(z, state(projector({kSqrtHalf, kSqrtHalf}), "A")) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(trace_distance(z, state(Matrix::Identity(3, 3) / 3.0, "A")), Error);
  }

  TEST_CASE("trace distance contracts under partial trace") {
    Stream rng(23);
    int violations = 0;
    for (int k = 0; k < 100; ++k) {
      const std::vector<Register> regs{{"A", 2}, {"B", 2}, {"C", 2}};
      const auto rho = random_state(rng, regs, 1 + k % 4);
      const auto sigma = random_state(rng, regs, 1 + k % 3);
      const RegisterCut keep{{"A", "B"}, {"C"}};
      if (trace_distance(partial_trace(rho, keep), partial_trace(sigma, keep)) > trace_distance(rho, sigma) + 1e-7) {
        ++violations;
      }
    }
    CHECK(violations == 0);
  }

  TEST_CASE("PPT check") {
    const auto b = bell();
    const auto res = ppt_check(b, b.cut({"A"}));
    CHECK_FALSE(res.pass);
    CHECK(res.min_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));

    Stream rng(29);
    const auto prod = tensor(random_state(rng, {{"A", 2}}), random_state(rng, {{"B", 3}}));
    CHECK(ppt_check(prod, prod.cut({"A"})).pass);
    const auto sep = validate_density(0.5 * (basis(4, 0) + basis(4, 3)), {{"A", 2}, {"B", 2}});
    CHECK(ppt_check(sep, sep.cut({"A"})).pass);
  }

  TEST_CASE("continuity bound") {
    CHECK(afw_continuity_bound(0.0, 2) == 0.0);
    double previous = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = afw_continuity_bound(0.01 * k, 3);
      CHECK(v >= previous);
      previous = v;
    }
    Stream rng(31);
    int violations = 0;
    for (int k = 0; k < 100; ++k) {
      const auto rho = random_state(rng, {{"A", 3}}, 1 + k % 3);
      const auto sigma = random_state(rng, {{"A", 3}}, 1 + k % 2);
      const double gap = std::abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma));
      if (gap > afw_continuity_bound(trace_distance(rho, sigma), 3) + 1e-7) ++violations;
    }
    CHECK(violations == 0);
  }

  TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328));
  }
}
