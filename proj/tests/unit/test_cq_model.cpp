#include <cmath>

#include "coordsim/cq_model.hpp"
#include "coordsim/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coordsim;
using namespace coordsim::testing;

namespace {

// Random two-node extension with the given alphabet sizes.
Extension random_two_node_extension(Stream& rng, std::size_t nx, std::size_t nu, std::size_t dim) {
  const auto flat = random_pmf(rng, nx * nu);
  std::vector<std::vector<double>> joint(nx, std::vector<double>(nu));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) joint[x][u] = flat[x * nu + u];
  }
  std::vector<std::vector<DensityOperator>> factors;
  for (std::size_t u = 0; u < nu; ++u) factors.push_back({random_state(rng, {{"B", dim}})});
  return make_extension(Topology::TwoNode, joint, factors);
}

Extension random_broadcast_extension(Stream& rng, std::size_t nx, std::size_t nu) {
  const auto flat = random_pmf(rng, nx * nu);
  std::vector<std::vector<double>> joint(nx, std::vector<double>(nu));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) joint[x][u] = flat[x * nu + u];
  }
  std::vector<std::vector<DensityOperator>> factors;
  for (std::size_t u = 0; u < nu; ++u) {
    factors.push_back({random_state(rng, {{"B1", 2}}), random_state(rng, {{"B2", 2}})});
  }
  return make_extension(Topology::Broadcast, joint, factors);
}

}  // namespace

TEST_SUITE("cq_model") {
  TEST_CASE("assemble a correlated bit") {
    const auto sigma = assemble(correlated_bit());
    CHECK(sigma.labels() == std::vector<std::string>{"X", "B"});
    CHECK((sigma.matrix() - 0.5 * (basis(4, 0) + basis(4, 3))).norm() < 1e-15);
  }

  TEST_CASE("a single classical value gives back the conditional") {
    Stream rng(51);
    const auto theta = random_state(rng, {{"B", 3}});
    const auto sigma = assemble(make_cq_state(Topology::TwoNode, {1.0}, {theta}));
    CHECK((sigma.matrix() - theta.matrix()).norm() < 1e-15);
  }

  TEST_CASE("assembled random states validate") {
    Stream rng(53);
    for (int k = 0; k < 50; ++k) {
      const std::size_t nx = 1 + k % 3;
      std::vector<DensityOperator> cond;
      for (std::size_t x = 0; x < nx; ++x) cond.push_back(random_state(rng, {{"B", 2}}));
      const auto sigma = assemble(make_cq_state(Topology::TwoNode, random_pmf(rng, nx), cond));
      CHECK_NOTHROW(validate_density(sigma.matrix(), sigma.registers()));
    }
  }

  TEST_CASE("state validation") {
    const auto b = state(basis(2, 0), "B");
    CHECK_THROWS_AS(make_cq_state(Topology::TwoNode, {0.6, 0.6}, {b, b}), Error);
    CHECK_THROWS_AS(make_cq_state(Topology::TwoNode, {0.5, 0.5}, {b}), Error);
    CHECK_THROWS_AS(make_cq_state(Topology::NoComm, {1.0}, {b}), Error);
    CHECK_THROWS_AS(make_cq_state(Topology::TwoNode, {1.0}, {state(basis(2, 0), "X")}), Error);
    CHECK(ghz_diagonal().classical_weights() == std::vector<double>{1.0});
    CHECK(ghz_diagonal().pmf.empty());
  }

  TEST_CASE("marginalize_extension") {
    Stream rng(57);
    const auto theta = random_state(rng, {{"B", 2}});
    const auto single = make_extension(Topology::TwoNode, {{0.3}, {0.7}}, {{theta}});
    const auto m = marginalize_extension(single);
    CHECK((m.conditionals[0].matrix() - theta.matrix()).norm() < 1e-14);
    CHECK((m.conditionals[1].matrix() - theta.matrix()).norm() < 1e-14);

    const auto target = correlated_bit();
    const auto back = marginalize_extension(identity_extension(target));
    for (std::size_t x = 0; x < 2; ++x) CHECK((back.conditionals[x].matrix() - target.conditionals[x].matrix()).norm() < 1e-15);
  }

  TEST_CASE("marginal equals the partial trace over U") {
    Stream rng(59);
    for (int k = 0; k < 20; ++k) {
      const auto ext = random_two_node_extension(rng, 2, 3, 2);
      const auto sigma = assemble(ext);
      const auto reduced = partial_trace(sigma, RegisterCut{{"X", "B"}, {"U"}});
      CHECK(trace_distance(assemble(marginalize_extension(ext)), reduced) <= 1e-7);
    }
  }

  TEST_CASE("feasibility residual") {
    const auto target = correlated_bit();
    CHECK(feasibility_residual(identity_extension(target), target) == 0.0);
    CHECK(feasibility_residual(product_extension(target), target) > 0.1);
    Stream rng(61);
    const auto ext = random_two_node_extension(rng, 2, 2, 2);
    CHECK(feasibility_residual(ext, marginalize_extension(ext)) < 1e-12);
    CHECK_THROWS_AS(feasibility_residual(ext, ghz_diagonal()), Error);
  }

  TEST_CASE("two-node information quantities") {
    const auto target = correlated_bit();
    const auto trivial = info_two_node(product_extension(target));
    CHECK(trivial.x_u == doctest::Approx(0.0));
    CHECK(trivial.all_u == doctest::Approx(0.0));
    const auto id = info_two_node(identity_extension(target));
    CHECK(id.x_u == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(id.all_u == doctest::Approx(1.0).epsilon(1e-12));

    Stream rng(67);
    for (int k = 0; k < 30; ++k) {
      const auto ext = random_two_node_extension(rng, 2, 2 + k % 3, 2);
      const auto dense = info_two_node(ext);
      const auto structured = info_structured(ext);
      CHECK(dense.all_u >= dense.x_u - 1e-7);
      CHECK(dense.x_u == doctest::Approx(structured.x_u).epsilon(1e-9));
      CHECK(dense.all_u == doctest::Approx(structured.all_u).epsilon(1e-9));
    }
  }

  TEST_CASE("no-communication information") {
    const auto target = ghz_diagonal();
    CHECK(info_nc(product_extension(target)) == doctest::Approx(0.0));
    std::vector<std::vector<DensityOperator>> factors;
    for (std::size_t u = 0; u < 2; ++u) {
      factors.push_back({state(basis(2, u), "A"), state(basis(2, u), "B"), state(basis(2, u), "C")});
    }
    const auto ext = make_extension(Topology::NoComm, {{0.5, 0.5}}, factors);
    CHECK(info_nc(ext) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(feasibility_residual(ext, target) < 1e-12);

    Stream rng(71);
    for (int k = 0; k < 20; ++k) {
      const std::size_t nu = 2 + k % 3;
      const auto pu = random_pmf(rng, nu);
      std::vector<std::vector<DensityOperator>> fs;
      for (std::size_t u = 0; u < nu; ++u) {
        fs.push_back({random_state(rng, {{"A", 2}}), random_state(rng, {{"B", 2}}), random_state(rng, {{"C", 2}})});
      }
      const auto e = make_extension(Topology::NoComm, {pu}, fs);
      CHECK(info_nc(e) <= shannon_entropy(pu) + 1e-7);
      CHECK(info_nc(e) == doctest::Approx(info_structured(e).all_u).epsilon(1e-9));
    }
  }

  TEST_CASE("broadcast information") {
    const auto target = broadcast_copy();
    const auto trivial = info_broadcast(product_extension(target));
    CHECK(trivial.x_u == doctest::Approx(0.0));
    CHECK(trivial.all_u == doctest::Approx(0.0));
    const auto id = info_broadcast(identity_extension(target));
    CHECK(id.x_u == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(id.all_u == doctest::Approx(1.0).epsilon(1e-12));

    Stream rng(73);
    for (int k = 0; k < 20; ++k) {
      const auto ext = random_broadcast_extension(rng, 2, 2 + k % 2);
      const auto dense = info_broadcast(ext);
      CHECK(dense.all_u >= dense.x_u - 1e-7);
      CHECK(dense.all_u == doctest::Approx(info_structured(ext).all_u).epsilon(1e-9));
    }
  }

  TEST_CASE("cardinality bound") {
    CHECK(cardinality_bound(Topology::TwoNode, 2, {{"B", 2}}) == 17);
    CHECK(cardinality_bound(Topology::NoComm, 0, {{"A", 2}, {"B", 2}, {"C", 2}}) == 65);
    CHECK_FALSE(exceeds_cardinality_bound(identity_extension(correlated_bit())));
  }

  TEST_CASE("canonical extensions of a classical target are feasible") {
    Stream rng(79);
    for (int k = 0; k < 10; ++k) {
      const auto target = random_classical_two_node(rng);
      CHECK(is_classical(target));
      CHECK(feasibility_residual(basis_extension(target), target) < 1e-12);
      CHECK(feasibility_residual(identity_extension(target), target) < 1e-12);
    }
    CHECK_FALSE(is_classical(make_cq_state(Topology::TwoNode, {1.0}, {state(projector({1, 1}), "B")})));
  }

  TEST_CASE("Shannon quantities") {
    CHECK(shannon_entropy({0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(classical_mutual_information({{0.5, 0.0}, {0.0, 0.5}}) == doctest::Approx(1.0));
    CHECK(classical_mutual_information({{0.25, 0.25}, {0.25, 0.25}}) == doctest::Approx(0.0));
  }
}
