#include "coordsim/error.hpp"
#include "coordsim/region.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coordsim;
using namespace coordsim::testing;

TEST_SUITE("oracle") {
  TEST_CASE("classical reading of a target") {
    const auto t = to_classical(correlated_bit());
    CHECK(t.sizes == std::vector<std::size_t>{2, 2});
    CHECK(t.pmf == std::vector<double>{0.5, 0.0, 0.0, 0.5});
    const auto g = to_classical(ghz_diagonal());
    CHECK(g.sizes == std::vector<std::size_t>{2, 2, 2});
    CHECK(g.pmf.front() == 0.5);
    CHECK(g.pmf.back() == 0.5);
    CHECK_THROWS_AS(to_classical(bell_no_comm()), Error);
  }

  TEST_CASE("independent bits need nothing") {
    const ClassicalTarget t{Topology::TwoNode, {2, 2}, {0.25, 0.25, 0.25, 0.25}};
    const auto r = brute_force_oracle(t);
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(r.u_size == 1);
  }

  TEST_CASE("correlated bits need one bit") {
    const auto t = to_classical(correlated_bit());
    const auto all = brute_force_oracle(t);
    CHECK(all.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(all.u_size == 2);
    OracleOptions first;
    first.objective = OracleObjective::FirstInput;
    CHECK(brute_force_oracle(t, first).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(brute_force_oracle(to_classical(ghz_diagonal())).value == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("region objective") {
    OracleOptions o;
    o.objective = OracleObjective::Region;
    o.r0 = 0.5;
    CHECK(brute_force_oracle(to_classical(correlated_bit()), o).value == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("the optimizer is never worse than the grid by more than the grid error") {
    Stream rng(151);
    RegionOptions ropts;
    ropts.restarts = 2;
    ropts.max_u = 3;
    ropts.iterations = 100;
    OracleOptions oopts;
    oopts.max_u = 3;
    oopts.grid_step = 1.0 / 16.0;
    for (int k = 0; k < 3; ++k) {
      const auto target = random_classical_two_node(rng);
      const double optimizer = *min_no_cr_rate(target, ropts).value;
      const double grid = brute_force_oracle(to_classical(target), oopts).value;
      CHECK(grid >= optimizer - 0.05);
    }
  }

  TEST_CASE("budget exhaustion carries the best value") {
    OracleOptions o;
    o.budget = 50;
    bool thrown = false;
    try {
      brute_force_oracle(to_classical(ghz_diagonal()), o);
    } catch (const BudgetExceeded& e) {
      thrown = true;
      CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
    CHECK(thrown);
  }

  TEST_CASE("argument validation") {
    const auto t = to_classical(correlated_bit());
    OracleOptions o;
    o.grid_step = 0.3;
    CHECK_THROWS_AS(brute_force_oracle(t, o), Error);
    o.grid_step = 0.25;
    o.max_u = 0;
    CHECK_THROWS_AS(brute_force_oracle(t, o), Error);
    CHECK_THROWS_AS(brute_force_oracle(ClassicalTarget{Topology::TwoNode, {2, 2}, {1.0}}), Error);
  }
}
