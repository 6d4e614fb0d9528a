#include <cmath>
#include <numeric>

#include "coordsim/error.hpp"
#include "coordsim/protocols.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coordsim;
using namespace coordsim::testing;

namespace {

Extension ghz_extension() {
  std::vector<std::vector<DensityOperator>> factors;
  for (std::size_t u = 0; u < 2; ++u) {
    factors.push_back({state(basis(2, u), "A"), state(basis(2, u), "B"), state(basis(2, u), "C")});
  }
  return make_extension(Topology::NoComm, {{0.5, 0.5}}, factors);
}

// A two-node target that is a product: omega^x = theta for every x.
CqNetworkState product_two_node(Stream& rng) {
  const auto theta = random_state(rng, {{"B", 2}});
  return make_cq_state(Topology::TwoNode, {0.3, 0.7}, {theta, theta});
}

CqNetworkState random_quantum_two_node(Stream& rng, Extension& ext) {
  const auto theta0 = random_state(rng, {{"B", 2}});
  const auto theta1 = random_state(rng, {{"B", 2}});
  const auto theta2 = random_state(rng, {{"B", 2}});
  ext = make_extension(Topology::TwoNode, {{0.2, 0.1, 0.1}, {0.05, 0.3, 0.25}}, {{theta0}, {theta1}, {theta2}});
  return marginalize_extension(ext);
}

double block_total(const InducedState& s) {
  double t = 0.0;
  for (const auto& b : s.blocks) t += b.state.trace().real() * b.weight;
  return t;
}

std::vector<std::size_t> one_to(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), 1);
  return out;
}

}  // namespace

TEST_SUITE("protocols") {
  TEST_CASE("encoder picks uniformly among identical codewords") {
    const auto target = correlated_bit();
    auto code = make_two_node_code(target, identity_extension(target), 1.0, 2.0, 2, 0);
    std::fill(code.codebook.symbols.begin(), code.codebook.symbols.end(), 1u);
    const std::vector<std::size_t> x{1, 1};
    const auto p = encoder_pmf(code, x, 0);
    REQUIRE(p.size() == code.codebook.bin_size);
    for (double v : p) CHECK(v == doctest::Approx(1.0 / static_cast<double>(p.size())));
  }

  TEST_CASE("deterministic X given U selects the matching codeword") {
    const auto target = correlated_bit();
    auto code = make_two_node_code(target, identity_extension(target), 0.0, 1.0, 2, 0);
    REQUIRE(code.codebook.bin_size == 4);
    code.codebook.symbols = {0, 0, 0, 1, 1, 0, 0, 0};
    const std::vector<std::size_t> x{0, 1};
    const auto p = encoder_pmf(code, x, 0);
    CHECK(p == std::vector<double>{0.0, 1.0, 0.0, 0.0});
    // No codeword matches: every likelihood is zero and the encoder falls back to uniform.
    const std::vector<std::size_t> none{1, 1};
    for (double v : encoder_pmf(code, none, 0)) CHECK(v == doctest::Approx(0.25));
  }

  TEST_CASE("encoder output is a distribution") {
    Stream rng(101);
    Extension ext;
    const auto target = random_quantum_two_node(rng, ext);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto code = make_two_node_code(target, ext, 0.5, 1.0, 3, seed);
      const std::vector<std::size_t> x{seed % 2, (seed / 2) % 2, (seed / 4) % 2};
      const auto p = encoder_pmf(code, x, seed % code.codebook.num_bins);
      CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("product targets are simulated exactly") {
    Stream rng(103);
    const auto target = product_two_node(rng);
    const auto ext = product_extension(target);
    const auto code = make_two_node_code(target, ext, 0.0, 0.0, 3, 1);
    const auto induced = induced_state_two_node(code);
    const Matrix power = kron(kron(ext.product_state(0), ext.product_state(0)), ext.product_state(0));
    for (const auto& b : induced.blocks) CHECK((b.state - power).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(protocol_gap(code) < 1e-12);
    const auto curve = run_two_node(target, ext, 0.1, 0.2, {1, 2, 3}, 4, 0);
    for (const auto& row : curve.rows) CHECK(row.mean_gap < 1e-12);
  }

  TEST_CASE("n = 1 with ample rates concentrates each block on its symbol") {
    const auto target = correlated_bit();
    const auto code = make_two_node_code(target, identity_extension(target), 4.0, 4.0, 1, 5);
    const auto induced = induced_state_two_node(code);
    REQUIRE(induced.blocks.size() == 2);
    for (std::size_t x = 0; x < 2; ++x) {
      CHECK(induced.blocks[x].weight == doctest::Approx(0.5));
      CHECK(induced.blocks[x].state(x, x).real() > 0.999);
    }
    CHECK(protocol_gap(code) < 1e-3);
  }

  TEST_CASE("the classical marginal is preserved exactly") {
    Stream rng(107);
    Extension ext;
    const auto target = random_quantum_two_node(rng, ext);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto induced = induced_state_two_node(make_two_node_code(target, ext, 0.25, 0.75, 3, seed));
      CHECK(induced.blocks.size() == 8);
      for (const auto& b : induced.blocks) {
        double p = 1.0;
        for (auto x : b.x_seq) p *= target.pmf[x];
        CHECK(b.weight == doctest::Approx(p).epsilon(1e-15));
        CHECK(b.state.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK(block_total(induced) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("block formula agrees with dense trace distance") {
    Stream rng(109);
    Extension ext;
    const auto target = random_quantum_two_node(rng, ext);
    for (std::size_t n : {1u, 2u}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto code = make_two_node_code(target, ext, 0.5, 1.0, n, seed);
        const auto induced = assemble_induced(induced_state_two_node(code), target.x_size());
        const auto ref = assemble(target_power(target, n));
        const double gap = protocol_gap(code);
        CHECK(gap == doctest::Approx(trace_distance(induced, ref)).epsilon(1e-10));
        CHECK(gap <= 2.0);
      }
    }
  }

  TEST_CASE("infeasible extensions are rejected") {
    const auto target = correlated_bit();
    CHECK_THROWS_AS(make_two_node_code(target, product_extension(target), 1.0, 1.0, 2, 0), Error);
    try {
      make_two_node_code(target, product_extension(target), 1.0, 1.0, 2, 0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleExtension);
    }
  }

  TEST_CASE("dimension caps") {
    const auto target = correlated_bit();
    Caps caps;
    caps.max_blocks = 8;
    ProtocolOptions opts;
    opts.caps = caps;
    CHECK_THROWS_AS(run_two_node(target, identity_extension(target), 0.0, 1.0, {4}, 2, 0, opts), Error);
  }

  TEST_CASE("below-rate communication cannot synthesize the correlation") {
    const auto target = correlated_bit();
    const auto curve = run_two_node(target, identity_extension(target), 0.25, 0.5, one_to(6), 20, 0);
    CHECK(curve.rows.back().mean_gap > 0.5);
    CHECK(curve.max_marginal_defect < 1e-12);
  }

  TEST_CASE("correlated bit with U = X: mean gap matches the exact codebook expectation") {
    // Block x^n is exact when its bin holds a copy of x^n; otherwise the
    // fallback mixes codewords orthogonal to x^n and costs 2. Hence
    // E gap = 2 (1 - 2^-n)^{K1}, with K1 = ceil(2^{n R1}) words per bin.
    const auto target = correlated_bit();
    const auto curve = run_two_node(target, identity_extension(target), 0.25, 1.25, one_to(5), 400, 1);
    for (const auto& row : curve.rows) {
      const double k1 = static_cast<double>(codebook_size(1.25, row.n));
      const double expected = 2.0 * std::pow(1.0 - std::pow(2.0, -static_cast<double>(row.n)), k1);
      CAPTURE(row.n);
      CHECK(std::abs(row.mean_gap - expected) <= 4.0 * row.std_err + 1e-12);
    }
    // The broadcast copy of the same code has the same gap, trial by trial.
    const auto twin = run_broadcast(broadcast_copy(), identity_extension(broadcast_copy()), 0.25, 1.25, one_to(3), 20, 1);
    const auto base = run_two_node(target, identity_extension(target), 0.25, 1.25, one_to(3), 20, 1);
    for (std::size_t k = 0; k < twin.rows.size(); ++k) {
      for (std::size_t t = 0; t < twin.rows[k].gaps.size(); ++t) {
        CHECK(twin.rows[k].gaps[t] == doctest::Approx(base.rows[k].gaps[t]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("curves are reproducible and independent of the thread count") {
    const auto target = correlated_bit();
    ProtocolOptions parallel;
    parallel.threads = 3;
    const auto a = run_two_node(target, identity_extension(target), 0.25, 1.25, {1, 2, 3}, 6, 9);
    const auto b = run_two_node(target, identity_extension(target), 0.25, 1.25, {1, 2, 3}, 6, 9, parallel);
    for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].gaps == b.rows[k].gaps);
  }

  TEST_CASE("broadcast: product target, marginal and dense cross-check") {
    Stream rng(113);
    const auto t1 = random_state(rng, {{"B1", 2}});
    const auto t2 = random_state(rng, {{"B2", 2}});
    const auto pt = tensor(t1, t2);
    const auto product = make_cq_state(Topology::Broadcast, {0.5, 0.5}, {pt, pt});
    const auto flat = run_broadcast(product, product_extension(product), 0.0, 0.5, {1, 2}, 3, 0);
    for (const auto& row : flat.rows) CHECK(row.mean_gap < 1e-12);

    const auto target = broadcast_copy();
    const auto ext = identity_extension(target);
    const auto code = make_broadcast_code(target, ext, 0.25, 1.25, 2, 4);
    const auto induced = induced_state_broadcast(code);
    CHECK(induced.registers.size() == 4);
    CHECK(induced.registers[1].name == "B2_1");
    for (const auto& b : induced.blocks) CHECK(b.weight == doctest::Approx(0.25));
    const auto dense = assemble_induced(induced, 2);
    CHECK(protocol_gap(code) == doctest::Approx(trace_distance(dense, assemble(target_power(target, 2)))).epsilon(1e-10));
  }

  TEST_CASE("no communication: product target and dense cross-check") {
    Stream rng(127);
    const auto prod = tensor(tensor(random_state(rng, {{"A", 2}}), random_state(rng, {{"B", 2}})),
                             random_state(rng, {{"C", 2}}));
    const auto product = make_cq_state(Topology::NoComm, {}, {prod});
    const auto flat = run_no_comm(product, product_extension(product), 0.0, {1, 2}, 3, 0);
    for (const auto& row : flat.rows) CHECK(row.mean_gap < 1e-12);

    const auto target = ghz_diagonal();
    const auto code = make_no_comm_code(target, ghz_extension(), 1.3, 2, 11);
    const auto rho = induced_state_no_comm(code);
    CHECK(rho.labels() == std::vector<std::string>{"A_1", "B_1", "C_1", "A_2", "B_2", "C_2"});
    const auto ref = target_power(target, 2);
    CHECK(protocol_gap(code) == doctest::Approx(trace_distance(rho, ref.conditionals.front())).epsilon(1e-10));
  }

  TEST_CASE("no communication: mean gap matches the exact codebook expectation") {
    // For three copies of a uniform bit the target is uniform over the 2^n
    // patterns and the mixture is the empirical distribution of M i.i.d.
    // uniform words, so E gap = 2^n E|K/M - 2^-n| with K ~ Binomial(M, 2^-n).
    const auto target = ghz_diagonal();
    for (double r0 : {0.6, 1.3, 3.0}) {
      const auto curve = run_no_comm(target, ghz_extension(), r0, one_to(4), 200, 0);
      for (const auto& row : curve.rows) {
        const std::size_t m = codebook_size(r0, row.n);
        const double cells = std::pow(2.0, static_cast<double>(row.n));
        const double q = 1.0 / cells;
        double expected = 0.0;
        double log_pmf = static_cast<double>(m) * std::log(1.0 - q);
        for (std::size_t k = 0; k <= m; ++k) {
          if (k > 0) {
            log_pmf += std::log(static_cast<double>(m - k + 1) / static_cast<double>(k)) + std::log(q / (1.0 - q));
          }
          expected += std::exp(log_pmf) * std::abs(static_cast<double>(k) / static_cast<double>(m) - q);
        }
        expected *= cells;
        CAPTURE(r0);
        CAPTURE(row.n);
        CHECK(std::abs(row.mean_gap - expected) <= 4.0 * row.std_err + 1e-12);
      }
    }
  }

  TEST_CASE("no communication: rate above and below the common information") {
    const auto target = ghz_diagonal();
    const auto above = run_no_comm(target, ghz_extension(), 3.0, one_to(4), 50, 0);
    for (std::size_t k = 1; k < above.rows.size(); ++k) CHECK(above.rows[k].mean_gap < above.rows[k - 1].mean_gap);
    const auto below = run_no_comm(target, ghz_extension(), 0.6, one_to(4), 50, 0);
    CHECK(below.rows.back().mean_gap > 0.5);
  }
}
