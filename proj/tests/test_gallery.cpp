#include <doctest.h>

#include <cmath>

#include "gasflow/gallery.hpp"
#include "gasflow/io.hpp"
#include "gasflow/kstage.hpp"
#include "gasflow/stationary.hpp"

using namespace gasflow;

namespace {

BalanceVector st_target(const GasNetwork& net, double value) {
  BalanceVector b = BalanceVector::Zero(net.num_nodes());
  b[net.node_index("s")] = value;
  b[net.node_index("t")] = -value;
  return b;
}

double range_of(const StagePotentials& stages) {
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& pi : stages) {
    lo = std::min(lo, pi.minCoeff());
    hi = std::max(hi, pi.maxCoeff());
  }
  return hi - lo;
}

}  // namespace

TEST_SUITE("gallery") {
  TEST_CASE("path example: stage flows are 1 or -sqrt(2)") {
    const auto ex = gallery::gen_example1();
    const KStageFlow kf(ex.network, ex.stages);
    for (Index a = 0; a < ex.network.num_arcs(); ++a) {
      int ones = 0;
      int negs = 0;
      for (const auto& x : kf.stage_flows()) {
        if (std::abs(x[a] - 1.0) <= 1e-9) ++ones;
        if (std::abs(x[a] + std::sqrt(2.0)) <= 1e-9) ++negs;
      }
      CHECK(ones == 2);
      CHECK(negs == 1);
    }
    const auto rep = verify_kstage(ex.network, ex.stages, ex.target_b, ex.network.bounds());
    CHECK(rep.feasible);
    CHECK(average_potentials(ex.stages).isApproxToConstant(2.0));
  }

  TEST_CASE("example 2: pump stages carry the full value") {
    const GasNetwork net = gallery::gen_example2();
    const double value = 2.0 - std::sqrt(2.0);
    const auto rep =
        verify_kstage(net, gallery::gen_example2_instationary(), st_target(net, value), net.bounds());
    CHECK(rep.feasible);
    REQUIRE(rep.st_value);
    CHECK(*rep.st_value == doctest::Approx(value).epsilon(1e-12));
    CHECK(3.0 * gallery::example2_max_flow_value() < *rep.st_value);
    const double outer = 27.0 + 18.0 * std::sqrt(2.0);
    CHECK(std::sqrt(outer) == doctest::Approx(3.0 * (1.0 + std::sqrt(2.0))).epsilon(1e-15));
  }

  TEST_CASE("serial composition") {
    const GasNetwork one = gallery::gen_serial(1);
    const GasNetwork ex2 = gallery::gen_example2();
    CHECK(one.num_nodes() == ex2.num_nodes());
    CHECK(one.num_arcs() == ex2.num_arcs());
    auto betas = [](const GasNetwork& n) {
      const Eigen::VectorXd v = n.betas();
      std::vector<double> b(v.data(), v.data() + v.size());
      std::sort(b.begin(), b.end());
      return b;
    };
    CHECK(betas(one) == betas(ex2));
    for (int ell : {1, 2, 3, 5, 8}) {
      const GasNetwork net = gallery::gen_serial(ell);
      CHECK(net.num_nodes() == 3 * ell + 3);
      CHECK(net.num_arcs() == 3 * ell + 2);
      const auto rep = verify_kstage(net, gallery::gen_serial_instationary(ell),
                                     st_target(net, 2.0 - std::sqrt(2.0)), net.bounds());
      CHECK(rep.feasible);
    }
    CHECK_THROWS_AS(gallery::gen_serial(0), DomainError);
  }

  TEST_CASE("ladder: stationary solution sends one unit per arc") {
    for (auto [q, eps] : {std::pair{4, 0.5}, {5, 0.2}, {16, 0.25}, {4, 0.19}}) {
      const auto ex = gallery::gen_example3({q, eps});
      const BalanceVector half = 0.5 * ex.network.balances();
      const auto rep = verify_kstage(ex.network, {ex.stationary, ex.stationary},
                                     ex.network.balances(), ex.network.bounds());
      CHECK(rep.feasible);
      CHECK(rep.is_stationary);
      const KStageFlow kf(ex.network, {ex.stationary});
      CHECK(kf.stage_flows()[0].isApproxToConstant(1.0, 1e-12));
      CHECK((kf.stage_balances()[0] - half).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(ex.stationary.maxCoeff() - ex.stationary.minCoeff() ==
            doctest::Approx(1.0 + q * eps).epsilon(1e-12));
    }
  }

  TEST_CASE("ladder: two stages feasible with the compact range") {
    for (auto [q, eps] : {std::pair{4, 0.5}, {16, 0.25}, {64, 0.125}, {4, 0.19}}) {
      const auto ex = gallery::gen_example3({q, eps});
      const double delta = gallery::Example3Params{q, eps}.delta();
      const auto rep =
          verify_kstage(ex.network, ex.stages, ex.network.balances(), ex.network.bounds(), 1e-9);
      CHECK(rep.feasible);
      CHECK(range_of(ex.stages) <= std::max(4.0, q * (1.0 - eps) * delta * delta) + 1e-9);
      // Stage 1 overfulfills every supply and demand by delta.
      const KStageFlow kf(ex.network, ex.stages);
      const BalanceVector b1 = kf.stage_balances()[0];
      const BalanceVector b = ex.network.balances();
      for (Index v = 0; v < ex.network.num_nodes(); ++v) {
        CHECK(b1[v] * b[v] > 0.0);
        CHECK(std::abs(b1[v]) >= std::abs(b[v]) - 1e-12);
      }
      CHECK(b1[ex.network.node_index("v_0")] - b[ex.network.node_index("v_0")] ==
            doctest::Approx(delta).epsilon(1e-9));
    }
  }

  TEST_CASE("ladder: invalid parameters") {
    CHECK_THROWS_AS(gallery::gen_example3({4, 0.0}), ValidationError);
    CHECK_THROWS_AS(gallery::gen_example3({4, 1.0}), ValidationError);
    CHECK_THROWS_AS(gallery::gen_example3({0, 0.5}), ValidationError);
  }

  TEST_CASE("structured starts are recognized by id") {
    CHECK(gallery::structured_starts(gallery::gen_example2(), 3).size() == 1);
    CHECK(gallery::structured_starts(gallery::gen_example1().network, 3).size() == 1);
    CHECK(gallery::structured_starts(gallery::gen_serial(4), 3).size() == 1);
    CHECK(gallery::structured_starts(gallery::gen_example2(), 2).empty());
    CHECK(gallery::structured_starts(gallery::gen_example3({4, 0.5}).network, 3).empty());
    // order of node insertion does not matter
    const GasNetwork shuffled = parse_network(serialize_network(gallery::gen_example2()));
    const auto starts = gallery::structured_starts(shuffled, 3);
    REQUIRE(starts.size() == 1);
    const auto rep = verify_kstage(shuffled, starts[0], st_target(shuffled, 2.0 - std::sqrt(2.0)),
                                   shuffled.bounds());
    CHECK(rep.feasible);
  }
}
