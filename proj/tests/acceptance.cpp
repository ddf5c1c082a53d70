// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "gasflow/gallery.hpp"
#include "gasflow/kstage.hpp"
#include "gasflow/maxflow.hpp"
#include "gasflow/reduction.hpp"
#include "gasflow/stationary.hpp"
#include "support/oracles.hpp"

using namespace gasflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < time_limit_s;
  const bool ok = out.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s | %s | %.3fs (limit %gs)%s\n", ok ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), secs, time_limit_s, in_time ? "" : " TOO SLOW");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double potential_range(const StagePotentials& stages) {
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& pi : stages) {
    lo = std::min(lo, pi.minCoeff());
    hi = std::max(hi, pi.maxCoeff());
  }
  return hi - lo;
}

GasNetwork with_betas(const GasNetwork& net, const Eigen::VectorXd& beta) {
  GasNetwork out(net.bounds());
  for (const Node& n : net.nodes()) out.add_node(n.id, n.balance, n.fixed_potential);
  for (Index a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    out.add_arc(arc.id, net.node(arc.tail).id, net.node(arc.head).id, beta[a]);
  }
  return out;
}

Outcome example2_maxflow() {
  const GasNetwork net = gallery::gen_example2();
  const auto res = max_stationary_st_flow(net, "s", "t");
  const double exact = std::sqrt((76.0 - 48.0 * std::sqrt(2.0)) / 219.0);
  const double value_err = std::abs(res.value - exact);
  const PotentialAssignment ref = gallery::example2_optimal_potentials();
  const double pi_err = (res.solution.potentials - ref).cwiseAbs().maxCoeff();
  std::ostringstream d;
  d.precision(10);
  d << "B*=" << res.value << " err=" << value_err << " potential err=" << pi_err;
  return {value_err <= 1e-6 && pi_err <= 1e-6, d.str()};
}

Outcome example1_verify() {
  const auto ex = gallery::gen_example1();
  const auto rep = verify_kstage(ex.network, ex.stages, ex.target_b, ex.network.bounds(), 1e-9);
  const KStageFlow kf(ex.network, ex.stages);
  double worst = 0.0;
  for (const auto& x : kf.stage_flows()) {
    for (Index a = 0; a < x.size(); ++a) {
      worst = std::max(worst, std::min(std::abs(x[a] - 1.0), std::abs(x[a] + std::sqrt(2.0))));
    }
  }
  const double value_err = rep.st_value ? std::abs(*rep.st_value - (2.0 - std::sqrt(2.0))) : 1.0;
  std::ostringstream d;
  d << "feasible=" << rep.feasible << " value err=" << value_err << " flow err=" << worst;
  return {rep.feasible && value_err <= 1e-9 && worst <= 1e-9, d.str()};
}

Outcome two_stage_bound() {
  std::mt19937_64 rng(20240601);
  double worst = -1e300;
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const GasNetwork net = testing::random_network(rng);
    const auto [s, t] = testing::random_terminals(rng, net);
    const double stationary = max_stationary_st_flow(net, s, t).value;
    SearchConfig cfg;
    cfg.budget = 64;
    cfg.seed = static_cast<std::uint64_t>(i);
    const auto res = search_kstage_max_st(net, s, t, 2, cfg);
    const double excess = res.value - 2.0 * stationary;
    worst = std::max(worst, excess);
    if (excess > 1e-5) ++violations;
  }
  return {violations == 0, "100 networks, max(search - 2B*)=" + fmt("%.3e", worst) +
                               " violations=" + std::to_string(violations)};
}

Outcome instationary_gap() {
  const GasNetwork net = gallery::gen_example2();
  SearchConfig cfg;
  cfg.budget = 256;
  cfg.structured_starts = gallery::structured_starts(net, 3);
  const auto res = search_kstage_max_st(net, "s", "t", 3, cfg);
  const double repetition = 3.0 * max_stationary_st_flow(net, "s", "t").value;
  const double floor = 2.0 - std::sqrt(2.0) - 1e-3;
  std::ostringstream d;
  d.precision(8);
  d << "k=3 value=" << res.value << " (start " << res.best_start << ") stationary x3=" << repetition;
  return {res.value >= floor && res.value > repetition && !cfg.structured_starts.empty(), d.str()};
}

Outcome ladder_ranges() {
  bool ok = true;
  std::ostringstream d;
  d.precision(8);
  for (int q : {4, 16, 64}) {
    const double eps = 1.0 / std::sqrt(static_cast<double>(q));
    const auto ex = gallery::gen_example3({q, eps});
    const auto sol = solve_b_flow(ex.network, BalanceVector(0.5 * ex.network.balances()));
    const double stat_range = sol.potentials.maxCoeff() - sol.potentials.minCoeff();
    const double delta = gallery::Example3Params{q, eps}.delta();
    const double bound = std::max(4.0, q * (1.0 - eps) * delta * delta);
    const auto rep =
        verify_kstage(ex.network, ex.stages, ex.network.balances(), ex.network.bounds(), 1e-9);
    const double inst_range = potential_range(ex.stages);
    ok = ok && std::abs(stat_range - (1.0 + std::sqrt(q))) <= 1e-6 && rep.feasible &&
         inst_range <= bound + 1e-6;
    d << "q=" << q << ": stationary " << stat_range << ", 2-stage " << inst_range << " <= " << bound
      << (rep.feasible ? "" : " INFEASIBLE") << "; ";
  }
  return {ok, d.str()};
}

Outcome duality() {
  std::mt19937_64 rng(77001);
  double worst_gap = -1e300;
  for (int i = 0; i < 200; ++i) {
    GasNetwork net = testing::random_network(rng);
    const BalanceVector b = testing::random_balances(rng, net.num_nodes(), 2.0);
    const auto sol = solve_b_flow(net, b);
    worst_gap = std::max(worst_gap, sol.primal_objective - sol.dual_objective);
  }
  double worst_identity = 0.0;
  std::uniform_real_distribution<double> val(0.05, 2.0);
  for (int i = 0; i < 50; ++i) {
    const GasNetwork net = testing::random_network(rng);
    const auto [s, t] = testing::random_terminals(rng, net);
    const double B = val(rng);
    const auto g = st_potential_gap(net, s, t, B);
    const double z = g.solution.primal_objective;
    worst_identity = std::max(worst_identity, std::abs(3.0 * z / B - g.gap) / g.gap);
  }
  return {worst_gap <= 1e-7 && worst_identity <= 1e-6,
          "max primal-dual=" + fmt("%.3e", worst_gap) +
              " max rel identity err=" + fmt("%.3e", worst_identity)};
}

Outcome resistance_monotonicity() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> grow(0.0, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  double worst = -1e300;
  for (int i = 0; i < 100; ++i) {
    const GasNetwork net = testing::random_network(rng);
    const auto [s, t] = testing::random_terminals(rng, net);
    Eigen::VectorXd beta = net.betas();
    for (Index a = 0; a < beta.size(); ++a) {
      if (coin(rng) < 0.6) beta[a] *= 1.0 + grow(rng);
    }
    const double before = max_stationary_st_flow(net, s, t).value;
    const double after = max_stationary_st_flow(with_betas(net, beta), s, t).value;
    worst = std::max(worst, after - before);
  }
  return {worst <= 1e-6, "max increase of B*=" + fmt("%.3e", worst)};
}

Outcome gadget_oracles() {
  const PotentialInterval b{0.0, 4.0};
  const auto fixed = testing::grid_polish(
      [&](double x, double y) { return testing::fixed_gadget_residual(x, y, 1.0, b); }, 0.0, 4.0,
      4000, 1e-3, 1e-9);
  const bool fixed_ok = fixed.clusters == 1 && fixed.roots.size() == 1 &&
                        std::abs(fixed.roots[0].x - 1.0) <= 1e-6 &&
                        std::abs(fixed.roots[0].y - 1.0) <= 1e-6;

  const auto binary =
      testing::grid_polish(testing::binary_decision_residual, 0.0, 4.0, 4000, 1e-2, 1e-9);
  std::set<int> matched;
  bool extra = false;
  const std::pair<double, double> expected[] = {{1.0, 1.0}, {0.0, 4.0}, {4.0, 0.0}};
  for (const auto& r : binary.roots) {
    bool hit = false;
    for (int e = 0; e < 3; ++e) {
      if (std::abs(r.x - expected[e].first) <= 1e-6 && std::abs(r.y - expected[e].second) <= 1e-6) {
        matched.insert(e);
        hit = true;
      }
    }
    extra = extra || !hit;
  }
  const bool binary_ok = matched.size() == 3 && !extra && binary.roots.size() == 3;
  std::ostringstream d;
  d << "fixed: " << fixed.clusters << " near-feasible cluster(s), " << fixed.roots.size()
    << " root(s); decision: " << binary.roots.size() << " root(s), " << matched.size()
    << " expected matched";
  return {fixed_ok && binary_ok, d.str()};
}

Outcome reduction_correspondence() {
  const auto sample = testing::sample_x3c(424242, 50);
  int yes = 0;
  int mismatches = 0;
  int roundtrip_failures = 0;
  for (const auto& inst : sample) {
    const auto red = reduction::reduce_x3c(inst);
    const auto cover = reduction::solve_x3c_bruteforce(inst);
    const std::size_t m = inst.triples.size();
    bool any_feasible = false;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      reduction::Cover on;
      for (std::size_t c = 0; c < m; ++c) {
        if (mask & (1u << c)) on.push_back(c);
      }
      const bool feasible = verify_kstage(red.network, reduction::assemble_witness(red, on),
                                          red.target_b, red.network.bounds(), 1e-9)
                                .feasible;
      if (feasible != reduction::is_exact_cover(inst, on)) ++mismatches;
      any_feasible = any_feasible || feasible;
    }
    if (any_feasible != cover.has_value()) ++mismatches;
    if (cover) {
      ++yes;
      const auto decoded = reduction::decode_cover(red, reduction::assemble_witness(red, *cover));
      if (!decoded || *decoded != *cover) ++roundtrip_failures;
    }
  }
  std::ostringstream d;
  d << sample.size() << " instances (" << yes << " yes), mismatches=" << mismatches
    << " roundtrip failures=" << roundtrip_failures;
  return {sample.size() == 50 && mismatches == 0 && roundtrip_failures == 0 && yes > 0 &&
              yes < static_cast<int>(sample.size()),
          d.str()};
}

struct TinyCase {
  std::string name;
  GasNetwork net;
  std::string s;
  std::string t;
  int k;
};

std::vector<TinyCase> tiny_cases() {
  std::vector<TinyCase> out;
  auto path = [](int inner) {
    GasNetwork net(PotentialInterval{0.0, 4.0});
    net.add_node("s");
    std::string prev = "s";
    for (int i = 0; i < inner; ++i) {
      const std::string id = "m" + std::to_string(i);
      net.add_node(id);
      net.add_arc(prev + id, prev, id, 1.0);
      prev = id;
    }
    net.add_node("t");
    net.add_arc(prev + "t", prev, "t", 1.0);
    return net;
  };
  for (int k : {1, 2, 3}) out.push_back({"single arc", path(0), "s", "t", k});
  for (int k : {2, 3}) out.push_back({"path 3", path(1), "s", "t", k});
  out.push_back({"path 4", path(2), "s", "t", 2});
  GasNetwork pinned = gallery::gen_example1().network;
  pinned.set_fixed_potential("s", 2.0);
  pinned.set_fixed_potential("t", 2.0);
  for (int k : {2, 3}) out.push_back({"pinned path", pinned, "s", "t", k});

  GasNetwork tri(PotentialInterval{0.0, 4.0});
  for (const char* id : {"s", "m", "t"}) tri.add_node(id);
  tri.add_arc("sm", "s", "m", 1.0);
  tri.add_arc("mt", "m", "t", 2.0);
  tri.add_arc("st", "s", "t", 0.5);
  for (int k : {2, 3}) out.push_back({"triangle", tri, "s", "t", k});

  GasNetwork diamond(PotentialInterval{0.0, 4.0});
  for (const char* id : {"s", "a", "b", "t"}) diamond.add_node(id);
  diamond.add_arc("sa", "s", "a", 1.0);
  diamond.add_arc("sb", "s", "b", 2.0);
  diamond.add_arc("at", "a", "t", 1.5);
  diamond.add_arc("bt", "b", "t", 0.5);
  diamond.add_arc("ab", "a", "b", 1.0);
  for (int k : {2, 3}) out.push_back({"diamond", diamond, "s", "t", k});

  std::mt19937_64 rng(5150);
  for (int i = 0; i < 6; ++i) {
    GasNetwork net = testing::random_network(rng, {3, 5});
    const auto [s, t] = testing::random_terminals(rng, net);
    const int k = net.num_nodes() <= 4 ? 3 : 2;
    out.push_back({"random " + std::to_string(i), net, s, t, k});
  }
  return out;
}

Outcome oracle_dominance() {
  int ran = 0;
  int skipped = 0;
  double worst = -1e300;
  std::string worst_case;
  for (const auto& c : tiny_cases()) {
    GridOracleResult grid;
    try {
      grid = grid_oracle_kstage(c.net, c.s, c.t, c.k);
    } catch (const SizeLimit&) {
      ++skipped;
      continue;
    }
    ++ran;
    SearchConfig cfg;
    cfg.budget = 64;
    const auto res = search_kstage_max_st(c.net, c.s, c.t, c.k, cfg);
    const double shortfall = grid.value - res.value;
    if (shortfall > worst) {
      worst = shortfall;
      worst_case = c.name + " k=" + std::to_string(c.k);
    }
  }
  return {ran > 0 && worst <= 1e-3, std::to_string(ran) + " instances (" +
                                        std::to_string(skipped) + " over size), max(grid - search)=" +
                                        fmt("%.3e", worst) + " at " + worst_case};
}

}  // namespace

int main() {
  criterion(1, "maximum stationary s-t-flow on the example 2 network", 1.0, example2_maxflow);
  criterion(2, "path example verifies as 3-stage flow", 0.1, example1_verify);
  criterion(3, "2-stage search never beats two stationary copies", 300.0, two_stage_bound);
  criterion(4, "3-stage search beats 3 stationary copies on example 2", 60.0, instationary_gap);
  criterion(5, "ladder potential ranges", 5.0, ladder_ranges);
  criterion(6, "strong duality and terminal-gap identity", 60.0, duality);
  criterion(7, "max flow is monotone in the resistances", 120.0, resistance_monotonicity);
  criterion(8, "gadget oracles", 30.0, gadget_oracles);
  criterion(9, "X3C answer equals witness feasibility", 120.0, reduction_correspondence);
  criterion(10, "search dominates the grid oracle", 300.0, oracle_dominance);
  std::printf("%s: %d failure(s)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
