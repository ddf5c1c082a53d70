#include "gasflow/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace gasflow::gallery {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::string arc_id(const std::string& tail, const std::string& head) {
  return "(" + tail + "," + head + ")";
}

void add_path_arc(GasNetwork& net, const std::string& tail, const std::string& head,
                  double beta) {
  net.add_arc(arc_id(tail, head), tail, head, beta);
}

// Fig.-1 pump potentials for (u, v) per stage, with both ends at 2.
constexpr double kPumpU[3] = {1.0, 1.0, 4.0};
constexpr double kPumpV[3] = {0.0, 3.0, 3.0};

std::string idx(const char* prefix, int i) { return std::string(prefix) + "_" + std::to_string(i); }

std::set<std::string> node_ids(const GasNetwork& net) {
  std::set<std::string> ids;
  for (const auto& n : net.nodes()) ids.insert(n.id);
  return ids;
}

}  // namespace

Example1 gen_example1() {
  Example1 ex;
  ex.network = GasNetwork(PotentialInterval{0.0, 4.0});
  for (const char* id : {"s", "u", "v", "t"}) ex.network.add_node(id);
  add_path_arc(ex.network, "s", "u", 1.0);
  add_path_arc(ex.network, "u", "v", 1.0);
  add_path_arc(ex.network, "v", "t", 1.0);
  ex.network.validate();
  for (int i = 0; i < 3; ++i) {
    PotentialAssignment pi(4);
    pi << 2.0, kPumpU[i], kPumpV[i], 2.0;
    ex.stages.push_back(pi);
  }
  ex.target_b = BalanceVector::Zero(4);
  ex.target_b[0] = 2.0 - kSqrt2;
  ex.target_b[3] = -(2.0 - kSqrt2);
  return ex;
}

GasNetwork gen_example2() {
  GasNetwork net(PotentialInterval{0.0, 4.0});
  for (const char* id : {"s", "s'", "u", "v", "t'", "t"}) net.add_node(id);
  const double outer = 27.0 + 18.0 * kSqrt2;
  add_path_arc(net, "s", "s'", outer);
  add_path_arc(net, "s'", "u", 1.0);
  add_path_arc(net, "u", "v", 1.0);
  add_path_arc(net, "v", "t'", 1.0);
  add_path_arc(net, "t'", "t", outer);
  net.validate();
  return net;
}

StagePotentials gen_example2_instationary() {
  StagePotentials stages;
  for (int i = 0; i < 3; ++i) {
    PotentialAssignment pi(6);
    pi << 4.0, 2.0, kPumpU[i], kPumpV[i], 2.0, 0.0;
    stages.push_back(pi);
  }
  return stages;
}

double example2_max_flow_value() { return std::sqrt((76.0 - 48.0 * kSqrt2) / 219.0); }

PotentialAssignment example2_optimal_potentials() {
  PotentialAssignment pi(6);
  pi << 4.0, (552.0 - 72.0 * kSqrt2) / 219.0, (476.0 - 24.0 * kSqrt2) / 219.0,
      (400.0 + 24.0 * kSqrt2) / 219.0, (324.0 + 72.0 * kSqrt2) / 219.0, 0.0;
  return pi;
}

GasNetwork gen_serial(int ell) {
  if (ell < 1) throw DomainError("serial composition needs ell >= 1");
  GasNetwork net(PotentialInterval{0.0, 4.0});
  net.add_node("s");
  net.add_node(idx("j", 0));
  for (int c = 1; c <= ell; ++c) {
    net.add_node(idx("u", c));
    net.add_node(idx("v", c));
    net.add_node(idx("j", c));
  }
  net.add_node("t");
  const double outer = 27.0 + 18.0 * kSqrt2;
  add_path_arc(net, "s", idx("j", 0), outer);
  for (int c = 1; c <= ell; ++c) {
    add_path_arc(net, idx("j", c - 1), idx("u", c), 1.0);
    add_path_arc(net, idx("u", c), idx("v", c), 1.0);
    add_path_arc(net, idx("v", c), idx("j", c), 1.0);
  }
  add_path_arc(net, idx("j", ell), "t", outer);
  net.validate();
  return net;
}

StagePotentials gen_serial_instationary(int ell) {
  const GasNetwork net = gen_serial(ell);
  StagePotentials stages;
  for (int i = 0; i < 3; ++i) {
    PotentialAssignment pi = PotentialAssignment::Constant(net.num_nodes(), 2.0);
    pi[net.node_index("s")] = 4.0;
    pi[net.node_index("t")] = 0.0;
    for (int c = 1; c <= ell; ++c) {
      pi[net.node_index(idx("u", c))] = kPumpU[i];
      pi[net.node_index(idx("v", c))] = kPumpV[i];
    }
    stages.push_back(pi);
  }
  return stages;
}

double Example3Params::delta() const { return 2.0 / std::sqrt(1.0 - epsilon) - 2.0; }

Example3 gen_example3(const Example3Params& params) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw ValidationError(ValidationKind::kInvalidBounds, "epsilon must lie in (0, 1)");
  }
  if (params.q < 1) throw ValidationError(ValidationKind::kInvalidBounds, "q must be >= 1");
  const int q = params.q;
  const double eps = params.epsilon;
  const double delta = params.delta();
  const double step2 = (1.0 - eps) * delta * delta;
  const double top = std::max({4.0, q * step2, 1.0 + q * eps});

  Example3 ex;
  ex.network = GasNetwork(PotentialInterval{0.0, top});
  for (int i = 0; i <= q; ++i) {
    ex.network.add_node(idx("u", i), i == 0 ? -2.0 : -4.0);
    ex.network.add_node(idx("v", i), i == q ? 2.0 : 4.0);
  }
  for (int i = 0; i <= q; ++i) add_path_arc(ex.network, idx("v", i), idx("u", i), 1.0);
  for (int i = 0; i < q; ++i) add_path_arc(ex.network, idx("v", i), idx("u", i + 1), 1.0 - eps);
  ex.network.validate();

  const Index n = ex.network.num_nodes();
  ex.stationary.resize(n);
  PotentialAssignment first(n);
  PotentialAssignment second(n);
  for (int i = 0; i <= q; ++i) {
    const Index u = ex.network.node_index(idx("u", i));
    const Index v = ex.network.node_index(idx("v", i));
    ex.stationary[u] = i * eps;
    ex.stationary[v] = 1.0 + i * eps;
    first[u] = 0.0;
    first[v] = 4.0;
    // zero flow on (v_i, u_i), flow -delta on (v_i, u_{i+1})
    second[u] = i * step2;
    second[v] = i * step2;
  }
  ex.stages = {first, second};
  return ex;
}

std::vector<StagePotentials> structured_starts(const GasNetwork& net, int k) {
  std::vector<StagePotentials> out;
  if (k != 3) return out;
  const auto ids = node_ids(net);
  if (ids == std::set<std::string>{"s", "u", "v", "t"} && net.num_arcs() == 3) {
    const Example1 ex = gen_example1();
    StagePotentials stages;
    for (const auto& pi : ex.stages) stages.push_back(net.potentials_from(ex.network.potentials_by_id(pi)));
    out.push_back(std::move(stages));
  } else if (ids == std::set<std::string>{"s", "s'", "u", "v", "t'", "t"} && net.num_arcs() == 5) {
    const GasNetwork ref = gen_example2();
    StagePotentials stages;
    for (const auto& pi : gen_example2_instationary()) {
      stages.push_back(net.potentials_from(ref.potentials_by_id(pi)));
    }
    out.push_back(std::move(stages));
  } else if (ids.count("s") != 0 && ids.count("t") != 0 && ids.count("j_0") != 0 &&
             (net.num_nodes() - 3) % 3 == 0 && net.num_nodes() >= 6) {
    const int ell = static_cast<int>((net.num_nodes() - 3) / 3);
    const GasNetwork ref = gen_serial(ell);
    if (node_ids(ref) == ids) {
      StagePotentials stages;
      for (const auto& pi : gen_serial_instationary(ell)) {
        stages.push_back(net.potentials_from(ref.potentials_by_id(pi)));
      }
      out.push_back(std::move(stages));
    }
  }
  return out;
}

}  // namespace gasflow::gallery
