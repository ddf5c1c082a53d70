#include "gasflow/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gasflow::reduction {

namespace {

// 2 - (2/5) sqrt(21): positive, about 0.1670.
const double kElementScale = 2.0 - 0.4 * std::sqrt(21.0);
const double kSqrt5 = std::sqrt(5.0);

// Decision-node potentials (stage 1, stage 2).
constexpr double kOff[2] = {1.0, 1.0};
constexpr double kOn[2] = {0.0, 4.0};
constexpr double kDecodeTol = 0.1;

const bool kConstantsChecked = [] {
  if (!(kElementScale > 0.0) || !(std::sqrt(3.0) - 1.0 > 0.0)) {
    throw DomainError("reduction constants must be positive");
  }
  return true;
}();

std::string arc_id(std::string_view tail, std::string_view head) {
  return "(" + std::string(tail) + "," + std::string(head) + ")";
}

void require_unit_interval_04(const GasNetwork& net) {
  const auto& b = net.bounds();
  if (std::abs(b.pi_min) > 1e-12 || std::abs(b.pi_max - 4.0) > 1e-12) {
    throw DomainError("binary decision gadget requires potential bounds [0, 4]");
  }
}

}  // namespace

void X3CInstance::validate() const {
  if (elements.size() % 3 != 0) {
    throw ValidationError(ValidationKind::kSizeMismatch, "X3C ground set size must be 3q");
  }
  std::set<std::string> known;
  for (const auto& e : elements) {
    if (!known.insert(e).second) throw ValidationError(ValidationKind::kDuplicateId, "element " + e);
  }
  for (const auto& t : triples) {
    std::set<std::string> members(t.begin(), t.end());
    if (members.size() != 3) {
      throw ValidationError(ValidationKind::kDuplicateId, "triple with repeated element");
    }
    for (const auto& e : t) {
      if (known.count(e) == 0) throw ValidationError(ValidationKind::kUnknownNode, "element " + e);
    }
  }
}

double element_decision_beta() { return kElementScale * kElementScale; }
double decision_sink_beta() {
  const double r = std::sqrt(3.0) - 1.0;
  return r * r;
}
double decision_balance() { return 3.0 * 1.2 / kElementScale + (2.0 + 2.0 / kSqrt5); }
double element_balance(std::size_t degree) {
  return 1.0 - 1.2 * static_cast<double>(degree) / kElementScale;
}

std::string gadget_source_id(std::string_view u) { return std::string(u) + "/src"; }
std::string gadget_sink_id(std::string_view u) { return std::string(u) + "/snk"; }
std::string decision_zero_id(std::string_view u) { return std::string(u) + "/v"; }
std::string decision_w_id(std::string_view u) { return std::string(u) + "/w"; }

GasNetwork attach_fixed_potential(const GasNetwork& net, std::string_view u, double pi_star) {
  const auto& b = net.bounds();
  if (!(b.pi_min < pi_star && pi_star < b.pi_max)) {
    throw DomainError("fixed-potential gadget needs pi_min < pi* < pi_max");
  }
  GasNetwork out = net;
  out.node_index(u);
  const std::string src = gadget_source_id(u);
  const std::string snk = gadget_sink_id(u);
  out.add_node(src, 2.0);
  out.add_node(snk, -2.0);
  out.add_arc(arc_id(src, u), src, u, b.pi_max - pi_star);
  out.add_arc(arc_id(u, snk), u, snk, pi_star - b.pi_min);
  return out;
}

GasNetwork attach_boundary_potential(const GasNetwork& net, std::string_view u, double pi_star) {
  const auto& b = net.bounds();
  GasNetwork out = net;
  out.node_index(u);
  if (pi_star == b.pi_min) {
    const std::string src = gadget_source_id(u);
    out.add_node(src, 2.0);
    out.add_arc(arc_id(src, u), src, u, b.width());
    out.add_to_balance(u, -2.0);
  } else if (pi_star == b.pi_max) {
    const std::string snk = gadget_sink_id(u);
    out.add_node(snk, -2.0);
    out.add_arc(arc_id(u, snk), u, snk, b.width());
    out.add_to_balance(u, 2.0);
  } else {
    throw DomainError("boundary gadget needs pi* equal to pi_min or pi_max");
  }
  return out;
}

GasNetwork attach_binary_decision(const GasNetwork& net, std::string_view u) {
  require_unit_interval_04(net);
  GasNetwork out = net;
  out.node_index(u);
  const std::string v = decision_zero_id(u);
  const std::string w = decision_w_id(u);
  out.add_node(v, -2.0);
  out.add_node(w, -2.0 / kSqrt5);
  out.add_arc(arc_id(u, v), u, v, 1.0);
  out.add_arc(arc_id(u, w), u, w, 1.0);
  out.add_to_balance(u, 2.0 + 2.0 / kSqrt5);
  out = attach_boundary_potential(out, v, 0.0);
  out = attach_fixed_potential(out, w, 0.8);
  return out;
}

ReducedInstance reduce_x3c(const X3CInstance& inst) {
  inst.validate();
  (void)kConstantsChecked;
  ReducedInstance red;
  red.source = inst;
  GasNetwork net(PotentialInterval{0.0, 4.0});

  std::map<std::string, std::size_t> degree;
  for (const auto& t : inst.triples) {
    for (const auto& e : t) ++degree[e];
  }
  for (const auto& e : inst.elements) {
    // such an instance is trivially NO and its element gadget would be an unbalanced component
    if (degree[e] == 0) throw DomainError("element " + e + " lies in no triple");
  }
  for (const auto& e : inst.elements) {
    const std::string ux = "ux_" + e;
    const std::string vx = "vx_" + e;
    net.add_node(ux, element_balance(degree[e]));
    net.add_node(vx, -1.0);
    red.element_nodes.emplace(e, std::make_pair(ux, vx));
  }
  for (std::size_t c = 0; c < inst.triples.size(); ++c) {
    const std::string uc = "uC_" + std::to_string(c);
    // The gadget adds 2 + 2/sqrt(5); the rest balances the three element arcs.
    net.add_node(uc, 3.0 * 1.2 / kElementScale);
    red.decision_nodes.push_back(uc);
    for (const auto& e : inst.triples[c]) {
      const auto& [ux, vx] = red.element_nodes.at(e);
      net.add_arc(arc_id(ux, uc), ux, uc, element_decision_beta());
      net.add_arc(arc_id(uc, vx), uc, vx, decision_sink_beta());
    }
  }
  for (const auto& e : inst.elements) {
    const auto& [ux, vx] = red.element_nodes.at(e);
    net = attach_fixed_potential(net, ux, 16.0 / 25.0);
    net = attach_fixed_potential(net, vx, 1.0);
    red.forced_potentials[ux] = 16.0 / 25.0;
    red.forced_potentials[vx] = 1.0;
    red.forced_potentials[gadget_source_id(ux)] = 4.0;
    red.forced_potentials[gadget_sink_id(ux)] = 0.0;
    red.forced_potentials[gadget_source_id(vx)] = 4.0;
    red.forced_potentials[gadget_sink_id(vx)] = 0.0;
  }
  for (const auto& uc : red.decision_nodes) {
    net = attach_binary_decision(net, uc);
    const std::string v = decision_zero_id(uc);
    const std::string w = decision_w_id(uc);
    red.forced_potentials[v] = 0.0;
    red.forced_potentials[gadget_source_id(v)] = 4.0;
    red.forced_potentials[w] = 0.8;
    red.forced_potentials[gadget_source_id(w)] = 4.0;
    red.forced_potentials[gadget_sink_id(w)] = 0.0;
  }
  net.validate();
  red.target_b = net.balances();
  red.network = std::move(net);
  return red;
}

bool is_exact_cover(const X3CInstance& inst, const Cover& cover) {
  if (cover.size() != inst.q()) return false;
  std::set<std::string> seen;
  for (std::size_t c : cover) {
    if (c >= inst.triples.size()) return false;
    for (const auto& e : inst.triples[c]) {
      if (!seen.insert(e).second) return false;
    }
  }
  return seen.size() == inst.elements.size();
}

std::optional<Cover> solve_x3c_bruteforce(const X3CInstance& inst, double limit) {
  inst.validate();
  const std::size_t n = inst.triples.size();
  const std::size_t q = inst.q();
  if (q == 0) return Cover{};
  if (q > n) return std::nullopt;
  double count = 1.0;
  for (std::size_t i = 0; i < q; ++i) {
    count = count * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  if (count > limit) throw SizeLimit("X3C brute force: too many q-subsets");

  Cover pick(q);
  for (std::size_t i = 0; i < q; ++i) pick[i] = i;
  while (true) {
    if (is_exact_cover(inst, pick)) return pick;
    std::size_t pos = q;
    while (pos > 0 && pick[pos - 1] == n - q + (pos - 1)) --pos;
    if (pos == 0) return std::nullopt;
    ++pick[pos - 1];
    for (std::size_t i = pos; i < q; ++i) pick[i] = pick[i - 1] + 1;
  }
}

StagePotentials assemble_witness(const ReducedInstance& red, const Cover& on) {
  const GasNetwork& net = red.network;
  StagePotentials stages(2, PotentialAssignment::Constant(net.num_nodes(), 2.0));
  for (const auto& [id, value] : red.forced_potentials) {
    const Index i = net.node_index(id);
    stages[0][i] = value;
    stages[1][i] = value;
  }
  const std::set<std::size_t> on_set(on.begin(), on.end());
  for (std::size_t c = 0; c < red.decision_nodes.size(); ++c) {
    const Index i = net.node_index(red.decision_nodes[c]);
    const double* state = on_set.count(c) != 0 ? kOn : kOff;
    stages[0][i] = state[0];
    stages[1][i] = state[1];
  }
  return stages;
}

std::optional<Cover> decode_cover(const ReducedInstance& red, const StagePotentials& stages) {
  if (stages.size() != 2) throw DecodeError("decoding needs exactly two stages");
  Cover on;
  for (std::size_t c = 0; c < red.decision_nodes.size(); ++c) {
    const Index i = red.network.node_index(red.decision_nodes[c]);
    const double p1 = stages[0][i];
    const double p2 = stages[1][i];
    auto near = [](double a, double b) { return std::abs(a - b) <= kDecodeTol; };
    if (near(p1, kOff[0]) && near(p2, kOff[1])) continue;
    if ((near(p1, kOn[0]) && near(p2, kOn[1])) || (near(p1, kOn[1]) && near(p2, kOn[0]))) {
      on.push_back(c);
      continue;
    }
    throw DecodeError("decision node " + red.decision_nodes[c] + " is neither on nor off");
  }
  if (!is_exact_cover(red.source, on)) return std::nullopt;
  return on;
}

}  // namespace gasflow::reduction
