#include "gasflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gasflow {

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::kNonPositiveBeta: return "non-positive beta";
    case ValidationKind::kSelfLoop: return "self-loop";
    case ValidationKind::kUnbalancedComponent: return "unbalanced component";
    case ValidationKind::kFixedPotentialOutOfBounds: return "fixed potential out of bounds";
    case ValidationKind::kDuplicateId: return "duplicate id";
    case ValidationKind::kUnknownNode: return "unknown node";
    case ValidationKind::kInvalidBounds: return "invalid bounds";
    case ValidationKind::kNonFinite: return "non-finite value";
    case ValidationKind::kSizeMismatch: return "size mismatch";
  }
  return "validation error";
}

namespace {

// Relative tolerance for the zero-sum test on component balances.
constexpr double kBalanceSumTol = 1e-9;

void check_bounds(const PotentialInterval& b) {
  if (!std::isfinite(b.pi_min) || !std::isfinite(b.pi_max)) {
    throw ValidationError(ValidationKind::kNonFinite, "potential bounds");
  }
  if (!(b.pi_min < b.pi_max)) {
    throw ValidationError(ValidationKind::kInvalidBounds, "pi_min must be < pi_max");
  }
}

}  // namespace

GasNetwork::GasNetwork(PotentialInterval bounds) : bounds_(bounds) { check_bounds(bounds_); }

Index GasNetwork::add_node(std::string id, double balance, std::optional<double> fixed_potential) {
  if (!std::isfinite(balance)) {
    throw ValidationError(ValidationKind::kNonFinite, "balance of node " + id);
  }
  if (fixed_potential && !std::isfinite(*fixed_potential)) {
    throw ValidationError(ValidationKind::kNonFinite, "fixed potential of node " + id);
  }
  if (node_lookup_.count(id) != 0) {
    throw ValidationError(ValidationKind::kDuplicateId, "node " + id);
  }
  const Index idx = num_nodes();
  node_lookup_.emplace(id, idx);
  nodes_.push_back(Node{std::move(id), balance, fixed_potential});
  return idx;
}

Index GasNetwork::add_arc(std::string id, std::string_view tail, std::string_view head,
                          double beta) {
  if (arc_lookup_.count(id) != 0) {
    throw ValidationError(ValidationKind::kDuplicateId, "arc " + id);
  }
  if (!std::isfinite(beta)) {
    throw ValidationError(ValidationKind::kNonFinite, "beta of arc " + id);
  }
  if (!(beta > 0.0)) {
    throw ValidationError(ValidationKind::kNonPositiveBeta, "arc " + id);
  }
  const Index t = node_index(tail);
  const Index h = node_index(head);
  if (t == h) {
    throw ValidationError(ValidationKind::kSelfLoop, "arc " + id);
  }
  const Index idx = num_arcs();
  arc_lookup_.emplace(id, idx);
  arcs_.push_back(Arc{std::move(id), t, h, beta});
  return idx;
}

void GasNetwork::set_bounds(PotentialInterval bounds) {
  check_bounds(bounds);
  bounds_ = bounds;
}

void GasNetwork::set_balance(std::string_view node, double balance) {
  if (!std::isfinite(balance)) {
    throw ValidationError(ValidationKind::kNonFinite, "balance of node " + std::string(node));
  }
  nodes_[static_cast<std::size_t>(node_index(node))].balance = balance;
}

void GasNetwork::add_to_balance(std::string_view node, double delta) {
  const Index i = node_index(node);
  set_balance(node, nodes_[static_cast<std::size_t>(i)].balance + delta);
}

void GasNetwork::set_fixed_potential(std::string_view node, std::optional<double> pi) {
  if (pi && !std::isfinite(*pi)) {
    throw ValidationError(ValidationKind::kNonFinite, "fixed potential of " + std::string(node));
  }
  nodes_[static_cast<std::size_t>(node_index(node))].fixed_potential = pi;
}

void GasNetwork::clear_fixed_potentials() {
  for (auto& n : nodes_) n.fixed_potential.reset();
}

std::optional<Index> GasNetwork::find_node(std::string_view id) const {
  auto it = node_lookup_.find(std::string(id));
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<Index> GasNetwork::find_arc(std::string_view id) const {
  auto it = arc_lookup_.find(std::string(id));
  if (it == arc_lookup_.end()) return std::nullopt;
  return it->second;
}

Index GasNetwork::node_index(std::string_view id) const {
  if (auto i = find_node(id)) return *i;
  throw ValidationError(ValidationKind::kUnknownNode, std::string(id));
}

Index GasNetwork::arc_index(std::string_view id) const {
  if (auto i = find_arc(id)) return *i;
  throw ValidationError(ValidationKind::kUnknownNode, "arc " + std::string(id));
}

BalanceVector GasNetwork::balances() const {
  BalanceVector b(num_nodes());
  for (Index i = 0; i < num_nodes(); ++i) b[i] = node(i).balance;
  return b;
}

Eigen::VectorXd GasNetwork::betas() const {
  Eigen::VectorXd beta(num_arcs());
  for (Index a = 0; a < num_arcs(); ++a) beta[a] = arc(a).beta;
  return beta;
}

bool GasNetwork::has_fixed_potentials() const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.fixed_potential.has_value(); });
}

std::vector<Index> GasNetwork::component_labels() const {
  // union-find with path halving
  std::vector<Index> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  for (const auto& a : arcs_) {
    Index ra = find(a.tail);
    Index rb = find(a.head);
    if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
  }
  std::vector<Index> root(nodes_.size());
  for (Index i = 0; i < num_nodes(); ++i) root[static_cast<std::size_t>(i)] = find(i);

  std::vector<Index> label(nodes_.size(), -1);
  std::unordered_map<Index, Index> root_to_label;
  for (Index i = 0; i < num_nodes(); ++i) {
    auto [it, inserted] = root_to_label.emplace(root[static_cast<std::size_t>(i)],
                                                static_cast<Index>(root_to_label.size()));
    label[static_cast<std::size_t>(i)] = it->second;
  }
  return label;
}

std::vector<std::vector<Index>> GasNetwork::components() const {
  const auto label = component_labels();
  Index count = 0;
  for (Index l : label) count = std::max(count, l + 1);
  std::vector<std::vector<Index>> comps(static_cast<std::size_t>(count));
  for (Index i = 0; i < num_nodes(); ++i) {
    comps[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])].push_back(i);
  }
  return comps;
}

void GasNetwork::validate_balances(const BalanceVector& b) const {
  if (b.size() != num_nodes()) {
    throw ValidationError(ValidationKind::kSizeMismatch, "balance vector length");
  }
  if (!b.allFinite()) throw ValidationError(ValidationKind::kNonFinite, "balances");
  for (const auto& comp : components()) {
    bool pinned = false;
    double sum = 0.0;
    double scale = 1.0;
    for (Index i : comp) {
      pinned = pinned || node(i).fixed_potential.has_value();
      sum += b[i];
      scale += std::abs(b[i]);
    }
    if (!pinned && std::abs(sum) > kBalanceSumTol * scale) {
      throw ValidationError(ValidationKind::kUnbalancedComponent,
                            "component containing node " + node(comp.front()).id +
                                " has balance sum " + std::to_string(sum));
    }
  }
}

void GasNetwork::validate() const {
  check_bounds(bounds_);
  for (const auto& a : arcs_) {
    if (!(a.beta > 0.0)) throw ValidationError(ValidationKind::kNonPositiveBeta, "arc " + a.id);
    if (a.tail == a.head) throw ValidationError(ValidationKind::kSelfLoop, "arc " + a.id);
  }
  for (const auto& n : nodes_) {
    if (n.fixed_potential && !bounds_.contains(*n.fixed_potential)) {
      throw ValidationError(ValidationKind::kFixedPotentialOutOfBounds, "node " + n.id);
    }
  }
  validate_balances(balances());
}

PotentialAssignment GasNetwork::potentials_from(const std::map<std::string, double>& by_id) const {
  if (static_cast<Index>(by_id.size()) != num_nodes()) {
    throw ValidationError(ValidationKind::kSizeMismatch,
                          "potential assignment must cover exactly the node set");
  }
  PotentialAssignment pi(num_nodes());
  for (const auto& [id, value] : by_id) pi[node_index(id)] = value;
  return pi;
}

std::map<std::string, double> GasNetwork::potentials_by_id(const PotentialAssignment& pi) const {
  std::map<std::string, double> out;
  for (Index i = 0; i < num_nodes(); ++i) out.emplace(node(i).id, pi[i]);
  return out;
}

bool operator==(const GasNetwork& lhs, const GasNetwork& rhs) {
  if (!(lhs.bounds_ == rhs.bounds_) || lhs.num_nodes() != rhs.num_nodes() ||
      lhs.num_arcs() != rhs.num_arcs()) {
    return false;
  }
  for (const auto& n : lhs.nodes_) {
    auto j = rhs.find_node(n.id);
    if (!j || !(rhs.node(*j) == n)) return false;
  }
  for (const auto& a : lhs.arcs_) {
    auto j = rhs.find_arc(a.id);
    if (!j) return false;
    const Arc& b = rhs.arc(*j);
    if (b.beta != a.beta || rhs.node(b.tail).id != lhs.node(a.tail).id ||
        rhs.node(b.head).id != lhs.node(a.head).id) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd net_outflow(const GasNetwork& net, const FlowVector& flow) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(net.num_nodes());
  for (Index a = 0; a < net.num_arcs(); ++a) {
    out[net.arc(a).tail] += flow[a];
    out[net.arc(a).head] -= flow[a];
  }
  return out;
}

}  // namespace gasflow
