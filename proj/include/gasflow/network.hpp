#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gasflow/errors.hpp"

namespace gasflow {

using Index = Eigen::Index;

/// Node potentials (squared pressures), one entry per node in network order.
using PotentialAssignment = Eigen::VectorXd;
/// Signed arc flows, one entry per arc in network order.
using FlowVector = Eigen::VectorXd;
/// Node balances (supply positive, demand negative), one entry per node.
using BalanceVector = Eigen::VectorXd;

struct PotentialInterval {
  double pi_min = 0.0;
  double pi_max = 1.0;

  double width() const { return pi_max - pi_min; }
  double midpoint() const { return 0.5 * (pi_min + pi_max); }
  bool contains(double pi, double tol = 0.0) const {
    return pi >= pi_min - tol && pi <= pi_max + tol;
  }
  friend bool operator==(const PotentialInterval&, const PotentialInterval&) = default;
};

struct Node {
  std::string id;
  double balance = 0.0;
  std::optional<double> fixed_potential;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Arc {
  std::string id;
  Index tail = 0;
  Index head = 0;
  double beta = 1.0;
};

/// Directed gas network: arcs with Weymouth resistances, node balances, a
/// global potential interval and optional pinned node potentials.
///
/// Nodes and arcs keep their insertion order; that order defines the
/// layout of PotentialAssignment / FlowVector. Ids are preserved verbatim.
/// add_node/add_arc check local invariants eagerly, validate() checks the
/// global ones (component balances, pinned potentials within bounds).
class GasNetwork {
 public:
  GasNetwork() = default;
  explicit GasNetwork(PotentialInterval bounds);

  Index add_node(std::string id, double balance = 0.0,
                 std::optional<double> fixed_potential = std::nullopt);
  Index add_arc(std::string id, std::string_view tail, std::string_view head, double beta);

  void set_bounds(PotentialInterval bounds);
  void set_balance(std::string_view node, double balance);
  void add_to_balance(std::string_view node, double delta);
  void set_fixed_potential(std::string_view node, std::optional<double> pi);
  void clear_fixed_potentials();

  const PotentialInterval& bounds() const { return bounds_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
  Index num_arcs() const { return static_cast<Index>(arcs_.size()); }
  const Node& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Arc& arc(Index a) const { return arcs_[static_cast<std::size_t>(a)]; }

  std::optional<Index> find_node(std::string_view id) const;
  std::optional<Index> find_arc(std::string_view id) const;
  /// Throws ValidationError(kUnknownNode) if absent.
  Index node_index(std::string_view id) const;
  Index arc_index(std::string_view id) const;

  BalanceVector balances() const;
  Eigen::VectorXd betas() const;
  bool has_fixed_potentials() const;

  /// Weakly connected components; each lists node indices in ascending order,
  /// components ordered by their smallest node index.
  std::vector<std::vector<Index>> components() const;
  /// Component label per node, consistent with components().
  std::vector<Index> component_labels() const;

  /// Checks every invariant; throws ValidationError.
  void validate() const;
  /// Checks that `b` sums to zero over every component without pinned nodes.
  void validate_balances(const BalanceVector& b) const;

  /// Build a potential vector from an id-keyed map; every node must be present.
  PotentialAssignment potentials_from(const std::map<std::string, double>& by_id) const;
  std::map<std::string, double> potentials_by_id(const PotentialAssignment& pi) const;

  /// Field-by-field equality keyed by id (independent of insertion order),
  /// with exact floating point comparison.
  friend bool operator==(const GasNetwork& lhs, const GasNetwork& rhs);

 private:
  PotentialInterval bounds_{};
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::unordered_map<std::string, Index> node_lookup_;
  std::unordered_map<std::string, Index> arc_lookup_;
};

/// Net outflow per node for a flow vector: sum over out-arcs minus in-arcs.
Eigen::VectorXd net_outflow(const GasNetwork& net, const FlowVector& flow);

}  // namespace gasflow
