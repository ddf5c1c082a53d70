#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasflow/kstage.hpp"

namespace gasflow::reduction {

/// Exact Cover by 3-Sets: 3q elements and a family of 3-element subsets.
struct X3CInstance {
  std::vector<std::string> elements;
  std::vector<std::array<std::string, 3>> triples;

  /// Throws ValidationError unless |elements| % 3 == 0, ids are unique and
  /// every triple consists of three distinct known elements.
  void validate() const;
  std::size_t q() const { return elements.size() / 3; }
};

using Cover = std::vector<std::size_t>;  // triple indices, ascending

/// beta on (u^x, u^C): (2 - (2/5) sqrt(21))^2
double element_decision_beta();
/// beta on (u^C, v^x): (sqrt(3) - 1)^2
double decision_sink_beta();
/// 3 * (6/5) / (2 - (2/5) sqrt(21)) + 2 + 2/sqrt(5)
double decision_balance();
/// 1 - (6/5) deg / (2 - (2/5) sqrt(21))
double element_balance(std::size_t degree);

/// Ids of the auxiliary nodes the gadgets add around node `u`.
std::string gadget_source_id(std::string_view u);
std::string gadget_sink_id(std::string_view u);
std::string decision_zero_id(std::string_view u);
std::string decision_w_id(std::string_view u);

/// Adds u^s -> u (beta = pi_max - pi*, b = 2) and u -> u^t
/// (beta = pi* - pi_min, b = -2). In any feasible 2-stage flow meeting these
/// balances u sits at pi* in both stages. Requires pi_min < pi* < pi_max,
/// else DomainError.
GasNetwork attach_fixed_potential(const GasNetwork& net, std::string_view u, double pi_star);

/// Holds u at pi* = pi_min (only the source arc, beta = width) or at
/// pi* = pi_max (only the sink arc); the 2 units the one-sided arc carries
/// per two stages are charged to u's balance. DomainError unless pi* is a
/// bound.
GasNetwork attach_boundary_potential(const GasNetwork& net, std::string_view u, double pi_star);

/// Binary decision gadget on u (bounds must be [0, 4]): arcs u -> v and
/// u -> w with beta = 1, v held at 0 with b_v = -2, w held at 4/5 with
/// b_w = -2/sqrt(5), and 2 + 2/sqrt(5) added to b_u. Feasible two-stage
/// potentials of u are then (1, 1), (0, 4) or (4, 0).
GasNetwork attach_binary_decision(const GasNetwork& net, std::string_view u);

struct ReducedInstance {
  GasNetwork network;
  X3CInstance source;
  /// decision_nodes[i] is the u^C node of triple i.
  std::vector<std::string> decision_nodes;
  /// element -> (u^x, v^x)
  std::map<std::string, std::pair<std::string, std::string>> element_nodes;
  BalanceVector target_b;
  /// Nodes whose potential is forced in both stages of any feasible flow,
  /// with that potential (gadget terminals and held nodes).
  std::map<std::string, double> forced_potentials;
};

/// Builds the 2-stage gas b-flow instance (bounds [0, 4]) whose feasible
/// solutions correspond to exact covers.
ReducedInstance reduce_x3c(const X3CInstance& inst);

/// First exact cover in lexicographic order of q-subsets, if any. Throws
/// SizeLimit if C(|triples|, q) exceeds `limit`.
std::optional<Cover> solve_x3c_bruteforce(const X3CInstance& inst, double limit = 1e6);

bool is_exact_cover(const X3CInstance& inst, const Cover& cover);

/// Two-stage potentials with the decision nodes of `on` switched on (0 then 4)
/// and every other decision node off (1, 1); gadget nodes at their forced
/// values. Feasible exactly when `on` is an exact cover.
StagePotentials assemble_witness(const ReducedInstance& red, const Cover& on);

/// Reads the on/off state of every decision node (within 0.1 of (1,1) is
/// off, within 0.1 of {0,4} is on). Returns the on set if it is an exact
/// cover. Throws DecodeError if some decision node is in neither state.
std::optional<Cover> decode_cover(const ReducedInstance& red, const StagePotentials& stages);

}  // namespace gasflow::reduction
