#pragma once

#include <optional>
#include <string>
#include <utility>

#include "gasflow/network.hpp"

namespace gasflow {

struct SolverConfig {
  double balance_tol = 1e-9;
  double gap_tol = 1e-7;
  int max_iterations = 200;
  /// Lower clamp on |pi_u - pi_v| inside the Newton Hessian weights.
  double regularization_eps = 1e-24;
  /// Ground node of its component; other components pick automatically.
  std::optional<std::string> ground_node;
};

struct StationarySolution {
  FlowVector flow;
  PotentialAssignment potentials;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// Max absolute balance violation over the non-pinned nodes.
  double residual = 0.0;
  int iterations = 0;
  /// Realized net outflow per node. At pinned nodes this is the external
  /// supply the pin had to absorb; elsewhere it matches the balances.
  Eigen::VectorXd realized_balance;
};

/// Stationary gas b-flow by damped Newton ascent on the concave dual of the
/// convex min-cost flow problem  min sum_a beta_a/3 |x_a|^3  s.t. Nx = b.
///
/// Each weakly connected component is solved on its own. A component is
/// grounded at its pinned nodes (fixed_potential) if it has any, else at one
/// ground node held at 0. Pinned nodes act as Dirichlet conditions and their
/// balances are not enforced.
///
/// Throws ValidationError if an unpinned component has nonzero balance sum
/// and NonConvergence if max_iterations is exceeded.
StationarySolution solve_b_flow(const GasNetwork& net,
                                const std::optional<BalanceVector>& balance_override = std::nullopt,
                                const SolverConfig& cfg = {});

/// sum_a beta_a / 3 * |x_a|^3
double primal_objective(const GasNetwork& net, const FlowVector& flow);

/// sum_v b_v pi_v - 2 sum_(u,v) |pi_u - pi_v|^{3/2} / (3 sqrt(beta))
double dual_objective(const GasNetwork& net, const BalanceVector& balances,
                      const PotentialAssignment& pi);

struct FeasibilityCheck {
  bool feasible = false;
  /// min over nodes of min(pi - pi_min, pi_max - pi); negative when violated.
  double worst_margin = 0.0;
};

FeasibilityCheck check_feasibility(const PotentialAssignment& pi, const PotentialInterval& bounds,
                                   double tol = 0.0);

PotentialAssignment translate_potentials(const PotentialAssignment& pi, double shift);

/// Shift that centres the potential range inside `bounds`, maximizing the
/// worst feasibility margin over all translations.
double centering_shift(const PotentialAssignment& pi, const PotentialInterval& bounds);

}  // namespace gasflow
