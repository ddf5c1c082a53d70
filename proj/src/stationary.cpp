#include "gasflow/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gasflow/weymouth.hpp"

namespace gasflow {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

// One weakly connected component, with its arcs and the split of its nodes
// into Dirichlet nodes (pins or the ground node) and free unknowns.
struct ComponentSystem {
  std::vector<Index> nodes;
  std::vector<Index> arcs;
  std::vector<Index> free;       // unknowns
  std::vector<Index> balanced;   // nodes whose balance is enforced (free + unpinned ground)
  std::vector<Index> local_of;   // global node -> position in `free`, or -1
};

// dual(next) - dual(cur), summed term by term so that tiny changes are not
// lost against the magnitude of the dual itself.
double local_dual_change(const GasNetwork& net, const ComponentSystem& sys, const BalanceVector& b,
                         const PotentialAssignment& cur, const PotentialAssignment& next) {
  double change = 0.0;
  for (Index v : sys.free) change += b[v] * (next[v] - cur[v]);
  for (Index a : sys.arcs) {
    const Arc& arc = net.arc(a);
    const double d0 = std::abs(cur[arc.tail] - cur[arc.head]);
    const double d1 = std::abs(next[arc.tail] - next[arc.head]);
    change -= 2.0 * (d1 * std::sqrt(d1) - d0 * std::sqrt(d0)) / (3.0 * std::sqrt(arc.beta));
  }
  return change;
}

// b - outflow at every node of the component (entries outside stay untouched).
void balance_gap(const GasNetwork& net, const ComponentSystem& sys, const BalanceVector& b,
                 const PotentialAssignment& pi, Eigen::VectorXd& gap) {
  for (Index v : sys.nodes) gap[v] = b[v];
  for (Index a : sys.arcs) {
    const Arc& arc = net.arc(a);
    const double x = arc_flow(pi[arc.tail], pi[arc.head], arc.beta);
    gap[arc.tail] -= x;
    gap[arc.head] += x;
  }
}

double max_abs_over(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
  double m = 0.0;
  for (Index i : idx) m = std::max(m, std::abs(v[i]));
  return m;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
  Eigen::VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = v[idx[k]];
  return out;
}

int solve_component(const GasNetwork& net, const ComponentSystem& sys, const BalanceVector& b,
                    const SolverConfig& cfg, PotentialAssignment& pi) {
  const Index n = static_cast<Index>(sys.free.size());
  Eigen::VectorXd gap = Eigen::VectorXd::Zero(net.num_nodes());
  Eigen::VectorXd trial_gap = gap;
  balance_gap(net, sys, b, pi, gap);
  if (n == 0) return 0;

  int iter = 0;
  while (max_abs_over(gap, sys.balanced) > cfg.balance_tol) {
    if (iter >= cfg.max_iterations) {
      throw NonConvergence(max_abs_over(gap, sys.balanced), iter);
    }
    ++iter;

    // Reduced weighted Laplacian on the free nodes.
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (Index a : sys.arcs) {
      const Arc& arc = net.arc(a);
      const double w =
          arc_conductance(pi[arc.tail] - pi[arc.head], arc.beta, cfg.regularization_eps);
      const Index i = sys.local_of[static_cast<std::size_t>(arc.tail)];
      const Index j = sys.local_of[static_cast<std::size_t>(arc.head)];
      if (i >= 0) lap(i, i) += w;
      if (j >= 0) lap(j, j) += w;
      if (i >= 0 && j >= 0) {
        lap(i, j) -= w;
        lap(j, i) -= w;
      }
    }
    const Eigen::VectorXd grad = gather(gap, sys.free);
    Eigen::LLT<Eigen::MatrixXd> llt(lap);
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      step = lap.ldlt().solve(grad);
    }

    const double slope = grad.dot(step);
    const double norm0 = grad.norm();
    double t = 1.0;
    bool accepted = false;
    PotentialAssignment trial = pi;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
      for (Index k = 0; k < n; ++k) trial[sys.free[static_cast<std::size_t>(k)]] =
          pi[sys.free[static_cast<std::size_t>(k)]] + t * step[k];
      balance_gap(net, sys, b, trial, trial_gap);
      const double gain = local_dual_change(net, sys, b, pi, trial);
      const double norm1 = gather(trial_gap, sys.free).norm();
      // Ascent on the dual, or a sufficient decrease of the gradient norm.
      if ((gain > 0.0 && gain >= kArmijo * t * slope) || norm1 <= (1.0 - kArmijo * t) * norm0) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NonConvergence(max_abs_over(gap, sys.balanced), iter);
    pi.swap(trial);
    gap.swap(trial_gap);
  }
  return iter;
}

}  // namespace

StationarySolution solve_b_flow(const GasNetwork& net,
                                const std::optional<BalanceVector>& balance_override,
                                const SolverConfig& cfg) {
  if (!(cfg.balance_tol > 0.0) || !(cfg.gap_tol > 0.0) || !(cfg.regularization_eps > 0.0)) {
    throw DomainError("solver tolerances must be positive");
  }
  BalanceVector b = balance_override ? *balance_override : net.balances();
  net.validate_balances(b);

  std::optional<Index> requested_ground;
  if (cfg.ground_node) requested_ground = net.node_index(*cfg.ground_node);

  const auto comps = net.components();
  std::vector<Index> comp_of(static_cast<std::size_t>(net.num_nodes()));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (Index v : comps[c]) comp_of[static_cast<std::size_t>(v)] = static_cast<Index>(c);
  }
  std::vector<std::vector<Index>> comp_arcs(comps.size());
  for (Index a = 0; a < net.num_arcs(); ++a) {
    comp_arcs[static_cast<std::size_t>(comp_of[static_cast<std::size_t>(net.arc(a).tail)])]
        .push_back(a);
  }

  PotentialAssignment pi = PotentialAssignment::Zero(net.num_nodes());
  std::vector<Index> enforced;  // every node whose balance is enforced
  int iterations = 0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    ComponentSystem sys;
    sys.nodes = comps[c];
    sys.arcs = comp_arcs[c];
    sys.local_of.assign(static_cast<std::size_t>(net.num_nodes()), -1);

    std::vector<Index> pins;
    for (Index v : sys.nodes) {
      if (net.node(v).fixed_potential) pins.push_back(v);
    }
    double ground_value = 0.0;
    Index ground = -1;
    if (pins.empty()) {
      ground = sys.nodes.front();
      if (requested_ground && comp_of[static_cast<std::size_t>(*requested_ground)] ==
                                  static_cast<Index>(c)) {
        ground = *requested_ground;
      }
      // Remove round-off in the balance sum so the ground row is consistent.
      double mean = 0.0;
      for (Index v : sys.nodes) mean += b[v];
      mean /= static_cast<double>(sys.nodes.size());
      for (Index v : sys.nodes) b[v] -= mean;
    } else {
      ground_value = *net.node(pins.front()).fixed_potential;
    }

    for (Index v : sys.nodes) {
      if (net.node(v).fixed_potential) {
        pi[v] = *net.node(v).fixed_potential;
        continue;
      }
      pi[v] = ground_value;
      sys.balanced.push_back(v);
      if (v == ground) continue;
      sys.local_of[static_cast<std::size_t>(v)] = static_cast<Index>(sys.free.size());
      sys.free.push_back(v);
    }
    iterations += solve_component(net, sys, b, cfg, pi);
    enforced.insert(enforced.end(), sys.balanced.begin(), sys.balanced.end());
  }

  StationarySolution sol;
  sol.potentials = std::move(pi);
  sol.flow = induced_flow(net, sol.potentials);
  sol.realized_balance = net_outflow(net, sol.flow);
  BalanceVector effective = sol.realized_balance;
  for (Index v : enforced) effective[v] = b[v];
  sol.residual = max_abs_over(sol.realized_balance - effective, enforced);
  sol.primal_objective = primal_objective(net, sol.flow);
  sol.dual_objective = dual_objective(net, effective, sol.potentials);
  sol.iterations = iterations;
  return sol;
}

double primal_objective(const GasNetwork& net, const FlowVector& flow) {
  double z = 0.0;
  for (Index a = 0; a < net.num_arcs(); ++a) {
    const double x = std::abs(flow[a]);
    z += net.arc(a).beta / 3.0 * x * x * x;
  }
  return z;
}

double dual_objective(const GasNetwork& net, const BalanceVector& balances,
                      const PotentialAssignment& pi) {
  double value = balances.dot(pi);
  for (Index a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    const double d = std::abs(pi[arc.tail] - pi[arc.head]);
    value -= 2.0 * d * std::sqrt(d) / (3.0 * std::sqrt(arc.beta));
  }
  return value;
}

FeasibilityCheck check_feasibility(const PotentialAssignment& pi, const PotentialInterval& bounds,
                                   double tol) {
  if (pi.size() == 0) return {true, std::numeric_limits<double>::infinity()};
  const double margin = std::min(pi.minCoeff() - bounds.pi_min, bounds.pi_max - pi.maxCoeff());
  return {margin >= -tol, margin};
}

PotentialAssignment translate_potentials(const PotentialAssignment& pi, double shift) {
  return pi.array() + shift;
}

double centering_shift(const PotentialAssignment& pi, const PotentialInterval& bounds) {
  if (pi.size() == 0) return 0.0;
  return bounds.midpoint() - 0.5 * (pi.minCoeff() + pi.maxCoeff());
}

}  // namespace gasflow
