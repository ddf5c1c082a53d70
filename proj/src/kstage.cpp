#include "gasflow/kstage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gasflow/weymouth.hpp"

namespace gasflow {

namespace {

void check_stage_sizes(const GasNetwork& net, const StagePotentials& stages) {
  if (stages.empty()) throw DomainError("a k-stage flow needs k >= 1 stages");
  for (const auto& pi : stages) {
    if (pi.size() != net.num_nodes()) {
      throw ValidationError(ValidationKind::kSizeMismatch, "stage potential length");
    }
  }
}

}  // namespace

KStageFlow::KStageFlow(const GasNetwork& net, StagePotentials stage_potentials)
    : potentials_(std::move(stage_potentials)) {
  check_stage_sizes(net, potentials_);
  flows_.reserve(potentials_.size());
  balances_.reserve(potentials_.size());
  for (const auto& pi : potentials_) {
    flows_.push_back(induced_flow(net, pi));
    balances_.push_back(net_outflow(net, flows_.back()));
  }
}

BalanceVector KStageFlow::accumulated_balance() const {
  const Index n = balances_.front().size();
  BalanceVector acc(n);
  std::vector<double> terms(balances_.size());
  for (Index v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < balances_.size(); ++i) terms[i] = balances_[i][v];
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double x : terms) sum += x;
    acc[v] = sum;
  }
  return acc;
}

KStageReport verify_kstage(const GasNetwork& net, const StagePotentials& stages,
                           const BalanceVector& target_b, const PotentialInterval& bounds,
                           double tol) {
  if (target_b.size() != net.num_nodes()) {
    throw ValidationError(ValidationKind::kSizeMismatch, "target balance length");
  }
  const KStageFlow flow(net, stages);
  const BalanceVector acc = flow.accumulated_balance();

  KStageReport report;
  report.max_balance_error = (acc - target_b).cwiseAbs().maxCoeff();
  for (const auto& pi : stages) {
    for (Index v = 0; v < pi.size(); ++v) {
      report.max_bound_violation = std::max(
          {report.max_bound_violation, bounds.pi_min - pi[v], pi[v] - bounds.pi_max});
    }
  }
  report.feasible = report.max_balance_error <= tol && report.max_bound_violation <= tol;

  std::vector<Index> support;
  for (Index v = 0; v < target_b.size(); ++v) {
    if (std::abs(target_b[v]) > tol) support.push_back(v);
  }
  if (support.size() == 2 && std::abs(target_b[support[0]] + target_b[support[1]]) <= tol) {
    const Index s = target_b[support[0]] > 0.0 ? support[0] : support[1];
    report.st_value = acc[s];
  }

  report.is_stationary = true;
  for (const auto& x : flow.stage_flows()) {
    if (net.num_arcs() > 0 && (x - flow.stage_flows().front()).cwiseAbs().maxCoeff() > 1e-9) {
      report.is_stationary = false;
    }
  }
  return report;
}

KStageFlow stationary_repetition(const GasNetwork& net, const StationarySolution& sol, int k) {
  if (k < 1) throw DomainError("k must be positive");
  return KStageFlow(net, StagePotentials(static_cast<std::size_t>(k), sol.potentials));
}

PotentialAssignment average_potentials(const StagePotentials& stages) {
  if (stages.empty()) throw DomainError("no stages to average");
  PotentialAssignment avg = PotentialAssignment::Zero(stages.front().size());
  for (const auto& pi : stages) avg += pi;
  return avg / static_cast<double>(stages.size());
}

AverageConstruction average_potential_construction(const GasNetwork& net,
                                                   const PotentialAssignment& pi1,
                                                   const PotentialAssignment& pi2) {
  AverageConstruction out;
  const PotentialAssignment avg = 0.5 * (pi1 + pi2);
  out.avg_flow = induced_flow(net, avg);
  out.tilde_flow = 0.5 * (induced_flow(net, pi1) + induced_flow(net, pi2));
  out.rescaled_beta.resize(net.num_arcs());
  for (Index a = 0; a < net.num_arcs(); ++a) {
    const double tilde = out.tilde_flow[a];
    out.rescaled_beta[a] = tilde == 0.0 ? std::numeric_limits<double>::infinity()
                                        : net.arc(a).beta * out.avg_flow[a] * out.avg_flow[a] /
                                              (tilde * tilde);
  }
  return out;
}

GridOracleResult grid_oracle_kstage(const GasNetwork& net, std::string_view s, std::string_view t,
                                    int k, const GridOracleConfig& cfg) {
  if (k < 1) throw DomainError("k must be positive");
  if (!(cfg.grid_step > 0.0)) throw DomainError("grid step must be positive");
  const Index si = net.node_index(s);
  const Index ti = net.node_index(t);
  const auto& bounds = net.bounds();
  const double cells = bounds.width() / cfg.grid_step;
  const long levels = std::lround(cells) + 1;
  if (std::abs(cells - static_cast<double>(levels - 1)) > 1e-9 * std::max(1.0, cells)) {
    throw DomainError("grid step must divide the potential interval");
  }

  std::vector<Index> free;
  for (Index v = 0; v < net.num_nodes(); ++v) {
    if (!net.node(v).fixed_potential) free.push_back(v);
  }
  const int dims = k * static_cast<int>(free.size());
  if (dims > cfg.max_dimensions) {
    throw SizeLimit("grid oracle limited to " + std::to_string(cfg.max_dimensions) +
                    " dimensions, instance has " + std::to_string(dims));
  }

  // All single-stage grid configurations with their net outflows.
  std::uint64_t configs = 1;
  for (std::size_t j = 0; j < free.size(); ++j) {
    configs *= static_cast<std::uint64_t>(levels);
    if (configs > cfg.max_points) throw SizeLimit("grid oracle: too many stage configurations");
  }
  // Stages are interchangeable, so enumerate multisets of configurations.
  double multisets = 1.0;
  for (int i = 0; i < k; ++i) {
    multisets = multisets * static_cast<double>(configs + static_cast<std::uint64_t>(i)) /
                static_cast<double>(i + 1);
  }
  if (multisets > static_cast<double>(cfg.max_points)) {
    throw SizeLimit("grid oracle: too many grid points");
  }

  PotentialAssignment base(net.num_nodes());
  for (Index v = 0; v < net.num_nodes(); ++v) {
    base[v] = net.node(v).fixed_potential.value_or(bounds.pi_min);
  }
  auto config_potentials = [&](std::uint64_t c) {
    PotentialAssignment pi = base;
    for (Index v : free) {
      const auto level = static_cast<double>(c % static_cast<std::uint64_t>(levels));
      pi[v] = level == static_cast<double>(levels - 1) ? bounds.pi_max
                                                        : bounds.pi_min + level * cfg.grid_step;
      c /= static_cast<std::uint64_t>(levels);
    }
    return pi;
  };
  std::vector<Eigen::VectorXd> outflow;
  outflow.reserve(configs);
  for (std::uint64_t c = 0; c < configs; ++c) {
    outflow.push_back(induced_imbalance(net, config_potentials(c)));
  }

  GridOracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> best_combo;
  std::vector<std::uint64_t> combo(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd acc(net.num_nodes());
  while (true) {
    ++best.points;
    acc.setZero();
    for (auto c : combo) acc += outflow[c];
    bool ok = true;
    for (Index v = 0; v < net.num_nodes() && ok; ++v) {
      if (v != si && v != ti && std::abs(acc[v]) > cfg.balance_tol) ok = false;
    }
    if (ok && acc[si] > best.value) {
      best.value = acc[si];
      best_combo = combo;
    }
    // next nondecreasing tuple
    int pos = k - 1;
    while (pos >= 0 && combo[static_cast<std::size_t>(pos)] == configs - 1) --pos;
    if (pos < 0) break;
    const auto next = combo[static_cast<std::size_t>(pos)] + 1;
    for (int i = pos; i < k; ++i) combo[static_cast<std::size_t>(i)] = next;
  }
  for (auto c : best_combo) best.stages.push_back(config_potentials(c));
  return best;
}

}  // namespace gasflow
