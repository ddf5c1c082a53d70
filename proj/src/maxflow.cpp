#include "gasflow/maxflow.hpp"

#include <cmath>

namespace gasflow {

namespace {

GasNetwork without_pins(const GasNetwork& net) {
  if (!net.has_fixed_potentials()) return net;
  GasNetwork copy = net;
  copy.clear_fixed_potentials();
  return copy;
}

double potential_range(const PotentialAssignment& pi) { return pi.maxCoeff() - pi.minCoeff(); }

}  // namespace

StGap st_potential_gap(const GasNetwork& net, std::string_view s, std::string_view t,
                       double flow_value, const SolverConfig& cfg) {
  if (!(flow_value > 0.0)) throw DomainError("s-t flow value must be positive");
  const GasNetwork plain = without_pins(net);
  const Index si = plain.node_index(s);
  const Index ti = plain.node_index(t);
  if (si == ti) throw DomainError("source and sink must differ");
  const auto labels = plain.component_labels();
  if (labels[static_cast<std::size_t>(si)] != labels[static_cast<std::size_t>(ti)]) {
    throw DomainError("source and sink lie in different components");
  }

  BalanceVector b = BalanceVector::Zero(plain.num_nodes());
  b[si] = flow_value;
  b[ti] = -flow_value;
  StGap out;
  out.solution = solve_b_flow(plain, b, cfg);
  out.gap = out.solution.potentials[si] - out.solution.potentials[ti];
  const double identity = 3.0 * out.solution.primal_objective / flow_value;
  out.identity_error = out.gap > 0.0 ? std::abs(identity - out.gap) / out.gap : 0.0;
  return out;
}

MaxFlowResult max_stationary_st_flow(const GasNetwork& net, std::string_view s,
                                     std::string_view t, const SolverConfig& cfg,
                                     BisectionTarget target) {
  const GasNetwork plain = without_pins(net);
  const Index si = plain.node_index(s);
  const double width = plain.bounds().width();

  // Every unit leaving s crosses an arc incident to s, each of which carries
  // at most sqrt(width / beta).
  double upper = 0.0;
  for (const Arc& a : plain.arcs()) {
    if (a.tail == si || a.head == si) upper += std::sqrt(width / a.beta);
  }
  if (!(upper > 0.0)) throw ZeroFlow("source has no incident arcs");

  MaxFlowResult result;
  auto measure = [&](double value) {
    ++result.solves;
    StGap g = st_potential_gap(plain, s, t, value, cfg);
    const double m = target == BisectionTarget::kTerminalGap
                         ? g.gap
                         : potential_range(g.solution.potentials);
    return std::make_pair(m, std::move(g));
  };

  double lo = upper * 1e-9;
  double hi = upper;
  auto [lo_measure, lo_gap] = measure(lo);
  if (lo_measure > width) throw ZeroFlow("even a vanishing flow violates the potential bounds");

  const auto [hi_measure, hi_gap] = measure(hi);
  if (hi_measure <= width) {
    lo = hi;
    lo_measure = hi_measure;
    lo_gap = hi_gap;
  } else {
    const double stop = 1e-9 * std::max(1.0, upper);
    while (hi - lo > stop) {
      const double mid = 0.5 * (lo + hi);
      auto [m, g] = measure(mid);
      if (m <= width) {
        if (!(m > lo_measure)) result.monotone = false;
        lo = mid;
        lo_measure = m;
        lo_gap = std::move(g);
      } else {
        hi = mid;
      }
    }
  }

  result.value = lo;
  result.gap = lo_gap.gap;
  result.bracket_width = hi - lo;
  result.target = target;
  result.solution = std::move(lo_gap.solution);

  const double range = potential_range(result.solution.potentials);
  if (target == BisectionTarget::kTerminalGap && range > result.gap + 1e-9 * width) {
    // Some node left [pi_t, pi_s]; the terminal gap does not bound the range.
    MaxFlowResult fallback =
        max_stationary_st_flow(net, s, t, cfg, BisectionTarget::kFullRange);
    fallback.solves += result.solves;
    return fallback;
  }

  const double shift = plain.bounds().pi_max - result.solution.potentials.maxCoeff();
  result.solution.potentials = translate_potentials(result.solution.potentials, shift);
  return result;
}

}  // namespace gasflow
