#include "gasflow/weymouth.hpp"

#include <string>

namespace gasflow {

namespace detail {
void throw_nonpositive_beta(double beta) {
  throw DomainError("arc resistance must be positive, got " + std::to_string(beta));
}
}  // namespace detail

FlowVector induced_flow(const GasNetwork& net, const PotentialAssignment& pi) {
  if (pi.size() != net.num_nodes()) {
    throw ValidationError(ValidationKind::kSizeMismatch, "potential assignment length");
  }
  FlowVector x(net.num_arcs());
  for (Index a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    x[a] = arc_flow(pi[arc.tail], pi[arc.head], arc.beta);
  }
  return x;
}

Eigen::VectorXd induced_imbalance(const GasNetwork& net, const PotentialAssignment& pi) {
  return net_outflow(net, induced_flow(net, pi));
}

}  // namespace gasflow
