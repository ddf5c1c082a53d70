#pragma once

#include <cmath>

#include "gasflow/network.hpp"

namespace gasflow {

/// f(sigma) = sgn(sigma) * sqrt(|sigma|). copysign keeps f exactly odd,
/// including f(-0.0) == -0.0.
template <typename Scalar>
Scalar signed_sqrt(Scalar sigma) {
  using std::abs;
  using std::copysign;
  using std::sqrt;
  return copysign(sqrt(abs(sigma)), sigma);
}

namespace detail {
void throw_nonpositive_beta(double beta);
}

/// Flow on an arc whose endpoint potentials are given; the unique x with
/// beta * x * |x| = pi_tail - pi_head.
template <typename Scalar>
Scalar arc_flow(Scalar pi_tail, Scalar pi_head, Scalar beta) {
  using std::sqrt;
  if (!(beta > Scalar(0))) detail::throw_nonpositive_beta(static_cast<double>(beta));
  return signed_sqrt(pi_tail - pi_head) / sqrt(beta);
}

/// Potential drop beta * x * |x| carried by flow x.
template <typename Scalar>
Scalar potential_drop(Scalar x, Scalar beta) {
  using std::abs;
  if (!(beta > Scalar(0))) detail::throw_nonpositive_beta(static_cast<double>(beta));
  return beta * x * abs(x);
}

/// d(arc_flow)/d(pi_tail) = 1 / (2 sqrt(beta |delta|)), with |delta| clamped
/// from below by `eps` so the derivative stays finite at delta = 0.
template <typename Scalar>
Scalar arc_conductance(Scalar delta, Scalar beta, Scalar eps) {
  using std::abs;
  using std::max;
  using std::sqrt;
  return Scalar(1) / (Scalar(2) * sqrt(beta * max(abs(delta), eps)));
}

/// Per-arc flows induced by node potentials.
FlowVector induced_flow(const GasNetwork& net, const PotentialAssignment& pi);

/// Net outflow of the induced flow at every node.
Eigen::VectorXd induced_imbalance(const GasNetwork& net, const PotentialAssignment& pi);

}  // namespace gasflow
