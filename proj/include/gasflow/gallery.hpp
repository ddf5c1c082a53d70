#pragma once

#include <vector>

#include "gasflow/kstage.hpp"

namespace gasflow::gallery {

/// Potential pump on the path s -> u -> v -> t (all beta = 1, bounds [0, 4]).
/// Three stages with s and t held at 2 push 2 - sqrt(2) from s to t.
struct Example1 {
  GasNetwork network;
  StagePotentials stages;
  /// b_s = 2 - sqrt(2) = -b_t.
  BalanceVector target_b;
};
Example1 gen_example1();

/// Path s -> s' -> u -> v -> t' -> t with beta = 27 + 18 sqrt(2) on the two
/// outer arcs and 1 elsewhere, bounds [0, 4], zero balances.
GasNetwork gen_example2();
/// Stages with s at 4, t at 0, s' and t' at 2 and the example-1 pump inside.
StagePotentials gen_example2_instationary();
/// Maximum stationary s-t-flow value sqrt((76 - 48 sqrt(2)) / 219).
double example2_max_flow_value();
/// Optimal stationary potentials of example 2 (s at 4, t at 0), node order
/// of gen_example2().
PotentialAssignment example2_optimal_potentials();

/// Example 2 with the s'-t' section replaced by `ell` chained copies that
/// share their junction nodes j_0 = s', ..., j_ell = t'.
GasNetwork gen_serial(int ell);
/// Each copy operated as the example-1 pump; junctions at 2.
StagePotentials gen_serial_instationary(int ell);

struct Example3Params {
  int q = 4;
  double epsilon = 0.5;

  /// 2 / sqrt(1 - epsilon) - 2
  double delta() const;
};

struct Example3 {
  /// Ladder u_0, v_0, ..., u_q, v_q; balances b are the full two-stage demand.
  GasNetwork network;
  /// Induces one unit on every arc, i.e. the stationary b/2-flow.
  PotentialAssignment stationary;
  /// Stage 1: u at 0, v at 4. Stage 2: ladder with steps (1 - epsilon) delta^2.
  StagePotentials stages;
};

/// Bounds are [0, max(4, q (1 - epsilon) delta^2, 1 + q epsilon)] so both the
/// stationary and the two-stage solution fit. Throws ValidationError for
/// epsilon outside (0, 1) or q < 1.
Example3 gen_example3(const Example3Params& params);

/// Known constructions matching `net` by node-id convention (example 1,
/// example 2, serial composition), usable as structured search starts.
std::vector<StagePotentials> structured_starts(const GasNetwork& net, int k);

}  // namespace gasflow::gallery
