#pragma once

#include <string_view>

#include "gasflow/stationary.hpp"

namespace gasflow {

struct StGap {
  /// pi_s - pi_t of the stationary s-t-flow of value B.
  double gap = 0.0;
  /// |3 z* / B - gap| / gap; should be round-off small.
  double identity_error = 0.0;
  StationarySolution solution;
};

/// Solves the stationary s-t-flow of value `flow_value` (b_s = B = -b_t) and
/// reports the potential gap. Pinned potentials of `net` are ignored.
StGap st_potential_gap(const GasNetwork& net, std::string_view s, std::string_view t,
                       double flow_value, const SolverConfig& cfg = {});

enum class BisectionTarget {
  /// pi_s - pi_t reaches the width of the potential interval.
  kTerminalGap,
  /// max_v pi_v - min_v pi_v reaches the width of the potential interval.
  kFullRange,
};

struct MaxFlowResult {
  double value = 0.0;
  /// Solution at `value`, translated so that max_v pi_v = pi_max.
  StationarySolution solution;
  double gap = 0.0;
  double bracket_width = 0.0;
  /// Target actually used for the returned value.
  BisectionTarget target = BisectionTarget::kTerminalGap;
  /// Accepted lower brackets had strictly increasing gaps.
  bool monotone = true;
  int solves = 0;
};

/// Maximum feasible stationary s-t-flow by bisection on the flow value.
/// The potential gap grows with the flow value, so the maximum is where the
/// chosen target equals pi_max - pi_min. With kTerminalGap, a full-range
/// re-run is triggered if some node ends up outside [pi_t, pi_s].
MaxFlowResult max_stationary_st_flow(const GasNetwork& net, std::string_view s,
                                     std::string_view t, const SolverConfig& cfg = {},
                                     BisectionTarget target = BisectionTarget::kTerminalGap);

}  // namespace gasflow
