#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gasflow/stationary.hpp"

namespace gasflow {

using StagePotentials = std::vector<PotentialAssignment>;

/// A sequence of k stationary gas flows. Flows and per-stage balances are
/// derived from the stage potentials on construction.
class KStageFlow {
 public:
  KStageFlow(const GasNetwork& net, StagePotentials stage_potentials);

  int k() const { return static_cast<int>(potentials_.size()); }
  const StagePotentials& stage_potentials() const { return potentials_; }
  const std::vector<FlowVector>& stage_flows() const { return flows_; }
  const std::vector<BalanceVector>& stage_balances() const { return balances_; }
  /// b^1 + ... + b^k, summed per node in sorted order so that the result does
  /// not depend on the order of the stages.
  BalanceVector accumulated_balance() const;

 private:
  StagePotentials potentials_;
  std::vector<FlowVector> flows_;
  std::vector<BalanceVector> balances_;
};

struct KStageReport {
  bool feasible = false;
  double max_balance_error = 0.0;
  double max_bound_violation = 0.0;
  /// Accumulated outflow at the source when the target is an s-t target.
  std::optional<double> st_value;
  bool is_stationary = false;
};

/// Checks a k-stage flow against an accumulated target balance and the
/// potential bounds. st_value is reported when the target has exactly two
/// nonzero entries of opposite sign.
KStageReport verify_kstage(const GasNetwork& net, const StagePotentials& stages,
                           const BalanceVector& target_b, const PotentialInterval& bounds,
                           double tol = 1e-9);

/// k identical copies of a stationary solution.
KStageFlow stationary_repetition(const GasNetwork& net, const StationarySolution& sol, int k);

struct AverageConstruction {
  /// Flow induced by the averaged potentials.
  FlowVector avg_flow;
  /// Average of the two stage flows.
  FlowVector tilde_flow;
  /// beta * avg^2 / tilde^2; +inf where tilde is zero.
  Eigen::VectorXd rescaled_beta;
};

AverageConstruction average_potential_construction(const GasNetwork& net,
                                                   const PotentialAssignment& pi1,
                                                   const PotentialAssignment& pi2);

/// Averaged potentials of any number of stages.
PotentialAssignment average_potentials(const StagePotentials& stages);

struct SearchConfig {
  /// Number of uniformly random starts.
  int budget = 64;
  std::uint64_t seed = 0;
  /// Extra starts tried before the random ones (e.g. known constructions).
  std::vector<StagePotentials> structured_starts;
  /// Max accumulated balance error for a point to count as feasible.
  double feasibility_tol = 1e-6;
  int max_inner_iterations = 1500;
  double gradient_eps = 1e-12;
};

struct SearchResult {
  double value = 0.0;
  StagePotentials stages;
  /// Index of the winning start (structured starts first, then the
  /// constant start, then random starts).
  int best_start = -1;
  int feasible_starts = 0;
  double max_balance_error = 0.0;
};

/// Multistart local search for a maximum k-stage s-t-flow. The potentials
/// of all stages are the unknowns; conservation at every node other than
/// s and t is enforced by an augmented quadratic penalty. Returns a lower
/// bound on the optimum. Pinned node potentials stay fixed.
SearchResult search_kstage_max_st(const GasNetwork& net, std::string_view s, std::string_view t,
                                  int k, const SearchConfig& cfg);

/// Multistart local search for a feasible k-stage b-flow. Failure is not a
/// certificate of infeasibility.
std::optional<StagePotentials> search_kstage_b_feasible(const GasNetwork& net,
                                                        const BalanceVector& target_b, int k,
                                                        const SearchConfig& cfg);

struct GridOracleConfig {
  double grid_step = 1.0;
  /// Max accumulated conservation error for a grid point to count.
  double balance_tol = 1e-9;
  int max_dimensions = 12;
  std::uint64_t max_points = 400'000'000;
};

struct GridOracleResult {
  double value = 0.0;
  StagePotentials stages;
  std::uint64_t points = 0;
};

/// Exhaustive enumeration of the k-stage s-t problem with every free
/// potential on the grid pi_min + j * step. Throws SizeLimit above the
/// configured dimension or point count.
GridOracleResult grid_oracle_kstage(const GasNetwork& net, std::string_view s, std::string_view t,
                                    int k, const GridOracleConfig& cfg = {});

}  // namespace gasflow
