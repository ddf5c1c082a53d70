#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "gasflow/kstage.hpp"
#include "gasflow/weymouth.hpp"

namespace gasflow {

namespace {

constexpr double kInitialPenalty = 10.0;
constexpr double kMaxPenalty = 1e6;
constexpr int kOuterIterations = 30;
constexpr int kPolishIterations = 200;
constexpr int kNonmonotoneMemory = 10;
constexpr double kArmijo = 1e-4;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// The k-stage problem over the free potentials z (stage-major layout):
///   minimize  objective . A(z)  s.t.  A_v(z) = target_v  for constrained v,
/// where A is the accumulated net outflow over all stages.
class StageProblem {
 public:
  StageProblem(const GasNetwork& net, int k, BalanceVector target, std::vector<char> constrained,
               Eigen::VectorXd objective, double gradient_eps)
      : net_(net),
        k_(k),
        target_(std::move(target)),
        constrained_(std::move(constrained)),
        objective_(std::move(objective)),
        eps_(gradient_eps) {
    for (Index v = 0; v < net.num_nodes(); ++v) {
      if (!net.node(v).fixed_potential) free_.push_back(v);
    }
    lower_ = net.bounds().pi_min;
    upper_ = net.bounds().pi_max;
  }

  Index dim() const { return static_cast<Index>(k_) * nfree(); }
  Index nfree() const { return static_cast<Index>(free_.size()); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  Eigen::VectorXd project(Eigen::VectorXd z) const { return z.cwiseMax(lower_).cwiseMin(upper_); }

  StagePotentials expand(const Eigen::VectorXd& z) const {
    PotentialAssignment base(net_.num_nodes());
    for (Index v = 0; v < net_.num_nodes(); ++v) {
      base[v] = net_.node(v).fixed_potential.value_or(0.0);
    }
    StagePotentials stages(static_cast<std::size_t>(k_), base);
    for (int i = 0; i < k_; ++i) {
      for (Index j = 0; j < nfree(); ++j) {
        stages[static_cast<std::size_t>(i)][free_[static_cast<std::size_t>(j)]] =
            z[i * nfree() + j];
      }
    }
    return stages;
  }

  Eigen::VectorXd compress(const StagePotentials& stages) const {
    Eigen::VectorXd z(dim());
    for (int i = 0; i < k_; ++i) {
      for (Index j = 0; j < nfree(); ++j) {
        z[i * nfree() + j] = stages[static_cast<std::size_t>(i)][free_[static_cast<std::size_t>(j)]];
      }
    }
    return z;
  }

  /// Accumulated outflow.
  Eigen::VectorXd accumulate(const Eigen::VectorXd& z) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(net_.num_nodes());
    for (const auto& pi : expand(z)) acc += induced_imbalance(net_, pi);
    return acc;
  }

  /// Constraint violation A_v - target_v on constrained nodes, 0 elsewhere.
  Eigen::VectorXd violation(const Eigen::VectorXd& acc) const {
    Eigen::VectorXd c = acc - target_;
    for (Index v = 0; v < c.size(); ++v) {
      if (!constrained_[static_cast<std::size_t>(v)]) c[v] = 0.0;
    }
    return c;
  }

  double objective_value(const Eigen::VectorXd& acc) const { return objective_.dot(acc); }

  /// Augmented Lagrangian value; gradient written to `grad` when non-null.
  double lagrangian(const Eigen::VectorXd& z, const Eigen::VectorXd& lambda, double mu,
                    Eigen::VectorXd* grad) const {
    const StagePotentials stages = expand(z);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(net_.num_nodes());
    for (const auto& pi : stages) acc += induced_imbalance(net_, pi);
    const Eigen::VectorXd c = violation(acc);
    const double value = objective_value(acc) + lambda.dot(c) + 0.5 * mu * c.squaredNorm();
    if (grad == nullptr) return value;

    // dL/dA_v
    Eigen::VectorXd r = objective_;
    for (Index v = 0; v < r.size(); ++v) {
      if (constrained_[static_cast<std::size_t>(v)]) r[v] += lambda[v] + mu * c[v];
    }
    Eigen::VectorXd node_grad(net_.num_nodes());
    grad->resize(dim());
    for (int i = 0; i < k_; ++i) {
      node_grad.setZero();
      const auto& pi = stages[static_cast<std::size_t>(i)];
      for (const Arc& arc : net_.arcs()) {
        const double w = arc_conductance(pi[arc.tail] - pi[arc.head], arc.beta, eps_);
        const double y = (r[arc.tail] - r[arc.head]) * w;
        node_grad[arc.tail] += y;
        node_grad[arc.head] -= y;
      }
      for (Index j = 0; j < nfree(); ++j) {
        (*grad)[i * nfree() + j] = node_grad[free_[static_cast<std::size_t>(j)]];
      }
    }
    return value;
  }

  /// Jacobian of the constrained accumulated outflows w.r.t. z.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z, const std::vector<Index>& rows) const {
    std::vector<Index> row_of(static_cast<std::size_t>(net_.num_nodes()), -1);
    for (std::size_t r = 0; r < rows.size(); ++r) row_of[static_cast<std::size_t>(rows[r])] =
        static_cast<Index>(r);
    std::vector<Index> col_of(static_cast<std::size_t>(net_.num_nodes()), -1);
    for (Index j = 0; j < nfree(); ++j) col_of[static_cast<std::size_t>(free_[static_cast<std::size_t>(j)])] = j;

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Index>(rows.size()), dim());
    const StagePotentials stages = expand(z);
    for (int i = 0; i < k_; ++i) {
      const auto& pi = stages[static_cast<std::size_t>(i)];
      for (const Arc& arc : net_.arcs()) {
        const double w = arc_conductance(pi[arc.tail] - pi[arc.head], arc.beta, eps_);
        const Index rt = row_of[static_cast<std::size_t>(arc.tail)];
        const Index rh = row_of[static_cast<std::size_t>(arc.head)];
        const Index ct = col_of[static_cast<std::size_t>(arc.tail)];
        const Index ch = col_of[static_cast<std::size_t>(arc.head)];
        const Index off = i * nfree();
        if (rt >= 0 && ct >= 0) jac(rt, off + ct) += w;
        if (rt >= 0 && ch >= 0) jac(rt, off + ch) -= w;
        if (rh >= 0 && ct >= 0) jac(rh, off + ct) -= w;
        if (rh >= 0 && ch >= 0) jac(rh, off + ch) += w;
      }
    }
    return jac;
  }

  std::vector<Index> constrained_nodes() const {
    std::vector<Index> rows;
    for (Index v = 0; v < net_.num_nodes(); ++v) {
      if (constrained_[static_cast<std::size_t>(v)]) rows.push_back(v);
    }
    return rows;
  }

 private:
  const GasNetwork& net_;
  int k_;
  BalanceVector target_;
  std::vector<char> constrained_;
  Eigen::VectorXd objective_;
  double eps_;
  std::vector<Index> free_;
  double lower_ = 0.0;
  double upper_ = 1.0;
};

/// Spectral projected gradient with a nonmonotone Armijo line search
/// (box constraints only).
Eigen::VectorXd spg_minimize(const StageProblem& prob, Eigen::VectorXd z,
                             const Eigen::VectorXd& lambda, double mu, int max_iter) {
  const double width = prob.upper() - prob.lower();
  Eigen::VectorXd g;
  double f = prob.lagrangian(z, lambda, mu, &g);
  std::deque<double> history{f};

  double alpha = 1.0;
  {
    const double pg = (prob.project(z - g) - z).lpNorm<Eigen::Infinity>();
    alpha = pg > 0.0 ? std::min(1.0, width / pg) : 1.0;
  }

  Eigen::VectorXd g_new;
  for (int it = 0; it < max_iter; ++it) {
    const double pg = (prob.project(z - g) - z).lpNorm<Eigen::Infinity>();
    if (pg <= 1e-11 * std::max(1.0, width)) break;

    const Eigen::VectorXd d = prob.project(z - alpha * g) - z;
    const double slope = g.dot(d);
    if (!(slope < 0.0)) break;
    const double f_ref = *std::max_element(history.begin(), history.end());

    double t = 1.0;
    Eigen::VectorXd z_new;
    double f_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      z_new = z + t * d;
      f_new = prob.lagrangian(z_new, lambda, mu, &g_new);
      if (f_new <= f_ref + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      // safeguarded quadratic interpolation
      const double denom = 2.0 * (f_new - f - t * slope);
      double t_next = denom > 0.0 ? -slope * t * t / denom : 0.5 * t;
      t = std::clamp(t_next, 0.1 * t, 0.5 * t);
    }
    if (!accepted) break;

    const Eigen::VectorXd s = z_new - z;
    const Eigen::VectorXd y = g_new - g;
    const double sty = s.dot(y);
    alpha = sty > 0.0 ? std::clamp(s.squaredNorm() / sty, 1e-12, 1e12) : 1e12;
    z = z_new;
    g = g_new;
    f = f_new;
    history.push_back(f);
    if (static_cast<int>(history.size()) > kNonmonotoneMemory) history.pop_front();
  }
  return z;
}

/// Gauss-Newton with minimum-norm steps on the constraints, using only
/// coordinates strictly inside the box.
Eigen::VectorXd restore_feasibility(const StageProblem& prob, Eigen::VectorXd z) {
  const auto rows = prob.constrained_nodes();
  if (rows.empty()) return z;
  auto violation_at = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd c = prob.violation(prob.accumulate(x));
    Eigen::VectorXd out(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Index>(r)] = c[rows[r]];
    return out;
  };
  Eigen::VectorXd c = violation_at(z);
  for (int it = 0; it < 60; ++it) {
    const double err = c.lpNorm<Eigen::Infinity>();
    if (err <= 1e-13) break;
    const Eigen::MatrixXd jac_full = prob.jacobian(z, rows);
    std::vector<Index> cols;
    const double margin = 1e-12 * (prob.upper() - prob.lower());
    for (Index j = 0; j < z.size(); ++j) {
      if (z[j] > prob.lower() + margin && z[j] < prob.upper() - margin) cols.push_back(j);
    }
    if (cols.empty()) break;
    Eigen::MatrixXd jac(jac_full.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) jac.col(static_cast<Index>(j)) = jac_full.col(cols[j]);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
    const Eigen::VectorXd dz_active = cod.solve(-c);
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(z.size());
    for (std::size_t j = 0; j < cols.size(); ++j) dz[cols[j]] = dz_active[static_cast<Index>(j)];

    bool improved = false;
    double t = 1.0;
    for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
      const Eigen::VectorXd trial = prob.project(z + t * dz);
      const Eigen::VectorXd c_trial = violation_at(trial);
      if (c_trial.lpNorm<Eigen::Infinity>() < err) {
        z = trial;
        c = c_trial;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return z;
}

struct LocalOutcome {
  bool feasible = false;
  double value = -std::numeric_limits<double>::infinity();
  double error = std::numeric_limits<double>::infinity();
  Eigen::VectorXd z;
};

LocalOutcome assess(const StageProblem& prob, const Eigen::VectorXd& z, double tol,
                    double value_sign) {
  const Eigen::VectorXd acc = prob.accumulate(z);
  LocalOutcome out;
  out.z = z;
  out.error = prob.violation(acc).lpNorm<Eigen::Infinity>();
  out.feasible = out.error <= tol;
  out.value = value_sign * prob.objective_value(acc);
  return out;
}

/// Projected reduced-gradient ascent along the constraint manifold, with
/// restoration after every step.  Only interior coordinates move.
Eigen::VectorXd polish_on_manifold(const StageProblem& prob, Eigen::VectorXd z, double tol,
                                   int max_iter) {
  const auto rows = prob.constrained_nodes();
  const Eigen::VectorXd no_lambda = Eigen::VectorXd::Zero(prob.violation(prob.accumulate(z)).size());
  Eigen::VectorXd g;
  double f = prob.lagrangian(z, no_lambda, 0.0, &g);
  double step = 0.1 * (prob.upper() - prob.lower());
  for (int it = 0; it < max_iter && step > 1e-10; ++it) {
    const double margin = 1e-9 * (prob.upper() - prob.lower());
    std::vector<Index> cols;
    for (Index j = 0; j < z.size(); ++j) {
      const bool at_lo = z[j] <= prob.lower() + margin;
      const bool at_hi = z[j] >= prob.upper() - margin;
      // keep coordinates that sit on a bound unless the gradient pulls them inside
      if ((!at_lo || g[j] < 0.0) && (!at_hi || g[j] > 0.0)) cols.push_back(j);
    }
    if (cols.empty()) break;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(z.size());
    Eigen::VectorXd g_act(static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) g_act[static_cast<Index>(j)] = g[cols[j]];
    if (!rows.empty()) {
      const Eigen::MatrixXd jac_full = prob.jacobian(z, rows);
      Eigen::MatrixXd jac(jac_full.rows(), static_cast<Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) {
        jac.col(static_cast<Index>(j)) = jac_full.col(cols[j]);
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
      g_act -= cod.pseudoInverse() * (jac * g_act);
    }
    for (std::size_t j = 0; j < cols.size(); ++j) d[cols[j]] = -g_act[static_cast<Index>(j)];
    const double dn = d.lpNorm<Eigen::Infinity>();
    if (dn <= 1e-14) break;
    d /= dn;

    bool moved = false;
    for (int bt = 0; bt < 40 && step > 1e-10; ++bt) {
      const Eigen::VectorXd trial = restore_feasibility(prob, prob.project(z + step * d));
      const double err = prob.violation(prob.accumulate(trial)).lpNorm<Eigen::Infinity>();
      Eigen::VectorXd g_trial;
      const double f_trial = prob.lagrangian(trial, no_lambda, 0.0, &g_trial);
      if (err <= tol && f_trial < f - 1e-15 * std::max(1.0, std::abs(f))) {
        z = trial;
        f = f_trial;
        g = g_trial;
        moved = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return z;
}

LocalOutcome local_search(const StageProblem& prob, const Eigen::VectorXd& start,
                          const SearchConfig& cfg, double value_sign, bool optimize) {
  const Eigen::VectorXd z0 = prob.project(start);
  LocalOutcome best = assess(prob, z0, cfg.feasibility_tol, value_sign);

  Eigen::VectorXd z = z0;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(prob.violation(prob.accumulate(z)).size());
  double mu = kInitialPenalty;
  double prev_err = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < kOuterIterations; ++outer) {
    z = spg_minimize(prob, z, lambda, mu, cfg.max_inner_iterations);
    const Eigen::VectorXd c = prob.violation(prob.accumulate(z));
    const double err = c.lpNorm<Eigen::Infinity>();
    lambda += mu * c;
    if (err <= 1e-10) break;
    if (err > 0.25 * prev_err) mu = std::min(10.0 * mu, kMaxPenalty);
    prev_err = err;
  }
  z = restore_feasibility(prob, z);
  LocalOutcome polished = assess(prob, z, cfg.feasibility_tol, value_sign);
  if (optimize && polished.feasible) {
    z = polish_on_manifold(prob, z, 0.1 * cfg.feasibility_tol, kPolishIterations);
    const LocalOutcome refined = assess(prob, z, cfg.feasibility_tol, value_sign);
    if (refined.feasible && refined.value >= polished.value) polished = refined;
  }
  if (polished.feasible && (!best.feasible || polished.value > best.value)) best = polished;
  if (!best.feasible && polished.error < best.error) best = polished;
  return best;
}

std::vector<Eigen::VectorXd> make_starts(const StageProblem& prob, const SearchConfig& cfg,
                                         int k) {
  std::vector<Eigen::VectorXd> starts;
  for (const auto& stages : cfg.structured_starts) {
    if (static_cast<int>(stages.size()) != k) continue;
    starts.push_back(prob.compress(stages));
  }
  starts.push_back(Eigen::VectorXd::Constant(prob.dim(), 0.5 * (prob.lower() + prob.upper())));
  for (int r = 0; r < cfg.budget; ++r) {
    std::mt19937_64 rng(splitmix64(cfg.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(r)));
    std::uniform_real_distribution<double> unif(prob.lower(), prob.upper());
    Eigen::VectorXd z(prob.dim());
    for (Index j = 0; j < z.size(); ++j) z[j] = unif(rng);
    starts.push_back(std::move(z));
  }
  return starts;
}

}  // namespace

SearchResult search_kstage_max_st(const GasNetwork& net, std::string_view s, std::string_view t,
                                  int k, const SearchConfig& cfg) {
  if (k < 1) throw DomainError("k must be positive");
  if (cfg.budget < 0) throw DomainError("budget must be non-negative");
  const Index si = net.node_index(s);
  const Index ti = net.node_index(t);
  if (si == ti) throw DomainError("source and sink must differ");

  std::vector<char> constrained(static_cast<std::size_t>(net.num_nodes()), 1);
  constrained[static_cast<std::size_t>(si)] = 0;
  constrained[static_cast<std::size_t>(ti)] = 0;
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(net.num_nodes());
  objective[si] = -1.0;
  const StageProblem prob(net, k, BalanceVector::Zero(net.num_nodes()), std::move(constrained),
                          std::move(objective), cfg.gradient_eps);

  SearchResult result;
  result.value = -std::numeric_limits<double>::infinity();
  const auto starts = make_starts(prob, cfg, k);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const LocalOutcome out = local_search(prob, starts[i], cfg, -1.0, true);
    if (!out.feasible) continue;
    ++result.feasible_starts;
    if (out.value > result.value) {
      result.value = out.value;
      result.stages = prob.expand(out.z);
      result.best_start = static_cast<int>(i);
      result.max_balance_error = out.error;
    }
  }
  if (result.best_start < 0) throw NoFeasiblePoint("no start reached a feasible k-stage flow");
  return result;
}

std::optional<StagePotentials> search_kstage_b_feasible(const GasNetwork& net,
                                                        const BalanceVector& target_b, int k,
                                                        const SearchConfig& cfg) {
  if (k < 1) throw DomainError("k must be positive");
  if (target_b.size() != net.num_nodes()) {
    throw ValidationError(ValidationKind::kSizeMismatch, "target balance length");
  }
  const StageProblem prob(net, k, target_b,
                          std::vector<char>(static_cast<std::size_t>(net.num_nodes()), 1),
                          Eigen::VectorXd::Zero(net.num_nodes()), cfg.gradient_eps);
  for (const auto& start : make_starts(prob, cfg, k)) {
    const LocalOutcome out = local_search(prob, start, cfg, 1.0, false);
    if (out.feasible) return prob.expand(out.z);
  }
  return std::nullopt;
}

}  // namespace gasflow
