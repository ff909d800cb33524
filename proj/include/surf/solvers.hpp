#pragma once

// Inner solvers for the scalarized subproblems: closed-form dispatch, soft
// value iteration for KL-regularized MDPs, and projected gradient descent on
// the probability simplex.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "surf/error.hpp"
#include "surf/problem.hpp"
#include "surf/problems/bandit.hpp"
#include "surf/problems/mdp.hpp"
#include "surf/types.hpp"

namespace surf {

enum class InnerSolverKind { closed_form, soft_value_iteration, projected_gradient };

inline std::string to_string(InnerSolverKind kind) {
  switch (kind) {
    case InnerSolverKind::closed_form: return "closed_form";
    case InnerSolverKind::soft_value_iteration: return "soft_value_iteration";
    case InnerSolverKind::projected_gradient: return "projected_gradient";
  }
  return "unknown";
}

struct InnerSolverConfig {
  InnerSolverKind kind = InnerSolverKind::closed_form;
  int max_steps = 100;      // K
  double tolerance = 1e-12;
  std::optional<double> step_size;  // projected gradient; default 0.1 / beta

  void validate() const {
    if (max_steps < 1) throw Error(ErrorCode::parameter, "solvers", "inner max_steps must be >= 1");
    if (!(tolerance > 0)) throw Error(ErrorCode::parameter, "solvers", "inner tolerance must be positive");
    if (step_size && !(*step_size > 0)) throw Error(ErrorCode::parameter, "solvers", "step size must be positive");
  }
};

struct SolverResult {
  Decision decision;
  ObjectiveVector objective;
  int steps_used = 0;
  double residual = 0.0;
  Vector state;               // warm-start payload: Q for soft VI, the iterate otherwise
  double contraction = 0.0;   // max successive-difference ratio observed (soft VI)
  bool interior_floor_hit = false;
};

inline constexpr double kExactBellmanResidual = 1e-12;
inline constexpr int kExactMaxSteps = 1'000'000;

/// Euclidean projection onto the probability simplex (sort and threshold).
inline Vector simplex_projection(const Vector& y) {
  if (y.size() == 0) throw Error(ErrorCode::shape, "solvers", "cannot project an empty vector");
  if (!y.allFinite()) throw Error(ErrorCode::domain, "solvers", "projection input must be finite");
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0) theta = candidate;
  }
  return (y.array() - theta).cwiseMax(0.0).matrix();
}

namespace detail {

inline Vector soft_values(const TabularKlMdp& mdp, const Vector& q) {
  const auto s_count = static_cast<Eigen::Index>(mdp.state_count());
  Vector v(s_count);
  const double beta = mdp.beta();
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < mdp.action_count(); ++a) {
      top = std::max(top, mdp.reference_log()(mdp.index(s, a)) + q(mdp.index(s, a)) / beta);
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < mdp.action_count(); ++a) {
      sum += std::exp(mdp.reference_log()(mdp.index(s, a)) + q(mdp.index(s, a)) / beta - top);
    }
    v(static_cast<Eigen::Index>(s)) = beta * (top + std::log(sum));
  }
  return v;
}

}  // namespace detail

/// pi(a|s) proportional to pi_ref(a|s) exp(Q(s,a) / beta).
inline Matrix soft_policy(const TabularKlMdp& mdp, const Vector& q) {
  const auto s_count = static_cast<Eigen::Index>(mdp.state_count());
  const auto a_count = static_cast<Eigen::Index>(mdp.action_count());
  Matrix policy(s_count, a_count);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    Vector logits(a_count);
    for (Eigen::Index a = 0; a < a_count; ++a) {
      const auto i = s * a_count + a;
      logits(a) = mdp.reference_log()(i) + q(i) / mdp.beta();
    }
    policy.row(s) = softmax(logits).transpose();
  }
  return policy;
}

/// Up to K applications of the soft Bellman operator for the reward
/// w r1 + (1-w) r2, stopping early once the sup-norm change is <= tolerance.
inline SolverResult soft_value_iteration(const TabularKlMdp& mdp, Weight w, int max_steps, const Vector& q_init,
                                         double tolerance = kExactBellmanResidual) {
  if (q_init.size() != static_cast<Eigen::Index>(mdp.pair_count())) {
    throw Error(ErrorCode::shape, "solvers", "Q initialization length != S*A");
  }
  if (!q_init.allFinite()) throw Error(ErrorCode::domain, "solvers", "Q initialization must be finite");
  const Vector reward = w.value() * mdp.r1() + w.complement() * mdp.r2();

  SolverResult result;
  Vector q = q_init;
  double previous_change = -1.0;
  for (int k = 0; k < max_steps; ++k) {
    Vector next = reward + mdp.gamma() * (mdp.transition() * detail::soft_values(mdp, q));
    if (!next.allFinite()) {
      throw Error(ErrorCode::divergence, "solvers", "non-finite Q at step " + std::to_string(k + 1));
    }
    const double change = (next - q).lpNorm<Eigen::Infinity>();
    // Ratios of differences near the rounding level of Q are noise.
    if (previous_change > 1e-5 * std::max(1.0, q.lpNorm<Eigen::Infinity>())) result.contraction = std::max(result.contraction, change / previous_change);
    previous_change = change;
    q = std::move(next);
    result.steps_used = k + 1;
    result.residual = change;
    if (change <= tolerance) break;
  }
  result.decision = mdp.occupancy(soft_policy(mdp, q));
  result.objective = mdp.objectives(result.decision);
  result.state = std::move(q);
  return result;
}

/// K steps of x <- Proj_simplex(x - step * grad). Iterates falling below the
/// interior floor are lifted to it (and renormalized); this is flagged.
inline SolverResult projected_gradient(const BiObjectiveProblem& problem, Weight w, int max_steps, double step_size,
                                       const Vector& x_init, double tolerance = 0.0) {
  if (!problem.simplex_decision()) {
    throw Error(ErrorCode::unsupported, "solvers", problem.kind() + " decisions do not live on the simplex");
  }
  if (!(step_size > 0)) throw Error(ErrorCode::parameter, "solvers", "step size must be positive");
  SolverResult result;
  Vector x = x_init;
  for (int k = 0; k < max_steps; ++k) {
    const auto grad = problem.scalarized_gradient(x, w);
    if (!grad) throw Error(ErrorCode::unsupported, "solvers", problem.kind() + " exposes no gradient");
    if (!grad->allFinite()) throw Error(ErrorCode::divergence, "solvers", "non-finite gradient");
    Vector next = simplex_projection(x - step_size * *grad);
    if (next.minCoeff() < kInteriorFloor) {
      result.interior_floor_hit = true;
      next = next.cwiseMax(kInteriorFloor);
      next /= next.sum();
    }
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    result.steps_used = k + 1;
    result.residual = change;
    if (change <= tolerance) break;
  }
  result.objective = problem.evaluate_objectives(x);
  result.state = x;
  result.decision = std::move(x);
  return result;
}

/// Exact scalarized solution: soft value iteration to a 1e-12 Bellman
/// residual for MDPs, the analytic minimizer otherwise.
inline SolverResult solve_exact(const BiObjectiveProblem& problem, Weight w) {
  if (const TabularKlMdp* mdp = problem.tabular_mdp()) {
    return soft_value_iteration(*mdp, w, kExactMaxSteps, Vector::Zero(static_cast<Eigen::Index>(mdp->pair_count())),
                                kExactBellmanResidual);
  }
  if (!problem.has_exact_solver()) {
    throw Error(ErrorCode::unsupported, "solvers", problem.kind() + " has no exact route");
  }
  SolverResult result;
  result.decision = problem.solve_scalarized_exact(w);
  result.objective = problem.evaluate_objectives(result.decision);
  result.state = result.decision;
  return result;
}

inline double default_step_size(const BiObjectiveProblem& problem) {
  if (const auto* bandit = dynamic_cast<const EntropicBandit*>(&problem)) return 0.1 / bandit->beta();
  return 0.1;
}

/// Initial warm-start payload for a slot whose first weight is `w`.
inline Vector cold_start_state(const BiObjectiveProblem& problem, const InnerSolverConfig& cfg, Weight w) {
  switch (cfg.kind) {
    case InnerSolverKind::closed_form:
      return {};
    case InnerSolverKind::soft_value_iteration: {
      const TabularKlMdp* mdp = problem.tabular_mdp();
      if (!mdp) throw Error(ErrorCode::unsupported, "solvers", "soft value iteration needs a tabular MDP");
      return Vector::Zero(static_cast<Eigen::Index>(mdp->pair_count()));
    }
    case InnerSolverKind::projected_gradient:
      if (problem.has_exact_solver() && !problem.tabular_mdp()) return problem.solve_scalarized_exact(w);
      return problem.default_start();
  }
  return {};
}

/// One warm-started inner solve with the configured solver.
inline SolverResult solve_inner(const BiObjectiveProblem& problem, Weight w, const InnerSolverConfig& cfg,
                                const Vector& warm_state) {
  switch (cfg.kind) {
    case InnerSolverKind::closed_form:
      return solve_exact(problem, w);
    case InnerSolverKind::soft_value_iteration: {
      const TabularKlMdp* mdp = problem.tabular_mdp();
      if (!mdp) throw Error(ErrorCode::unsupported, "solvers", "soft value iteration needs a tabular MDP");
      const Vector init =
          warm_state.size() == 0 ? Vector::Zero(static_cast<Eigen::Index>(mdp->pair_count())) : warm_state;
      return soft_value_iteration(*mdp, w, cfg.max_steps, init, cfg.tolerance);
    }
    case InnerSolverKind::projected_gradient: {
      const Vector init = warm_state.size() == 0 ? problem.default_start() : warm_state;
      return projected_gradient(problem, w, cfg.max_steps, cfg.step_size.value_or(default_step_size(problem)), init,
                                cfg.tolerance);
    }
  }
  throw Error(ErrorCode::unsupported, "solvers", "unknown inner solver");
}

}  // namespace surf
