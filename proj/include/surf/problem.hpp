#pragma once

#include <optional>
#include <string>

#include "surf/cdf.hpp"
#include "surf/error.hpp"
#include "surf/types.hpp"

namespace surf {

using Decision = Vector;

class TabularKlMdp;

/// A bi-objective minimization problem min_x (f1(x), f2(x)) scalarized as
/// w f1 + (1 - w) f2. Capabilities beyond evaluation are optional.
class BiObjectiveProblem {
 public:
  virtual ~BiObjectiveProblem() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t decision_dimension() const = 0;
  virtual ObjectiveVector evaluate_objectives(const Decision& x) const = 0;

  /// Objective minimized by the inner solvers. Defaults to the linear
  /// combination of the reported objectives.
  virtual double scalarized_objective(const Decision& x, Weight w) const {
    const ObjectiveVector f = evaluate_objectives(x);
    return w.value() * f.f1 + w.complement() * f.f2;
  }

  virtual bool has_exact_solver() const { return false; }

  /// The unique minimizer of the scalarized problem.
  virtual Decision solve_scalarized_exact(Weight) const {
    throw Error(ErrorCode::unsupported, "problems", kind() + " has no exact scalarized solver");
  }

  virtual std::optional<double> closed_form_speed(Weight) const { return std::nullopt; }
  virtual std::optional<CdfEstimate> closed_form_cdf() const { return std::nullopt; }

  /// True when decisions live on the probability simplex.
  virtual bool simplex_decision() const { return false; }

  /// Gradient of the scalarized objective, for first-order inner solvers.
  virtual std::optional<Vector> scalarized_gradient(const Decision&, Weight) const { return std::nullopt; }

  /// The underlying tabular MDP, for problems solved by soft value iteration.
  virtual const TabularKlMdp* tabular_mdp() const { return nullptr; }

  /// Initial iterate for slots without a closed form.
  virtual Decision default_start() const { return Decision::Zero(static_cast<Eigen::Index>(decision_dimension())); }

  ObjectiveVector pf_point(Weight w) const { return evaluate_objectives(solve_scalarized_exact(w)); }
};

}  // namespace surf
