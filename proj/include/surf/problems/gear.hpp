#pragma once

// Gear toy: a fixed front ((1-x)^2, x^2), x in [0,1], traversed at a speed
// controlled by the gear parameter p through the raw scalarized objectives
// h1(x) = sqrt(p)/2 (x-1)^2 and h2(x) = x^2/2.

#include <cmath>

#include "surf/problem.hpp"
#include "surf/problems/quadratic.hpp"

namespace surf {

class GearToy final : public BiObjectiveProblem {
 public:
  explicit GearToy(double p) : p_(p), root_p_(std::sqrt(p)) {
    if (!(p >= 1.0)) throw Error(ErrorCode::domain, "problems", "gear parameter must be >= 1");
  }

  std::string kind() const override { return "gear"; }
  std::size_t decision_dimension() const override { return 1; }
  bool has_exact_solver() const override { return true; }
  double p() const { return p_; }

  ObjectiveVector evaluate_objectives(const Decision& x) const override {
    return {(1 - x[0]) * (1 - x[0]), x[0] * x[0]};
  }

  double scalarized_objective(const Decision& x, Weight w) const override {
    const double h1 = 0.5 * root_p_ * (x[0] - 1) * (x[0] - 1);
    const double h2 = 0.5 * x[0] * x[0];
    return w.value() * h1 + w.complement() * h2;
  }

  double solution(double w) const { return root_p_ * w / (1 + (root_p_ - 1) * w); }

  Decision solve_scalarized_exact(Weight w) const override { return Decision::Constant(1, solution(w)); }

  std::optional<double> closed_form_speed(Weight w) const override {
    const double x = solution(w);
    const double denom = 1 + (root_p_ - 1) * w.value();
    return 2 * std::hypot(1 - x, x) * root_p_ / (denom * denom);
  }

  /// The front is the symmetric quadratic's front reparametrized by x, so
  /// Phi(w) = Phi_sym(x*_w).
  std::optional<CdfEstimate> closed_form_cdf() const override {
    auto values = uniform_grid(kDefaultGridSize);
    for (double& v : values) v = quadratic_1d_phi(solution(v), 1.0);
    return CdfEstimate::from_values(std::move(values));
  }

 private:
  double p_;
  double root_p_;
};

}  // namespace surf
