#pragma once

#include <string>
#include <vector>

#include "surf/problem.hpp"
#include "surf/problems/mdp.hpp"
#include "surf/solvers.hpp"

namespace surf {

/// BiObjectiveProblem view of a tabular MDP. Decisions are occupancy
/// vectors; exact solutions come from soft value iteration.
class MdpProblem final : public BiObjectiveProblem {
 public:
  explicit MdpProblem(TabularKlMdp mdp, std::vector<std::string> warnings = {})
      : mdp_(std::move(mdp)), warnings_(std::move(warnings)) {}

  std::string kind() const override { return "tabular_mdp"; }
  std::size_t decision_dimension() const override { return mdp_.pair_count(); }
  bool has_exact_solver() const override { return true; }
  const TabularKlMdp* tabular_mdp() const override { return &mdp_; }
  const TabularKlMdp& mdp() const { return mdp_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  ObjectiveVector evaluate_objectives(const Decision& x) const override { return mdp_.objectives(x); }

  Decision solve_scalarized_exact(Weight w) const override { return solve_exact(*this, w).decision; }

  std::optional<double> closed_form_speed(Weight w) const override {
    return mdp_.speed(w, solve_scalarized_exact(w), mdp_.default_augmentation());
  }

  Decision default_start() const override {
    Matrix reference(static_cast<Eigen::Index>(mdp_.state_count()), static_cast<Eigen::Index>(mdp_.action_count()));
    for (Eigen::Index i = 0; i < mdp_.reference_log().size(); ++i) {
      reference(i / reference.cols(), i % reference.cols()) = std::exp(mdp_.reference_log()(i));
    }
    return mdp_.occupancy(reference);
  }

 private:
  TabularKlMdp mdp_;
  std::vector<std::string> warnings_;
};

}  // namespace surf
