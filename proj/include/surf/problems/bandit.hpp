#pragma once

// Entropy-regularized bandit (single-state KL-regularized MDP):
//   f_m(u) = beta (<u, log u> - <R0, u>) - <R_m, u>,  u on the simplex.

#include <cmath>
#include <string>

#include "surf/problem.hpp"
#include "surf/types.hpp"

namespace surf {

inline constexpr double kInteriorFloor = 1e-12;

/// Numerically stable softmax (max-subtracted).
inline Vector softmax(const Vector& logits) {
  Vector out = (logits.array() - logits.maxCoeff()).exp();
  return out / out.sum();
}

class EntropicBandit final : public BiObjectiveProblem {
 public:
  EntropicBandit(Vector r0, Vector r1, Vector r2, double beta)
      : r0_(std::move(r0)), r1_(std::move(r1)), r2_(std::move(r2)), beta_(beta) {
    if (r0_.size() < 2 || r1_.size() != r0_.size() || r2_.size() != r0_.size()) {
      throw Error(ErrorCode::shape, "problems", "bandit vectors must share a length >= 2");
    }
    if (!r0_.allFinite() || !r1_.allFinite() || !r2_.allFinite()) {
      throw Error(ErrorCode::domain, "problems", "bandit vectors must be finite");
    }
    if (!(beta > 0)) throw Error(ErrorCode::domain, "problems", "beta must be positive");
  }

  /// Uniform reference policy, R0 = log(1/A).
  static EntropicBandit with_uniform_reference(Vector r1, Vector r2, double beta) {
    const auto a = r1.size();
    return EntropicBandit(Vector::Constant(a, -std::log(static_cast<double>(a))), std::move(r1), std::move(r2),
                          beta);
  }

  /// Toy bandit: arms x_a evenly spaced on [0,1], R1 = x, R2 = 1 - x^4.
  static EntropicBandit toy(int arms = 20, double beta = 0.25) {
    const Vector x = Vector::LinSpaced(arms, 0.0, 1.0);
    return with_uniform_reference(x, (1.0 - x.array().pow(4)).matrix(), beta);
  }

  std::string kind() const override { return "bandit"; }
  std::size_t decision_dimension() const override { return static_cast<std::size_t>(r0_.size()); }
  bool has_exact_solver() const override { return true; }
  bool simplex_decision() const override { return true; }

  std::size_t arm_count() const { return static_cast<std::size_t>(r0_.size()); }
  const Vector& r0() const { return r0_; }
  const Vector& r1() const { return r1_; }
  const Vector& r2() const { return r2_; }
  double beta() const { return beta_; }

  /// SoftMax(R0 + (w R1 + (1-w) R2) / beta).
  Decision solve_scalarized_exact(Weight w) const override {
    return softmax(r0_ + (w.value() * r1_ + w.complement() * r2_) / beta_);
  }

  ObjectiveVector evaluate_objectives(const Decision& u) const override {
    if (u.size() != r0_.size()) throw Error(ErrorCode::shape, "problems", "policy length != arm count");
    if (!(u.minCoeff() > 0)) throw Error(ErrorCode::domain, "problems", "policy has a nonpositive component");
    const double regularizer = beta_ * (u.dot(u.array().log().matrix()) - r0_.dot(u));
    return {regularizer - r1_.dot(u), regularizer - r2_.dot(u)};
  }

  /// beta^{-1} sqrt((1-w)^2 + w^2) (R1-R2)' (Diag(u) - u u') (R1-R2).
  std::optional<double> closed_form_speed(Weight w) const override {
    const Vector u = solve_scalarized_exact(w);
    const Vector d = r1_ - r2_;
    const double mean = u.dot(d);
    const double variance = u.dot((d.array() - mean).square().matrix());
    return std::hypot(w.value(), w.complement()) * variance / beta_;
  }

  std::optional<Vector> scalarized_gradient(const Decision& u, Weight w) const override {
    const Vector safe = u.cwiseMax(kInteriorFloor);
    return (beta_ * (safe.array().log() + 1.0 - r0_.array()) -
            (w.value() * r1_ + w.complement() * r2_).array())
        .matrix();
  }

  Decision default_start() const override {
    return Vector::Constant(r0_.size(), 1.0 / static_cast<double>(r0_.size()));
  }

 private:
  Vector r0_, r1_, r2_;
  double beta_;
};

}  // namespace surf
