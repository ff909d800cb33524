#pragma once

// Tabular KL-regularized MDP with two reward channels, in the normalized
// occupancy-measure parametrization: x(s,a) = d(s) pi(a|s) with
// (E - gamma P)' x = (1 - gamma) rho, and
//   f_m(x) = beta (<x, log x> - <E'x, log E'x> - <R0, x>) - <R_m, x>.
// State-action pairs are flattened row-major: index s * A + a.

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "surf/error.hpp"
#include "surf/types.hpp"

namespace surf {

class TabularKlMdp {
 public:
  TabularKlMdp(std::size_t states, std::size_t actions, Matrix transition, Vector r1, Vector r2, double gamma,
               Vector rho, double beta, Vector reference_log)
      : states_(states),
        actions_(actions),
        transition_(std::move(transition)),
        r1_(std::move(r1)),
        r2_(std::move(r2)),
        gamma_(gamma),
        rho_(std::move(rho)),
        beta_(beta),
        reference_log_(std::move(reference_log)) {
    validate();
  }

  std::size_t state_count() const noexcept { return states_; }
  std::size_t action_count() const noexcept { return actions_; }
  std::size_t pair_count() const noexcept { return states_ * actions_; }
  const Matrix& transition() const noexcept { return transition_; }
  const Vector& r1() const noexcept { return r1_; }
  const Vector& r2() const noexcept { return r2_; }
  double gamma() const noexcept { return gamma_; }
  const Vector& rho() const noexcept { return rho_; }
  double beta() const noexcept { return beta_; }
  const Vector& reference_log() const noexcept { return reference_log_; }

  /// Per-state summation matrix E, E((s,a), s') = 1{s' = s}.
  Matrix summation_matrix() const {
    Matrix e = Matrix::Zero(static_cast<Eigen::Index>(pair_count()), static_cast<Eigen::Index>(states_));
    for (std::size_t s = 0; s < states_; ++s) {
      for (std::size_t a = 0; a < actions_; ++a) e(index(s, a), static_cast<Eigen::Index>(s)) = 1.0;
    }
    return e;
  }

  /// Flow matrix E - gamma P; its transpose is the constraint Jacobian.
  Matrix flow_matrix() const { return summation_matrix() - gamma_ * transition_; }

  /// Numerical rank of the flow matrix via SVD.
  std::size_t flow_rank() const {
    const Eigen::JacobiSVD<Matrix> svd(flow_matrix());
    const auto& sv = svd.singularValues();
    const double tol = std::max(flow_matrix().rows(), flow_matrix().cols()) * sv(0) *
                       std::numeric_limits<double>::epsilon();
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol) ++rank;
    }
    return rank;
  }

  Eigen::Index index(std::size_t s, std::size_t a) const noexcept {
    return static_cast<Eigen::Index>(s * actions_ + a);
  }

  /// State marginal E'x.
  Vector state_marginal(const Vector& x) const {
    Vector d = Vector::Zero(static_cast<Eigen::Index>(states_));
    for (std::size_t s = 0; s < states_; ++s) {
      for (std::size_t a = 0; a < actions_; ++a) d(static_cast<Eigen::Index>(s)) += x(index(s, a));
    }
    return d;
  }

  /// Occupancy of a stationary policy (S x A, rows on the simplex):
  /// solves (I - gamma P_pi)' d = (1 - gamma) rho, then x(s,a) = d(s) pi(a|s).
  Vector occupancy(const Matrix& policy) const {
    const auto s_count = static_cast<Eigen::Index>(states_);
    if (policy.rows() != s_count || policy.cols() != static_cast<Eigen::Index>(actions_)) {
      throw Error(ErrorCode::shape, "problems", "policy must be S x A");
    }
    for (Eigen::Index s = 0; s < s_count; ++s) {
      if (policy.row(s).minCoeff() < 0 || std::abs(policy.row(s).sum() - 1.0) > 1e-10) {
        throw Error(ErrorCode::domain, "problems", "policy row " + std::to_string(s) + " is not on the simplex");
      }
    }
    Matrix p_pi = Matrix::Zero(s_count, s_count);
    for (std::size_t s = 0; s < states_; ++s) {
      for (std::size_t a = 0; a < actions_; ++a) {
        p_pi.row(static_cast<Eigen::Index>(s)) += policy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) *
                                                  transition_.row(index(s, a));
      }
    }
    const Matrix system = (Matrix::Identity(s_count, s_count) - gamma_ * p_pi).transpose();
    const Eigen::FullPivLU<Matrix> lu(system);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::rank, "problems", "flow system is singular; transition matrix is malformed");
    }
    Vector d = lu.solve((1.0 - gamma_) * rho_);
    Vector x(static_cast<Eigen::Index>(pair_count()));
    for (std::size_t s = 0; s < states_; ++s) {
      const double mass = std::max(d(static_cast<Eigen::Index>(s)), 0.0);
      for (std::size_t a = 0; a < actions_; ++a) {
        x(index(s, a)) = mass * policy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
      }
    }
    return x;
  }

  /// || (E - gamma P)' x - (1 - gamma) rho ||_inf.
  double feasibility_residual(const Vector& x) const {
    return (flow_matrix().transpose() * x - (1.0 - gamma_) * rho_).lpNorm<Eigen::Infinity>();
  }

  /// Both regularized objectives. States with zero mass are skipped; a
  /// nonpositive entry in a state with positive mass is a domain error.
  ObjectiveVector objectives(const Vector& x) const {
    if (x.size() != static_cast<Eigen::Index>(pair_count())) {
      throw Error(ErrorCode::shape, "problems", "occupancy length != S*A");
    }
    const Vector d = state_marginal(x);
    double regularizer = 0.0;
    for (std::size_t s = 0; s < states_; ++s) {
      const double mass = d(static_cast<Eigen::Index>(s));
      if (mass <= 0) continue;
      for (std::size_t a = 0; a < actions_; ++a) {
        const double xsa = x(index(s, a));
        if (!(xsa > 0)) {
          throw Error(ErrorCode::domain, "problems",
                      "nonpositive occupancy at reachable pair (" + std::to_string(s) + "," + std::to_string(a) + ")");
        }
        regularizer += xsa * (std::log(xsa) - std::log(mass) - reference_log_(index(s, a)));
      }
    }
    regularizer *= beta_;
    return {regularizer - r1_.dot(x), regularizer - r2_.dot(x)};
  }

  /// PF speed from the constraint-augmented Hessian
  ///   H = beta (Diag(1/x) - E Diag(1/E'x) E') + c J'J,  J = (E - gamma P)',
  /// v = sqrt((1-w)^2 + w^2) |d' (H^-1 - H^-1 J' (J H^-1 J')^-1 J H^-1) d|, d = R1 - R2.
  /// c is doubled up to five times if H fails to factor.
  double speed(double w, const Vector& x_star, double c_aug) const {
    if (!(c_aug > 0)) throw Error(ErrorCode::parameter, "problems", "augmentation constant must be positive");
    if (!(x_star.minCoeff() > 0)) {
      throw Error(ErrorCode::domain, "problems", "speed requires a strictly interior occupancy");
    }
    const Matrix e = summation_matrix();
    const Matrix jac = flow_matrix().transpose();
    const Vector d_state = state_marginal(x_star);
    const Matrix base = beta_ * (Matrix(x_star.cwiseInverse().asDiagonal()) -
                                 e * d_state.cwiseInverse().asDiagonal() * e.transpose());
    const Matrix gram = jac.transpose() * jac;

    double c = c_aug;
    for (int attempt = 0; attempt <= 5; ++attempt, c *= 2) {
      const Eigen::LLT<Matrix> llt(base + c * gram);
      if (llt.info() != Eigen::Success) continue;
      const Vector diff = r1_ - r2_;
      const Vector h_diff = llt.solve(diff);
      const Matrix h_jt = llt.solve(jac.transpose());
      const Matrix schur = jac * h_jt;
      const Vector z = jac * h_diff;
      const double value = diff.dot(h_diff) - z.dot(schur.ldlt().solve(z));
      return std::hypot(w, 1.0 - w) * std::abs(value);
    }
    throw Error(ErrorCode::augmentation, "problems",
                "augmented Hessian not positive definite; increase c_aug beyond " + std::to_string(c_aug));
  }

  double default_augmentation() const { return beta_ * static_cast<double>(pair_count()); }

 private:
  void validate() const {
    const auto pairs = static_cast<Eigen::Index>(pair_count());
    const auto s_count = static_cast<Eigen::Index>(states_);
    if (states_ == 0 || actions_ == 0) throw Error(ErrorCode::shape, "problems", "MDP needs states and actions");
    if (transition_.rows() != pairs || transition_.cols() != s_count || r1_.size() != pairs ||
        r2_.size() != pairs || rho_.size() != s_count || reference_log_.size() != pairs) {
      throw Error(ErrorCode::shape, "problems", "MDP array dimensions inconsistent with S and A");
    }
    if (!(gamma_ >= 0 && gamma_ < 1)) throw Error(ErrorCode::domain, "problems", "gamma must lie in [0,1)");
    if (!(beta_ > 0)) throw Error(ErrorCode::domain, "problems", "beta must be positive");
    for (Eigen::Index i = 0; i < pairs; ++i) {
      if (transition_.row(i).minCoeff() < 0 || std::abs(transition_.row(i).sum() - 1.0) > 1e-12) {
        throw Error(ErrorCode::domain, "problems", "transition row " + std::to_string(i) + " is not stochastic");
      }
    }
    if (rho_.minCoeff() < 0 || std::abs(rho_.sum() - 1.0) > 1e-12) {
      throw Error(ErrorCode::domain, "problems", "initial distribution must lie on the simplex");
    }
    for (std::size_t s = 0; s < states_; ++s) {
      double mass = 0.0;
      for (std::size_t a = 0; a < actions_; ++a) mass += std::exp(reference_log_(index(s, a)));
      if (std::abs(mass - 1.0) > 1e-10) {
        throw Error(ErrorCode::domain, "problems", "reference policy at state " + std::to_string(s) + " not normalized");
      }
    }
    if (flow_rank() != states_) {
      throw Error(ErrorCode::rank, "problems", "flow matrix E - gamma P is not full column rank");
    }
  }

  std::size_t states_;
  std::size_t actions_;
  Matrix transition_;
  Vector r1_, r2_;
  double gamma_;
  Vector rho_;
  double beta_;
  Vector reference_log_;
};

/// Random instance with dense transitions (normalized exponential draws),
/// standard-normal rewards, a random initial distribution, and a uniform
/// reference policy. Dense rows keep every pair reachable.
inline TabularKlMdp random_tabular_mdp(std::size_t states, std::size_t actions, double gamma, double beta,
                                       std::mt19937_64& rng) {
  std::exponential_distribution<double> mass(1.0);
  std::normal_distribution<double> reward(0.0, 1.0);
  const auto pairs = static_cast<Eigen::Index>(states * actions);
  const auto s_count = static_cast<Eigen::Index>(states);
  Matrix transition(pairs, s_count);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    for (Eigen::Index j = 0; j < s_count; ++j) transition(i, j) = mass(rng);
    transition.row(i) /= transition.row(i).sum();
  }
  Vector r1(pairs);
  Vector r2(pairs);
  for (Eigen::Index i = 0; i < pairs; ++i) r1(i) = reward(rng);
  for (Eigen::Index i = 0; i < pairs; ++i) r2(i) = reward(rng);
  Vector rho(s_count);
  for (Eigen::Index j = 0; j < s_count; ++j) rho(j) = mass(rng);
  rho /= rho.sum();
  const Vector reference_log = Vector::Constant(pairs, -std::log(static_cast<double>(actions)));
  return TabularKlMdp(states, actions, std::move(transition), std::move(r1), std::move(r2), gamma, std::move(rho), beta,
                      reference_log);
}

}  // namespace surf
