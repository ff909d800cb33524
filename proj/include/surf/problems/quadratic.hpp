#pragma once

// Unconstrained quadratic bi-objective problems f_m(x) = (x - b_m)' Q_m (x - b_m).

#include <cmath>
#include <string>

#include "surf/problem.hpp"
#include "surf/types.hpp"

namespace surf {

class QuadraticNd final : public BiObjectiveProblem {
 public:
  QuadraticNd(Matrix q1, Matrix q2, Vector b1, Vector b2)
      : q1_(std::move(q1)), q2_(std::move(q2)), b1_(std::move(b1)), b2_(std::move(b2)) {
    const auto d = b1_.size();
    if (q1_.rows() != d || q1_.cols() != d || q2_.rows() != d || q2_.cols() != d || b2_.size() != d || d == 0) {
      throw Error(ErrorCode::shape, "problems", "quadratic matrices and vectors must share dimension");
    }
    require_spd(q1_, "Q1");
    require_spd(q2_, "Q2");
  }

  std::string kind() const override { return "quadratic_nd"; }
  std::size_t decision_dimension() const override { return static_cast<std::size_t>(b1_.size()); }
  bool has_exact_solver() const override { return true; }

  const Matrix& q1() const { return q1_; }
  const Matrix& q2() const { return q2_; }
  const Vector& b1() const { return b1_; }
  const Vector& b2() const { return b2_; }

  ObjectiveVector evaluate_objectives(const Decision& x) const override {
    const Vector e1 = x - b1_;
    const Vector e2 = x - b2_;
    return {e1.dot(q1_ * e1), e2.dot(q2_ * e2)};
  }

  /// x*_w = (w Q1 + (1-w) Q2)^{-1} (w Q1 b1 + (1-w) Q2 b2).
  Decision solve_scalarized_exact(Weight w) const override {
    const Eigen::LLT<Matrix> llt = factor(w);
    return llt.solve(w.value() * (q1_ * b1_) + w.complement() * (q2_ * b2_));
  }

  /// v(w) = 2 || ( d'(I-P)'Q1 S^{-1}(Q1(I-P)+Q2 P)d , d'P'Q2 S^{-1}(Q1(I-P)+Q2 P)d ) ||
  /// with S = wQ1 + (1-w)Q2, P = S^{-1} w Q1, d = b1 - b2.
  std::optional<double> closed_form_speed(Weight w) const override {
    const Eigen::LLT<Matrix> llt = factor(w);
    const auto dim = b1_.size();
    const Matrix p = llt.solve(w.value() * q1_);
    const Matrix i_minus_p = Matrix::Identity(dim, dim) - p;
    const Vector d = b1_ - b2_;
    const Vector tangent = llt.solve(q1_ * (i_minus_p * d) + q2_ * (p * d));
    const double a1 = (i_minus_p * d).dot(q1_ * tangent);
    const double a2 = (p * d).dot(q2_ * tangent);
    return 2.0 * std::hypot(a1, a2);
  }

 private:
  static void require_spd(const Matrix& q, const char* name) {
    if (!q.isApprox(q.transpose(), 1e-12)) {
      throw Error(ErrorCode::domain, "problems", std::string(name) + " is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(q, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0)) {
      throw Error(ErrorCode::domain, "problems", std::string(name) + " is not positive definite");
    }
  }

  Eigen::LLT<Matrix> factor(Weight w) const {
    const Matrix sigma = w.value() * q1_ + w.complement() * q2_;
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
      const double cond = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
      throw Error(ErrorCode::numerical, "problems",
                  "mixture factorization failed at w = " + std::to_string(w.value()) +
                      " (condition estimate " + std::to_string(cond) + ")");
    }
    return llt;
  }

  Matrix q1_, q2_;
  Vector b1_, b2_;
};

namespace detail {

// Phi(w) for the one-dimensional quadratic with r = q2/q1 == 1.
inline double quad_phi_symmetric(double w) {
  const double t = 2 * w - 1;
  const double top = t * std::sqrt(1 + t * t) + std::asinh(t) + std::sqrt(2.0) + std::asinh(1.0);
  return top / (2 * std::sqrt(2.0) + 2 * std::asinh(1.0));
}

// Antiderivative G_r of -4 sqrt(2) (1+z^2)^2 / l_r(z)^3 with
// l_r(z) = (r+1) z^2 + 2 (r-1) z - (r+1), by partial fractions over the two
// real roots of l_r (both outside [z(0), z(1)]).
class RationalAntiderivative {
 public:
  explicit RationalAntiderivative(double r) {
    const double lead = r + 1;
    const double disc = std::sqrt(2 * (r * r + 1));
    root_a_ = (-(r - 1) + disc) / lead;
    root_b_ = (-(r - 1) - disc) / lead;
    scale_ = -4 * std::sqrt(2.0) / (lead * lead * lead);
    coeffs_a_ = coefficients(root_a_, root_b_);
    coeffs_b_ = coefficients(root_b_, root_a_);
  }

  double operator()(double z) const {
    return scale_ * (term(z, root_a_, coeffs_a_) + term(z, root_b_, coeffs_b_));
  }

 private:
  struct Coefficients {
    double c1, c2, c3;  // of 1/(z-a), 1/(z-a)^2, 1/(z-a)^3
  };

  // (1+z^2)^2 / ((z-a)^3 (z-b)^3): expand g(z) = (1+z^2)^2 / (z-b)^3 about a.
  static Coefficients coefficients(double a, double b) {
    const double p = (1 + a * a) * (1 + a * a);
    const double dp = 4 * a * (1 + a * a);
    const double ddp = 4 * (1 + 3 * a * a);
    const double u = a - b;
    const double h = 1 / (u * u * u);
    const double dh = -3 / (u * u * u * u);
    const double ddh = 12 / (u * u * u * u * u);
    const double g = p * h;
    const double dg = dp * h + p * dh;
    const double ddg = ddp * h + 2 * dp * dh + p * ddh;
    return {ddg / 2, dg, g};
  }

  static double term(double z, double root, const Coefficients& c) {
    const double u = z - root;
    return c.c1 * std::log(std::abs(u)) - c.c2 / u - c.c3 / (2 * u * u);
  }

  double root_a_, root_b_, scale_;
  Coefficients coeffs_a_{}, coeffs_b_{};
};

inline double quad_z(double w) {
  const double t = 2 * w - 1;
  return t / (1 + std::sqrt(1 + t * t));
}

inline double quad_phi_rational(double w, double r) {
  const RationalAntiderivative g(r);
  const double z0 = -(std::sqrt(2.0) - 1);
  const double z1 = std::sqrt(2.0) - 1;
  return (g(quad_z(w)) - g(z0)) / (g(z1) - g(z0));
}

}  // namespace detail

/// Closed-form arc-length CDF of the one-dimensional quadratic; depends on
/// the curvatures only through r = q2/q1.
inline double quadratic_1d_phi(double w, double r) {
  if (!(r > 0)) throw Error(ErrorCode::domain, "problems", "curvature ratio must be positive");
  if (!(w >= 0 && w <= 1)) throw Error(ErrorCode::domain, "problems", "weight outside [0,1]");
  if (w == 0.0) return 0.0;
  if (w == 1.0) return 1.0;
  if (r == 1.0) return detail::quad_phi_symmetric(w);
  if (r > 1.0) return detail::quad_phi_rational(w, r);
  return 1.0 - detail::quad_phi_rational(1.0 - w, 1.0 / r);
}

class Quadratic1d final : public BiObjectiveProblem {
 public:
  Quadratic1d(double q1, double q2, double b1, double b2) : q1_(q1), q2_(q2), b1_(b1), b2_(b2) {
    if (!(q1 > 0 && q2 > 0)) throw Error(ErrorCode::domain, "problems", "curvatures q1, q2 must be positive");
    if (b1 == b2) throw Error(ErrorCode::domain, "problems", "one-dimensional quadratic needs b1 != b2");
  }

  std::string kind() const override { return "quadratic_1d"; }
  std::size_t decision_dimension() const override { return 1; }
  bool has_exact_solver() const override { return true; }
  double ratio() const { return q2_ / q1_; }

  ObjectiveVector evaluate_objectives(const Decision& x) const override {
    const double e1 = x[0] - b1_;
    const double e2 = x[0] - b2_;
    return {q1_ * e1 * e1, q2_ * e2 * e2};
  }

  Decision solve_scalarized_exact(Weight w) const override {
    const double a = w.value() * q1_;
    const double c = w.complement() * q2_;
    return Decision::Constant(1, (a * b1_ + c * b2_) / (a + c));
  }

  std::optional<double> closed_form_speed(Weight w) const override {
    const double mix = w.value() * q1_ + w.complement() * q2_;
    const double gap = b2_ - b1_;
    return 2 * q1_ * q1_ * q2_ * q2_ * gap * gap * std::hypot(w.value(), w.complement()) / (mix * mix * mix);
  }

  std::optional<CdfEstimate> closed_form_cdf() const override { return closed_form_cdf(kDefaultGridSize); }

  CdfEstimate closed_form_cdf(std::size_t grid_size) const {
    auto values = uniform_grid(grid_size);
    const double r = ratio();
    for (double& v : values) v = quadratic_1d_phi(v, r);
    return CdfEstimate::from_values(std::move(values));
  }

 private:
  double q1_, q2_, b1_, b2_;
};

}  // namespace surf
