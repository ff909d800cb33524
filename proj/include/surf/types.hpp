#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>

#include "surf/error.hpp"

namespace surf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scalarization weight on objective 1; objective 2 gets 1 - w.
class Weight {
 public:
  constexpr Weight() = default;
  explicit Weight(double w) : w_(w) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::domain, "geometry", "weight " + std::to_string(w) + " outside [0,1]");
    }
  }
  constexpr double value() const noexcept { return w_; }
  constexpr double complement() const noexcept { return 1.0 - w_; }
  constexpr operator double() const noexcept { return w_; }

 private:
  double w_ = 0.0;
};

struct ObjectiveVector {
  double f1 = 0.0;
  double f2 = 0.0;

  bool finite() const noexcept { return std::isfinite(f1) && std::isfinite(f2); }
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

inline double distance(const ObjectiveVector& a, const ObjectiveVector& b) {
  return std::hypot(a.f1 - b.f1, a.f2 - b.f2);
}

/// Traversal speed v(w) of the Pareto front.
using SpeedFunction = std::function<double(double)>;

}  // namespace surf
