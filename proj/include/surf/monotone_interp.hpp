#pragma once

// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson PCHIP).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "surf/error.hpp"

namespace surf {

class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> knots, std::vector<double> values, std::vector<double> slopes)
      : knots_(std::move(knots)), values_(std::move(values)), slopes_(std::move(slopes)) {}

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }
  std::size_t size() const noexcept { return knots_.size(); }
  double front_knot() const noexcept { return knots_.front(); }
  double back_knot() const noexcept { return knots_.back(); }

  double eval(double w) const {
    const auto [n, theta, h] = locate(w);
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * values_[n] + (t3 - 2 * t2 + theta) * h * slopes_[n] +
           (-2 * t3 + 3 * t2) * values_[n + 1] + (t3 - t2) * h * slopes_[n + 1];
  }

  double eval_derivative(double w) const {
    const auto [n, theta, h] = locate(w);
    const double t2 = theta * theta;
    return ((6 * t2 - 6 * theta) * values_[n] + (-6 * t2 + 6 * theta) * values_[n + 1]) / h +
           (3 * t2 - 4 * theta + 1) * slopes_[n] + (3 * t2 - 2 * theta) * slopes_[n + 1];
  }

  /// Bisection for w with |eval(w) - target| <= tol. Requires strictly
  /// increasing values; the endpoints are returned exactly.
  double invert(double target, double tol = 1e-12, int max_iterations = 100) const {
    for (std::size_t n = 0; n + 1 < values_.size(); ++n) {
      if (!(values_[n + 1] > values_[n])) {
        throw Error(ErrorCode::non_invertible, "monotone_interp",
                    "values not strictly increasing at knot " + std::to_string(n));
      }
    }
    if (!(target >= values_.front() && target <= values_.back())) {
      throw Error(ErrorCode::domain, "monotone_interp",
                  "inversion target " + std::to_string(target) + " outside value range");
    }
    if (target == values_.front()) return knots_.front();
    if (target == values_.back()) return knots_.back();

    const auto it = std::upper_bound(values_.begin(), values_.end(), target);
    const std::size_t n = static_cast<std::size_t>(it - values_.begin()) - 1;
    if (values_[n] == target) return knots_[n];

    double lo = knots_[n];
    double hi = knots_[n + 1];
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < max_iterations; ++i) {
      mid = 0.5 * (lo + hi);
      const double f = eval(mid) - target;
      if (std::abs(f) <= tol) break;
      if (f < 0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return mid;
  }

 private:
  struct Location {
    std::size_t n;
    double theta;
    double h;
  };

  Location locate(double w) const {
    if (!(w >= knots_.front() && w <= knots_.back())) {
      throw Error(ErrorCode::domain, "monotone_interp",
                  "evaluation point " + std::to_string(w) + " outside knot range");
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
    std::size_t n = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    n = std::min(n, knots_.size() - 2);
    const double h = knots_[n + 1] - knots_[n];
    return {n, (w - knots_[n]) / h, h};
  }

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

namespace detail {

inline double clip_endpoint_slope(double m, double delta) {
  if (m * delta <= 0) return 0.0;
  if (std::abs(m) > 3 * std::abs(delta)) return 3 * delta;
  return m;
}

}  // namespace detail

/// Builds the PCHIP interpolant through (knots[n], values[n]).
///
/// Interior slopes are the weighted harmonic mean of the adjacent secants
/// (zero when the secants change sign or either vanishes). Endpoint slopes
/// use the three-point formula, clipped to zero on sign disagreement and to
/// 3x the secant on overshoot. With two knots both slopes equal the secant.
inline MonotoneCubic build_pchip(std::span<const double> knots, std::span<const double> values) {
  if (knots.size() != values.size()) {
    throw Error(ErrorCode::shape, "monotone_interp", "knots and values differ in length");
  }
  if (knots.size() < 2) {
    throw Error(ErrorCode::shape, "monotone_interp", "need at least two knots");
  }
  for (std::size_t n = 0; n + 1 < knots.size(); ++n) {
    if (!(knots[n + 1] > knots[n])) {
      throw Error(ErrorCode::ordering, "monotone_interp",
                  "knots not strictly increasing at index " + std::to_string(n + 1));
    }
  }

  const std::size_t segments = knots.size() - 1;
  std::vector<double> h(segments);
  std::vector<double> delta(segments);
  for (std::size_t n = 0; n < segments; ++n) {
    h[n] = knots[n + 1] - knots[n];
    delta[n] = (values[n + 1] - values[n]) / h[n];
  }

  std::vector<double> m(knots.size(), 0.0);
  if (segments == 1) {
    m[0] = m[1] = delta[0];
  } else {
    for (std::size_t n = 1; n < segments; ++n) {
      if (delta[n - 1] * delta[n] <= 0) {
        m[n] = 0.0;
      } else {
        const double w1 = 2 * h[n] + h[n - 1];
        const double w2 = h[n] + 2 * h[n - 1];
        m[n] = (w1 + w2) / (w1 / delta[n - 1] + w2 / delta[n]);
      }
    }
    m[0] = detail::clip_endpoint_slope(
        ((2 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]), delta[0]);
    const std::size_t last = segments - 1;
    m[segments] = detail::clip_endpoint_slope(
        ((2 * h[last] + h[last - 1]) * delta[last] - h[last] * delta[last - 1]) / (h[last] + h[last - 1]),
        delta[last]);
  }

  return MonotoneCubic({knots.begin(), knots.end()}, {values.begin(), values.end()}, std::move(m));
}

}  // namespace surf
