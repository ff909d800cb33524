#pragma once

// Pareto-front traversal geometry: speed, arc length, the normalized
// arc-length CDF, and cumulative chord lengths of sampled fronts.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "surf/cdf.hpp"
#include "surf/error.hpp"
#include "surf/problem.hpp"
#include "surf/types.hpp"

namespace surf {

struct QuadratureConfig {
  int panels = 2048;                   // even, >= 2
  double refinement_tolerance = 1e-10;  // relative change between doublings
  int max_doublings = 6;

  void validate() const {
    if (panels < 2 || panels % 2 != 0) {
      throw Error(ErrorCode::parameter, "geometry", "quadrature panels must be even and >= 2");
    }
    if (!(refinement_tolerance > 0)) {
      throw Error(ErrorCode::parameter, "geometry", "refinement tolerance must be positive");
    }
  }
};

namespace detail {

inline double sample_speed(const SpeedFunction& speed, double w) {
  const double v = speed(w);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::evaluation, "geometry", "non-finite speed at w = " + std::to_string(w));
  }
  return v;
}

inline double simpson(const SpeedFunction& speed, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = sample_speed(speed, a) + sample_speed(speed, b);
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * sample_speed(speed, a + i * h);
  }
  return sum * h / 3.0;
}

// Cumulative Simpson integral at uniform knots, `per_interval` panels each.
inline std::vector<double> cumulative_simpson(const SpeedFunction& speed, const std::vector<double>& knots,
                                              int per_interval) {
  std::vector<double> cumulative(knots.size(), 0.0);
  std::vector<double> at_knots(knots.size());
  for (std::size_t k = 0; k < knots.size(); ++k) at_knots[k] = sample_speed(speed, knots[k]);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double h = (knots[k + 1] - a) / per_interval;
    double sum = at_knots[k] + at_knots[k + 1];
    for (int i = 1; i < per_interval; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * sample_speed(speed, a + i * h);
    cumulative[k + 1] = cumulative[k] + sum * h / 3.0;
  }
  return cumulative;
}

}  // namespace detail

/// s(w) = int_0^w v(p) dp by composite Simpson, doubling the panel count
/// until successive estimates agree to the configured relative tolerance.
inline double arc_length(const SpeedFunction& speed, Weight w, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (w.value() == 0.0) return 0.0;
  int panels = cfg.panels;
  double estimate = detail::simpson(speed, 0.0, w, panels);
  for (int d = 0; d < cfg.max_doublings; ++d) {
    panels *= 2;
    const double refined = detail::simpson(speed, 0.0, w, panels);
    const bool converged = std::abs(refined - estimate) <= cfg.refinement_tolerance * std::abs(refined);
    estimate = refined;
    if (converged) break;
  }
  return estimate;
}

/// Phi(w) = s(w) / s(1) tabulated on `grid_size` uniform knots.
inline CdfEstimate cdf_from_speed(const SpeedFunction& speed, std::size_t grid_size = kDefaultGridSize,
                                  const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (grid_size < 2) throw Error(ErrorCode::parameter, "geometry", "grid size must be >= 2");
  const auto knots = uniform_grid(grid_size);
  const int intervals = static_cast<int>(grid_size - 1);
  int per_interval = std::max(2, (cfg.panels + intervals - 1) / intervals);
  per_interval += per_interval % 2;

  auto cumulative = detail::cumulative_simpson(speed, knots, per_interval);
  for (int d = 0; d < cfg.max_doublings; ++d) {
    auto refined = detail::cumulative_simpson(speed, knots, per_interval * 2);
    const bool converged =
        std::abs(refined.back() - cumulative.back()) <= cfg.refinement_tolerance * std::abs(refined.back());
    cumulative = std::move(refined);
    per_interval *= 2;
    if (converged) break;
  }

  const double total = cumulative.back();
  if (!(total > kDegenerateLength)) {
    throw Error(ErrorCode::degenerate_front, "geometry", "total arc length below numerical floor");
  }
  for (double& c : cumulative) c /= total;
  return CdfEstimate::from_values(std::move(cumulative));
}

/// Cumulative Euclidean chord length along an ordered list of PF points.
/// Duplicate points contribute zero-length segments and are kept.
inline std::vector<double> chord_cumsum(std::span<const ObjectiveVector> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::insufficient_samples, "geometry", "chord length needs at least two points");
  }
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t n = 1; n < points.size(); ++n) out[n] = out[n - 1] + distance(points[n - 1], points[n]);
  return out;
}

/// Central-difference speed ||f_PF(w+h) - f_PF(w-h)|| / 2h from exact
/// scalarized solutions; one-sided at the ends of [0,1].
inline double speed_finite_difference(const BiObjectiveProblem& problem, Weight w, double h = 1e-5) {
  if (!(h > 0)) throw Error(ErrorCode::parameter, "geometry", "finite-difference step must be positive");
  const double lo = std::max(0.0, w.value() - h);
  const double hi = std::min(1.0, w.value() + h);
  const ObjectiveVector a = problem.pf_point(Weight(lo));
  const ObjectiveVector b = problem.pf_point(Weight(hi));
  return distance(a, b) / (hi - lo);
}

/// Closed-form speed when the problem exposes one, else the
/// finite-difference estimate.
inline SpeedFunction problem_speed(const BiObjectiveProblem& problem) {
  return [&problem](double w) {
    const Weight weight(w);
    if (auto v = problem.closed_form_speed(weight)) return *v;
    return speed_finite_difference(problem, weight);
  };
}

/// Reference Phi: the closed form when available, else quadrature of the
/// problem speed.
inline CdfEstimate reference_cdf(const BiObjectiveProblem& problem, std::size_t grid_size = kDefaultGridSize,
                                 const QuadratureConfig& cfg = {}) {
  if (auto closed = problem.closed_form_cdf()) return *closed;
  return cdf_from_speed(problem_speed(problem), grid_size, cfg);
}

}  // namespace surf
