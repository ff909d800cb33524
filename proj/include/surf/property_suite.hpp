#pragma once

// Executable checks of the structural results behind SURF. Each check
// returns a report row; the aggregate is written as JSON lines.
// Degenerate instances yield "reported" or "inconclusive" rows, never
// hard failures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "surf/geometry.hpp"
#include "surf/metrics.hpp"
#include "surf/monotone_interp.hpp"
#include "surf/problems/mdp.hpp"
#include "surf/solvers.hpp"
#include "surf/stats.hpp"
#include "surf/surf.hpp"

namespace surf {

// Slack constants, one per check.
inline constexpr double kArcChordSlack = 1e-6;          // quadrature error on s(w2) - s(w1)
inline constexpr double kCvBoundSlack = 1e-9;           // additive slack on the spacing bound
inline constexpr double kPchipMonotoneSlack = 1e-12;    // rounding on successive table values
inline constexpr double kPchipLinearSlack = 1e-12;      // linear data reproduced to rounding
inline constexpr double kPchipC1RelativeSlack = 1e-5;   // extrapolated derivative jump / local secant
inline constexpr double kOccupancyFeasibility = 1e-10;  // flow-constraint residual
inline constexpr double kFloorMultiple = 10.0;          // pre-floor segment ends at 10x floor
inline constexpr int kSpeedGridPoints = 201;

enum class CheckStatus { pass, fail, inconclusive, reported };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
    case CheckStatus::reported: return "reported";
  }
  return "unknown";
}

struct TheoryCheckReport {
  std::string check;
  std::string anchor;  // the property being exercised
  std::string instance;
  double measured = 0.0;
  double bound = 0.0;
  CheckStatus status = CheckStatus::reported;
  nlohmann::json extra = nlohmann::json::object();

  bool ok() const { return status != CheckStatus::fail; }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"check", check},   {"anchor", anchor}, {"instance", instance},
                        {"measured", measured}, {"bound", bound},   {"status", to_string(status)}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
  }
};

inline void write_json_lines(std::ostream& out, std::span<const TheoryCheckReport> reports) {
  for (const auto& r : reports) out << r.to_json().dump() << '\n';
}

namespace detail {

inline CheckStatus verdict(bool pass) { return pass ? CheckStatus::pass : CheckStatus::fail; }

}  // namespace detail

/// s(w2) - s(w1) <= sqrt(2) ||f_PF(w2) - f_PF(w1)|| for random pairs.
/// The bound follows from the monotone trade-off: arc length is at most
/// the L1 chord, which is at most sqrt(2) times the L2 chord.
inline TheoryCheckReport check_arc_chord(const BiObjectiveProblem& problem, const std::string& instance, int pairs,
                                         std::uint64_t seed, double slack = kArcChordSlack, int panels = 512) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SpeedFunction speed = problem_speed(problem);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    double w1 = unit(rng);
    double w2 = k == 0 ? w1 : unit(rng);
    if (w1 > w2) std::swap(w1, w2);
    const double arc = w2 > w1 ? detail::simpson(speed, w1, w2, panels) : 0.0;
    const double chord = distance(problem.pf_point(Weight(w1)), problem.pf_point(Weight(w2)));
    worst = std::max(worst, arc - std::sqrt(2.0) * chord);
  }
  return {"arc_chord", "arc_chord_bound", instance, worst, slack, detail::verdict(worst <= slack),
          {{"pairs", pairs}, {"seed", seed}}};
}

/// Min and max speed on a uniform grid. A front whose max speed is
/// numerically zero is flagged degenerate and only reported.
inline TheoryCheckReport check_speed_bounds(const BiObjectiveProblem& problem, const std::string& instance,
                                            int grid_points = kSpeedGridPoints) {
  const SpeedFunction speed = problem_speed(problem);
  double v_min = std::numeric_limits<double>::infinity();
  double v_max = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double v = speed(static_cast<double>(k) / (grid_points - 1));
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }
  TheoryCheckReport r{"speed_bounds", "speed_bounded_away_from_zero", instance, v_min, 0.0, CheckStatus::pass,
                      {{"v_min", v_min}, {"v_max", v_max}}};
  if (v_max <= 1e-14) {
    r.status = CheckStatus::reported;
    r.extra["degenerate"] = true;
  } else {
    r.status = detail::verdict(v_min > 0 && std::isfinite(v_max));
    r.extra["speed_ratio"] = v_max / v_min;
  }
  return r;
}

/// CV_t <= 2N sup|Phi~_t - Phi_t| + slack for every logged iteration.
inline TheoryCheckReport check_cv_bound(std::span<const IterationDiagnostics> history, int segments,
                                        const std::string& instance) {
  if (history.empty()) {
    return {"cv_bound", "cdf_error_controls_spacing", instance, 0.0, kCvBoundSlack, CheckStatus::inconclusive, {}};
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& d : history) {
    worst = std::max(worst, d.cv - 2.0 * segments * d.sup_tilde_to_current);
  }
  const double final_cv = history.back().cv;
  return {"cv_bound",
          "cdf_error_controls_spacing",
          instance,
          worst,
          kCvBoundSlack,
          detail::verdict(worst <= kCvBoundSlack),
          {{"iterations", history.size()}, {"final_cv", final_cv}, {"final_cv_times_n", final_cv * segments}}};
}

/// Geometric decay of sup|Phi_t - Phi| before the discretization floor.
/// `errors[t]` is the error of Phi_t, with errors[0] for the identity
/// start. The floor is the smallest logged error; the fitted segment runs
/// from t = 0 to the first iterate within 10x the floor. The per-step
/// ratio exp(slope) must not exceed 1 - alpha/4.
inline TheoryCheckReport check_linear_contraction(std::span<const double> errors, double alpha,
                                                  const std::string& instance) {
  TheoryCheckReport r{"linear_contraction", "outer_linear_convergence", instance, 0.0, 1.0 - alpha / 4.0,
                      CheckStatus::inconclusive, {{"alpha", alpha}, {"theory_ratio", 1.0 - alpha / 2.0}}};
  if (errors.size() < 2) return r;
  const double floor = *std::min_element(errors.begin(), errors.end());
  r.extra["floor"] = floor;
  std::size_t end = 0;
  while (end < errors.size() && errors[end] > kFloorMultiple * floor) ++end;
  if (end == 0 || end == errors.size() || !(floor > 0)) return r;
  std::vector<double> t;
  std::vector<double> log_err;
  for (std::size_t k = 0; k <= end; ++k) {
    t.push_back(static_cast<double>(k));
    log_err.push_back(std::log(errors[k]));
  }
  r.measured = std::exp(least_squares_slope(t, log_err));
  r.extra["pre_floor_steps"] = end;
  r.status = detail::verdict(r.measured <= r.bound);
  return r;
}

/// PCHIP shape properties on random data: monotone output on monotone
/// data, exact reproduction of linear data, and C1 continuity at knots,
/// each scanned on `scan` points.
inline std::vector<TheoryCheckReport> check_pchip_shape(int cases, std::uint64_t seed, int scan = 10000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> knot_count(2, 30);
  double worst_drop = 0.0;
  double worst_linear = 0.0;
  double worst_jump = 0.0;
  for (int c = 0; c < cases; ++c) {
    const int n = knot_count(rng);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(x.size());
    std::vector<double> lin(x.size());
    double xv = unit(rng);
    double yv = unit(rng) - 0.5;
    const double slope = 4.0 * unit(rng) - 2.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = xv;
      // Flat runs are part of the test data.
      y[i] = yv;
      lin[i] = slope * xv + 0.25;
      xv += 0.01 + unit(rng);
      yv += unit(rng) < 0.2 ? 0.0 : unit(rng) * unit(rng) * 3.0;
    }
    // Rescale to [0, 1] so the scan and the C1 offset are resolution independent.
    const double x0 = x.front();
    const double span = x.back() - x0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = i + 1 == x.size() ? 1.0 : (x[i] - x0) / span;
      lin[i] = slope * x[i] + 0.25;
    }
    const MonotoneCubic mono = build_pchip(x, y);
    const MonotoneCubic line = build_pchip(x, lin);
    double prev = mono.eval(0.0);
    for (int k = 1; k < scan; ++k) {
      const double u = k + 1 == scan ? 1.0 : static_cast<double>(k) / (scan - 1);
      const double val = mono.eval(u);
      worst_drop = std::max(worst_drop, prev - val);
      prev = val;
      worst_linear = std::max(worst_linear, std::abs(line.eval(u) - (slope * u + 0.25)));
    }
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      // Richardson on one-sided derivatives removes the first-order curvature term.
      const double h = 1e-4 * std::min(x[i] - x[i - 1], x[i + 1] - x[i]);
      const auto jump = [&](double e) { return mono.eval_derivative(x[i] + e) - mono.eval_derivative(x[i] - e); };
      const double estimate = 2.0 * jump(0.5 * h) - jump(h);
      const double secant_left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
      const double secant_right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
      const double scale = std::max({1.0, std::abs(secant_left), std::abs(secant_right)});
      worst_jump = std::max(worst_jump, std::abs(estimate) / scale);
    }
  }
  const nlohmann::json extra = {{"cases", cases}, {"scan", scan}, {"seed", seed}};
  return {
      {"pchip_monotone", "pchip_monotonicity", "random monotone data", worst_drop, kPchipMonotoneSlack,
       detail::verdict(worst_drop <= kPchipMonotoneSlack), extra},
      {"pchip_linear", "pchip_linear_reproduction", "random linear data", worst_linear, kPchipLinearSlack,
       detail::verdict(worst_linear <= kPchipLinearSlack), extra},
      {"pchip_c1", "pchip_c1_continuity", "random monotone data", worst_jump, kPchipC1RelativeSlack,
       detail::verdict(worst_jump <= kPchipC1RelativeSlack), extra},
  };
}

/// Exact 2-D hypervolume sweep against a Monte-Carlo area estimate on
/// random 5-point fronts in the unit square, reference (1,1). The
/// measured value is the largest |sweep - MC| in units of the MC
/// standard error.
inline TheoryCheckReport check_hv_monte_carlo(int fronts, int samples, std::uint64_t seed, double sigmas = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ObjectiveVector reference{1.0, 1.0};
  double worst = 0.0;
  for (int f = 0; f < fronts; ++f) {
    std::vector<ObjectiveVector> points;
    for (int k = 0; k < 5; ++k) points.push_back({0.95 * unit(rng), 0.95 * unit(rng)});
    const double exact = hypervolume_2d(points, reference);
    long hits = 0;
    for (int s = 0; s < samples; ++s) {
      const double a = unit(rng);
      const double b = unit(rng);
      const bool dominated = std::any_of(points.begin(), points.end(), [&](const auto& p) { return p.f1 <= a && p.f2 <= b; });
      hits += dominated ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / samples;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / samples);
    worst = std::max(worst, std::abs(exact - p) / se);
  }
  return {"hv_monte_carlo", "hypervolume_sweep_exact", "random 5-point fronts", worst, sigmas,
          detail::verdict(worst <= sigmas), {{"fronts", fronts}, {"samples", samples}, {"seed", seed}}};
}

/// Flow-constraint residual of the occupancy of a random policy and of
/// the exact scalarized solution, over random MDPs.
inline TheoryCheckReport check_occupancy_feasibility(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> mass(1.0);
  double worst = 0.0;
  double worst_sum = 0.0;
  for (int k = 0; k < instances; ++k) {
    const auto states = static_cast<std::size_t>(size(rng));
    const auto actions = static_cast<std::size_t>(size(rng));
    const double gamma = 0.5 + 0.45 * unit(rng);
    const TabularKlMdp mdp = random_tabular_mdp(states, actions, gamma, 0.5 + unit(rng), rng);
    Matrix policy(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(actions));
    for (Eigen::Index s = 0; s < policy.rows(); ++s) {
      for (Eigen::Index a = 0; a < policy.cols(); ++a) policy(s, a) = mass(rng);
      policy.row(s) /= policy.row(s).sum();
    }
    const Vector x = mdp.occupancy(policy);
    worst = std::max(worst, mdp.feasibility_residual(x));
    worst_sum = std::max(worst_sum, std::abs(x.sum() - 1.0));
    const Vector q0 = Vector::Zero(static_cast<Eigen::Index>(mdp.pair_count()));
    const auto solved = soft_value_iteration(mdp, Weight(unit(rng)), kExactMaxSteps, q0, kExactBellmanResidual);
    worst = std::max(worst, mdp.feasibility_residual(solved.decision));
  }
  return {"occupancy_feasibility", "occupancy_flow_constraints", "random MDPs", worst, kOccupancyFeasibility,
          detail::verdict(worst <= kOccupancyFeasibility && worst_sum <= kOccupancyFeasibility),
          {{"instances", instances}, {"seed", seed}, {"max_mass_error", worst_sum}}};
}

/// nondominated_filter against an O(n^2) dominance scan on random sets.
/// Coordinates are drawn from a coarse lattice so ties and duplicates occur.
inline TheoryCheckReport check_nondominated_filter(int sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 40);
  std::uniform_int_distribution<int> lattice(0, 12);
  int mismatches = 0;
  for (int k = 0; k < sets; ++k) {
    std::vector<ObjectiveVector> points(static_cast<std::size_t>(count(rng)));
    for (auto& p : points) p = {lattice(rng) / 4.0, lattice(rng) / 4.0};
    std::vector<ObjectiveVector> brute;
    for (const auto& p : points) {
      const bool dominated = std::any_of(points.begin(), points.end(), [&](const auto& q) {
        return q.f1 <= p.f1 && q.f2 <= p.f2 && (q.f1 < p.f1 || q.f2 < p.f2);
      });
      if (!dominated) brute.push_back(p);
    }
    std::stable_sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) { return a.f1 < b.f1; });
    if (nondominated_filter(points) != brute) ++mismatches;
  }
  return {"nondominated_filter", "pareto_dominance", "random lattice sets", static_cast<double>(mismatches), 0.0,
          detail::verdict(mismatches == 0), {{"sets", sets}, {"seed", seed}}};
}

/// Numerical rank of E - gamma P equals the state count.
inline TheoryCheckReport check_flow_rank(const TabularKlMdp& mdp, const std::string& instance) {
  const auto rank = static_cast<double>(mdp.flow_rank());
  const auto states = static_cast<double>(mdp.state_count());
  return {"flow_rank", "flow_matrix_full_column_rank", instance, rank, states, detail::verdict(rank == states), {}};
}

}  // namespace surf
