#pragma once

// The outer refinement loop: place weights at quantiles of the current CDF
// estimate, solve the scalarized subproblems warm-started per slot, rebuild
// the arc-length CDF from cumulative chord lengths, and mix it into the
// estimate with damping alpha.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "surf/cdf.hpp"
#include "surf/geometry.hpp"
#include "surf/metrics.hpp"
#include "surf/problem.hpp"
#include "surf/solvers.hpp"

namespace surf {

struct SurfConfig {
  int segments = 20;  // N
  double alpha = 0.3;
  int outer_iterations = 10;  // T; the loop runs t = 0..T
  InnerSolverConfig inner;
  bool record_history = false;
  InterpolationCoordinate interpolation = InterpolationCoordinate::quantile;
  std::size_t grid_size = kDefaultGridSize;
  unsigned threads = 1;

  void validate() const {
    if (segments < 2) throw Error(ErrorCode::parameter, "surf", "segments N must be >= 2");
    if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorCode::parameter, "surf", "alpha must lie in (0,1]");
    if (outer_iterations < 0) throw Error(ErrorCode::parameter, "surf", "outer iterations must be >= 0");
    if (grid_size < 2) throw Error(ErrorCode::parameter, "surf", "grid size must be >= 2");
    inner.validate();
  }
};

/// Per-iteration diagnostics; optional fields are absent, never guessed.
struct IterationDiagnostics {
  int t = 0;
  std::optional<double> sup_to_reference;        // ||Phi_t - Phi||
  std::optional<double> sup_tilde_to_reference;  // ||Phi~_t - Phi||
  double sup_tilde_to_current = 0.0;       // ||Phi~_t - Phi_t||
  double cv = 0.0;
  GapRatio gap_ratio;
  double max_inner_residual = 0.0;
  int max_inner_steps = 0;
  double max_contraction = 0.0;
};

struct SurfState {
  int iteration = 0;
  CdfEstimate cdf = CdfEstimate::identity();  // Phi_t
  std::vector<double> weights;
  std::vector<Decision> solutions;
  std::vector<Vector> warm;  // per-slot inner-solver payload
  std::vector<ObjectiveVector> pf_points;
  std::optional<CdfEstimate> empirical;  // Phi~ built from this state's samples
  std::optional<IterationDiagnostics> diagnostics;
};

struct SurfResult {
  CdfEstimate final_cdf = CdfEstimate::identity();  // Phi_{T+1}
  PfSampleSet samples;
  std::vector<Decision> solutions;
  std::vector<IterationDiagnostics> diagnostics;
  std::optional<double> final_sup_to_reference;
  std::vector<SurfState> history;
};

/// w_n = Phi^{-1}(n / N), endpoints pinned to 0 and 1.
inline std::vector<double> pf_aware_weights(const CdfEstimate& cdf, int segments) {
  if (segments < 1) throw Error(ErrorCode::parameter, "surf", "segments must be positive");
  std::vector<double> w(static_cast<std::size_t>(segments) + 1);
  for (int n = 0; n <= segments; ++n) {
    w[static_cast<std::size_t>(n)] = cdf.invert(static_cast<double>(n) / segments);
  }
  w.front() = 0.0;
  w.back() = 1.0;
  for (std::size_t n = 1; n < w.size(); ++n) {
    if (!(w[n] > w[n - 1])) {
      throw Error(ErrorCode::non_invertible, "surf", "weights fold back at slot " + std::to_string(n));
    }
  }
  return w;
}

namespace detail {

template <typename Fn>
void for_each_slot(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t n = 0; n < count; ++n) fn(n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < workers; ++k) {
      pool.emplace_back([&, k] {
        try {
          for (std::size_t n = k; n < count; n += workers) fn(n);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Initial state: Phi_0 = identity and a cold-start bank at weights n/N.
inline SurfState initial_state(const BiObjectiveProblem& problem, const SurfConfig& cfg) {
  cfg.validate();
  SurfState state;
  const auto slots = static_cast<std::size_t>(cfg.segments) + 1;
  state.warm.resize(slots);
  for (std::size_t n = 0; n < slots; ++n) {
    state.warm[n] = cold_start_state(problem, cfg.inner, Weight(static_cast<double>(n) / cfg.segments));
  }
  return state;
}

/// One outer iteration. Fills in the samples and diagnostics of `state`
/// (iteration t) and returns the state carrying Phi_{t+1}.
inline SurfState surf_step(SurfState& state, const BiObjectiveProblem& problem, const SurfConfig& cfg,
                           const std::optional<CdfEstimate>& reference = std::nullopt) {
  state.weights = pf_aware_weights(state.cdf, cfg.segments);
  const std::size_t slots = state.weights.size();

  std::vector<SolverResult> results(slots);
  detail::for_each_slot(slots, cfg.threads, [&](std::size_t n) {
    results[n] = solve_inner(problem, Weight(state.weights[n]), cfg.inner, state.warm[n]);
  });

  IterationDiagnostics diag;
  diag.t = state.iteration;
  state.solutions.resize(slots);
  state.pf_points.resize(slots);
  std::vector<Vector> next_warm(slots);
  for (std::size_t n = 0; n < slots; ++n) {
    if (!results[n].objective.finite()) {
      throw Error(ErrorCode::evaluation, "surf", "non-finite objective at slot " + std::to_string(n));
    }
    state.solutions[n] = results[n].decision;
    state.pf_points[n] = results[n].objective;
    next_warm[n] = std::move(results[n].state);
    diag.max_inner_residual = std::max(diag.max_inner_residual, results[n].residual);
    diag.max_inner_steps = std::max(diag.max_inner_steps, results[n].steps_used);
    diag.max_contraction = std::max(diag.max_contraction, results[n].contraction);
  }

  const auto lengths = chord_cumsum(state.pf_points);
  if (!(lengths.back() >= kDegenerateLength)) {
    throw Error(ErrorCode::degenerate_front, "surf",
                "all PF points coincide at iteration " + std::to_string(state.iteration));
  }
  CdfEstimate tilde = empirical_cdf(cfg.interpolation, state.cdf, state.weights, lengths, cfg.grid_size);

  std::vector<PfSample> entries;
  for (std::size_t n = 0; n < slots; ++n) entries.push_back({state.weights[n], state.pf_points[n]});
  const PfSampleSet samples(std::move(entries));
  diag.cv = cv(samples);
  diag.gap_ratio = gap_ratio(samples);
  diag.sup_tilde_to_current = sup_distance(tilde, state.cdf);
  if (reference) {
    diag.sup_to_reference = sup_distance(state.cdf, *reference);
    diag.sup_tilde_to_reference = sup_distance(tilde, *reference);
  }

  SurfState next;
  next.iteration = state.iteration + 1;
  next.cdf = damped_update(state.cdf, tilde, cfg.alpha);
  next.warm = std::move(next_warm);
  state.empirical = std::move(tilde);
  state.diagnostics = diag;
  return next;
}

/// Runs t = 0..T outer iterations from Phi_0 = identity.
inline SurfResult surf_run(const BiObjectiveProblem& problem, const SurfConfig& cfg,
                           const std::optional<CdfEstimate>& reference = std::nullopt) {
  SurfState state = initial_state(problem, cfg);
  SurfResult result;
  for (int t = 0; t <= cfg.outer_iterations; ++t) {
    SurfState next;
    try {
      next = surf_step(state, problem, cfg, reference);
    } catch (const Error& e) {
      throw Error(e.code(), e.module(), e.detail() + " (outer iteration " + std::to_string(t) + ")");
    }
    result.diagnostics.push_back(*state.diagnostics);
    if (t == cfg.outer_iterations) {
      std::vector<PfSample> entries;
      for (std::size_t n = 0; n < state.weights.size(); ++n) entries.push_back({state.weights[n], state.pf_points[n]});
      result.samples = PfSampleSet(std::move(entries));
      result.solutions = state.solutions;
    }
    if (cfg.record_history) {
      SurfState snapshot = state;
      snapshot.warm.clear();
      result.history.push_back(std::move(snapshot));
    }
    state = std::move(next);
  }
  result.final_cdf = state.cdf;
  if (reference) result.final_sup_to_reference = sup_distance(result.final_cdf, *reference);
  return result;
}

/// Uniform-weight baseline: the t = 0 samples of the same configuration.
inline PfSampleSet uniform_baseline(const BiObjectiveProblem& problem, const SurfConfig& cfg) {
  SurfConfig once = cfg;
  once.outer_iterations = 0;
  once.record_history = false;
  return surf_run(problem, once).samples;
}

}  // namespace surf
