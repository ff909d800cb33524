#pragma once

// Config-driven experiment commands: SURF against the uniform-weight
// baseline, parameter sweeps, the bandit estimation-error curve, and dense
// front export. Every command writes its manifest before any result file.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "surf/bandit_estimation.hpp"
#include "surf/config.hpp"
#include "surf/format.hpp"
#include "surf/metrics.hpp"
#include "surf/stats.hpp"
#include "surf/surf.hpp"

namespace surf {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kSamplesHeader = "source,n,w,f1,f2";
inline constexpr const char* kConvergenceHeader =
    "t,sup_dist_to_true_phi,sup_dist_phi_tilde_phi_t,cv,gap_ratio,max_inner_residual";
inline constexpr const char* kBanditErrorHeader = "T,mean_sup_error,std_sup_error,trials,seed";
inline constexpr const char* kSweepHeader = "axis,value,final_sup_error,first_sup_error,cv,gap_ratio,kappa";

namespace experiment_detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::parameter, "cli", "cannot write " + path.string());
  return out;
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

/// Manifest listing the files the command is about to write.
inline void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                           const std::vector<std::string>& outputs) {
  const Json manifest = {{"artifact", "surf"},         {"version", kArtifactVersion},
                         {"command", command},          {"started_at", utc_timestamp()},
                         {"seed", cfg.seed},            {"config", cfg.source},
                         {"outputs", outputs}};
  write_json(std::filesystem::path(cfg.out_dir) / "manifest.json", manifest);
}

inline void append_samples(std::ostream& out, const std::string& source, const PfSampleSet& samples) {
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const auto& e = samples.entries()[n];
    out << source << ',' << n << ',' << format_double(e.w) << ',' << format_double(e.f.f1) << ','
        << format_double(e.f.f2) << '\n';
  }
}

inline Json gap_json(const GapRatio& g) { return g.defined ? Json(g.value) : Json(-1.0); }

}  // namespace experiment_detail

/// Dense reference front: exact solutions at w = Phi^-1(k / (points - 1)),
/// so consecutive points are evenly spaced in arc length.
inline PfSampleSet reference_front(const BiObjectiveProblem& problem, const CdfEstimate& phi, int points) {
  std::vector<PfSample> entries;
  entries.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    double w = phi.invert(static_cast<double>(k) / (points - 1));
    if (k == 0) w = 0.0;
    if (k == points - 1) w = 1.0;
    entries.push_back({w, problem.pf_point(Weight(w))});
  }
  return PfSampleSet(std::move(entries));
}

/// Condition number of a front: (v_max / v_min) * sqrt(max |Phi''|), with
/// Phi'' from second differences of the reference table.
inline double front_kappa(const BiObjectiveProblem& problem, const CdfEstimate& phi, int speed_points = 201) {
  const SpeedFunction speed = problem_speed(problem);
  double v_min = std::numeric_limits<double>::infinity();
  double v_max = 0.0;
  for (int k = 0; k < speed_points; ++k) {
    const double v = speed(static_cast<double>(k) / (speed_points - 1));
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }
  const auto g = phi.grid_values();
  const double h = 1.0 / static_cast<double>(g.size() - 1);
  double curvature = 0.0;
  for (std::size_t k = 1; k + 1 < g.size(); ++k) {
    curvature = std::max(curvature, std::abs(g[k + 1] - 2.0 * g[k] + g[k - 1]) / (h * h));
  }
  return v_max / v_min * std::sqrt(curvature);
}

struct RunOutcome {
  CdfEstimate reference = CdfEstimate::identity();
  SurfResult surf;
  std::optional<PfSampleSet> uniform;
  Json metrics;
};

/// SURF plus the optional uniform baseline and the summary metrics.
inline RunOutcome execute_run(const BiObjectiveProblem& problem, const ExperimentConfig& cfg) {
  RunOutcome out;
  out.reference = reference_cdf(problem, cfg.surf.grid_size, cfg.quadrature);
  out.surf = surf_run(problem, cfg.surf, out.reference);
  if (cfg.baseline) out.uniform = uniform_baseline(problem, cfg.surf);

  const auto front = reference_front(problem, out.reference, cfg.reference_points).points();
  Json m = Json::object();
  m["cv_surf"] = cv(out.surf.samples);
  m["gap_ratio_surf"] = experiment_detail::gap_json(gap_ratio(out.surf.samples));
  m["igd_surf"] = igd(out.surf.samples, front);
  m["hv_surf"] = cfg.hv_reference ? Json(hypervolume_2d(out.surf.samples, *cfg.hv_reference)) : Json(nullptr);
  if (out.uniform) {
    m["cv_uniform"] = cv(*out.uniform);
    m["gap_ratio_uniform"] = experiment_detail::gap_json(gap_ratio(*out.uniform));
    m["igd_uniform"] = igd(*out.uniform, front);
    m["hv_uniform"] = cfg.hv_reference ? Json(hypervolume_2d(*out.uniform, *cfg.hv_reference)) : Json(nullptr);
  } else {
    m["cv_uniform"] = m["gap_ratio_uniform"] = m["igd_uniform"] = m["hv_uniform"] = nullptr;
  }
  m["hv_reference_point"] =
      cfg.hv_reference ? Json::array({cfg.hv_reference->f1, cfg.hv_reference->f2}) : Json(nullptr);
  m["final_sup_dist_to_true_phi"] = out.surf.final_sup_to_reference.value_or(0.0);
  out.metrics = std::move(m);
  return out;
}

/// Rows t = 0..T describe Phi_t and its samples; the closing row t = T+1
/// carries only the error of the returned Phi_{T+1}.
inline void write_convergence_csv(std::ostream& out, const SurfResult& result) {
  using experiment_detail::cell;
  out << kConvergenceHeader << '\n';
  for (const auto& d : result.diagnostics) {
    out << d.t << ',' << cell(d.sup_to_reference) << ',' << format_double(d.sup_tilde_to_current) << ','
        << format_double(d.cv) << ',' << format_double(d.gap_ratio.defined ? d.gap_ratio.value : -1.0) << ','
        << format_double(d.max_inner_residual) << '\n';
  }
  out << result.diagnostics.size() << ',' << cell(result.final_sup_to_reference) << ",,,,\n";
}

/// run: samples.csv, convergence.csv, metrics.json, final_cdf.csv.
inline void cmd_run(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const auto problem = build_problem_checked(cfg.problem);
  const fs::path dir(cfg.out_dir);
  experiment_detail::write_manifest(cfg, "run", {"samples.csv", "convergence.csv", "metrics.json", "final_cdf.csv"});
  const RunOutcome outcome = execute_run(*problem, cfg);
  {
    auto out = experiment_detail::open_output(dir / "samples.csv");
    out << kSamplesHeader << '\n';
    experiment_detail::append_samples(out, "surf", outcome.surf.samples);
    if (outcome.uniform) experiment_detail::append_samples(out, "uniform", *outcome.uniform);
  }
  {
    auto out = experiment_detail::open_output(dir / "convergence.csv");
    write_convergence_csv(out, outcome.surf);
  }
  experiment_detail::write_json(dir / "metrics.json", outcome.metrics);
  {
    auto out = experiment_detail::open_output(dir / "final_cdf.csv");
    outcome.surf.final_cdf.write_csv(out);
  }
}

struct SweepRow {
  double value = 0.0;
  double final_error = 0.0;
  double first_error = 0.0;  // ||Phi~_0 - Phi||, the first reconstruction
  double cv = 0.0;
  GapRatio gap;
  std::optional<double> kappa;
};

struct SweepOutcome {
  std::string axis;
  std::vector<SweepRow> rows;
  std::vector<SurfResult> results;
  Json summary;
};

/// One validated config per axis value; each variant runs single-threaded.
inline std::vector<ExperimentConfig> sweep_variants(const ExperimentConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep: section required for the sweep command");
  std::vector<ExperimentConfig> variants;
  for (double value : cfg.sweep->values) {
    ExperimentConfig v = cfg;
    v.surf.threads = 1;
    const auto as_int = [&](const char* what) {
      if (value != std::floor(value)) throw ConfigError(std::string("sweep.values: ") + what + " must be an integer");
      return static_cast<int>(value);
    };
    const std::string& axis = cfg.sweep->axis;
    if (axis == "N") v.surf.segments = as_int("N");
    if (axis == "alpha") v.surf.alpha = value;
    if (axis == "K") v.surf.inner.max_steps = as_int("K");
    if (axis == "kappa_p") v.problem["p"] = value;
    try {
      v.surf.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("sweep.values: ") + e.what());
    }
    build_problem_checked(v.problem);
    variants.push_back(std::move(v));
  }
  return variants;
}

/// One SURF run per axis value, spread over the configured threads.
inline SweepOutcome execute_sweep(const ExperimentConfig& cfg) {
  const auto variants = sweep_variants(cfg);
  const SweepSpec& spec = *cfg.sweep;
  SweepOutcome outcome{spec.axis, std::vector<SweepRow>(variants.size()), std::vector<SurfResult>(variants.size()),
                       Json::object()};

  detail::for_each_slot(variants.size(), cfg.surf.threads, [&](std::size_t i) {
    const ExperimentConfig& v = variants[i];
    const auto problem = build_problem(v.problem);
    const CdfEstimate reference = reference_cdf(*problem, v.surf.grid_size, v.quadrature);
    SurfResult& result = outcome.results[i];
    result = surf_run(*problem, v.surf, reference);
    SweepRow& row = outcome.rows[i];
    row.value = spec.values[i];
    row.final_error = *result.final_sup_to_reference;
    row.first_error = *result.diagnostics.front().sup_tilde_to_reference;
    row.cv = cv(result.samples);
    row.gap = gap_ratio(result.samples);
    if (spec.axis == "kappa_p") row.kappa = front_kappa(*problem, reference);
  });

  Json& s = outcome.summary;
  s["axis"] = spec.axis;
  s["runs"] = static_cast<int>(variants.size());
  if (variants.size() >= 2) {
    std::vector<double> x;
    std::vector<double> final_err;
    std::vector<double> first_err;
    for (const auto& r : outcome.rows) {
      x.push_back(r.kappa.value_or(r.value));
      final_err.push_back(r.final_error);
      first_err.push_back(r.first_error);
    }
    const auto positive = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double e) { return e > 0; });
    };
    if (positive(x) && positive(final_err) && positive(first_err)) {
      if (spec.axis == "N") s["loglog_slope_final_error"] = loglog_slope(x, final_err);
      if (spec.axis == "kappa_p") {
        s["kappa_exponent_first_error"] = loglog_slope(x, first_err);
        s["kappa_exponent_final_error"] = loglog_slope(x, final_err);
      }
    }
  }
  return outcome;
}

inline std::string sweep_label(const std::string& axis, double value) { return axis + "=" + format_double(value); }

/// sweep: sweep.csv, sweep_summary.json, and runs/<axis>=<value>/convergence.csv.
inline void cmd_sweep(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  sweep_variants(cfg);
  const fs::path dir(cfg.out_dir);
  std::vector<std::string> runs;
  for (double v : cfg.sweep->values) runs.push_back("runs/" + sweep_label(cfg.sweep->axis, v) + "/convergence.csv");
  std::vector<std::string> files{"sweep.csv", "sweep_summary.json"};
  files.insert(files.end(), runs.begin(), runs.end());
  experiment_detail::write_manifest(cfg, "sweep", files);

  const SweepOutcome outcome = execute_sweep(cfg);
  {
    auto out = experiment_detail::open_output(dir / "sweep.csv");
    out << kSweepHeader << '\n';
    for (const auto& r : outcome.rows) {
      out << outcome.axis << ',' << format_double(r.value) << ',' << format_double(r.final_error) << ','
          << format_double(r.first_error) << ',' << format_double(r.cv) << ','
          << format_double(r.gap.defined ? r.gap.value : -1.0) << ',' << experiment_detail::cell(r.kappa) << '\n';
    }
  }
  experiment_detail::write_json(dir / "sweep_summary.json", outcome.summary);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto out = experiment_detail::open_output(dir / runs[i]);
    write_convergence_csv(out, outcome.results[i]);
  }
}

/// bandit-error: bandit_error.csv and bandit_error_fit.json.
inline void cmd_bandit_error(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const auto problem = build_problem_checked(cfg.problem);
  const auto* bandit = dynamic_cast<const EntropicBandit*>(problem.get());
  if (!bandit) throw ConfigError("problem.kind: bandit-error needs a bandit problem");
  const fs::path dir(cfg.out_dir);
  experiment_detail::write_manifest(cfg, "bandit-error", {"bandit_error.csv", "bandit_error_fit.json"});
  const auto result = cdf_error_experiment(*bandit, cfg.bandit_error.pulls, cfg.bandit_error.trials,
                                           cfg.bandit_error.sigma, cfg.seed, cfg.surf.grid_size, cfg.quadrature);
  {
    auto out = experiment_detail::open_output(dir / "bandit_error.csv");
    out << kBanditErrorHeader << '\n';
    for (const auto& r : result.rows) {
      out << r.pulls << ',' << format_double(r.mean_sup_error) << ',' << format_double(r.std_sup_error) << ','
          << r.trials << ',' << r.seed << '\n';
    }
  }
  experiment_detail::write_json(dir / "bandit_error_fit.json",
                                {{"loglog_slope", result.loglog_slope},
                                 {"sigma", cfg.bandit_error.sigma},
                                 {"trials", cfg.bandit_error.trials}});
}

struct FrontOutcome {
  PfSampleSet reference;
  SurfResult surf;
  PfSampleSet uniform;
  Json summary;
};

inline FrontOutcome execute_front(const BiObjectiveProblem& problem, const ExperimentConfig& cfg) {
  if (!problem.has_exact_solver()) throw ConfigError("problem.kind: front export needs an exact solver");
  const CdfEstimate phi = reference_cdf(problem, cfg.surf.grid_size, cfg.quadrature);
  FrontOutcome out{reference_front(problem, phi, cfg.reference_points), surf_run(problem, cfg.surf, phi),
                   uniform_baseline(problem, cfg.surf), Json::object()};
  const auto polyline = out.reference.points();
  double worst = 0.0;
  for (const auto& e : out.surf.samples.entries()) worst = std::max(worst, distance_to_polyline(e.f, polyline));
  const double cv_surf = cv(out.surf.samples);
  const double cv_uniform = cv(out.uniform);
  out.summary = {{"cv_surf", cv_surf},
                 {"cv_uniform", cv_uniform},
                 {"cv_ratio_uniform_over_surf", cv_surf > 0 ? Json(cv_uniform / cv_surf) : Json(nullptr)},
                 {"max_surf_distance_to_reference", worst},
                 {"reference_points", cfg.reference_points}};
  return out;
}

/// front: front.csv (reference, surf, uniform rows) and front_summary.json.
inline void cmd_front(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const auto problem = build_problem_checked(cfg.problem);
  const fs::path dir(cfg.out_dir);
  experiment_detail::write_manifest(cfg, "front", {"front.csv", "front_summary.json"});
  const FrontOutcome outcome = execute_front(*problem, cfg);
  {
    auto out = experiment_detail::open_output(dir / "front.csv");
    out << kSamplesHeader << '\n';
    experiment_detail::append_samples(out, "reference", outcome.reference);
    experiment_detail::append_samples(out, "surf", outcome.surf.samples);
    experiment_detail::append_samples(out, "uniform", outcome.uniform);
  }
  experiment_detail::write_json(dir / "front_summary.json", outcome.summary);
}

}  // namespace surf
