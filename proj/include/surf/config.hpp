#pragma once

// JSON experiment configuration and problem presets.
//
// Top-level keys: problem, surf, metrics, output, seed, plus the optional
// command sections sweep and bandit_error. Every field except problem.kind
// has a default. Unknown keys are rejected so typos surface as errors.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "surf/geometry.hpp"
#include "surf/problems/bandit.hpp"
#include "surf/problems/gear.hpp"
#include "surf/problems/grid_mdp.hpp"
#include "surf/problems/mdp_problem.hpp"
#include "surf/problems/quadratic.hpp"
#include "surf/surf.hpp"

namespace surf {

using Json = nlohmann::json;

/// Configuration or validation failure; the CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::parameter, "config", what) {}
};

namespace config_detail {

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

inline void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(join(path, key) + ": unknown field");
  }
}

inline double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": must be finite");
  return x;
}

inline double number(const Json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? as_number(obj.at(key), join(path, key)) : fallback;
}

inline double required_number(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key) + ": required field missing");
  return as_number(obj.at(key), join(path, key));
}

inline long long integer(const Json& obj, const std::string& path, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
  return v.get<long long>();
}

inline std::string text(const Json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

inline bool boolean(const Json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key) + ": expected true or false");
  return v.get<bool>();
}

inline Vector vector_of(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

inline Vector required_vector(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key) + ": required field missing");
  return vector_of(obj.at(key), join(path, key));
}

inline Matrix matrix_of(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    const Vector row = vector_of(v[r], row_where);
    if (static_cast<std::size_t>(row.size()) != cols) throw ConfigError(row_where + ": ragged row");
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

inline Matrix required_matrix(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key) + ": required field missing");
  return matrix_of(obj.at(key), join(path, key));
}

inline std::vector<double> number_list(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key) + ": required field missing");
  const Vector v = vector_of(obj.at(key), join(path, key));
  return {v.data(), v.data() + v.size()};
}

}  // namespace config_detail

struct SweepSpec {
  std::string axis;  // N, alpha, K, kappa_p
  std::vector<double> values;
};

struct BanditErrorSpec {
  std::vector<std::size_t> pulls{100, 316, 1000, 3162, 10000};
  int trials = 100;
  double sigma = 0.5;
};

struct ExperimentConfig {
  Json source;   // parsed file with command-line overrides applied
  Json problem;  // preset section, kept raw so sweeps can rebuild it
  SurfConfig surf;
  bool baseline = true;
  QuadratureConfig quadrature;
  std::optional<ObjectiveVector> hv_reference;
  int reference_points = 1001;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::optional<SweepSpec> sweep;
  BanditErrorSpec bandit_error;
};

inline const char* const kProblemKinds = "quadratic_1d, quadratic_nd, gear, bandit, grid_mdp, tabular_mdp";

inline bool is_mdp_kind(const std::string& kind) { return kind == "grid_mdp" || kind == "tabular_mdp"; }

/// Builds the problem instance described by a `problem` section.
inline std::unique_ptr<BiObjectiveProblem> build_problem(const Json& p) {
  using namespace config_detail;
  const std::string path = "problem";
  require_object(p, path);
  if (!p.contains("kind")) throw ConfigError("problem.kind: required field missing (one of " + std::string(kProblemKinds) + ")");
  const std::string kind = text(p, path, "kind", "");
  if (kind == "quadratic_1d") {
    reject_unknown(p, path, {"kind", "q1", "q2", "b1", "b2"});
    return std::make_unique<Quadratic1d>(number(p, path, "q1", 1.0), number(p, path, "q2", 4.0),
                                         number(p, path, "b1", 0.0), number(p, path, "b2", 1.0));
  }
  if (kind == "quadratic_nd") {
    reject_unknown(p, path, {"kind", "Q1", "Q2", "b1", "b2"});
    return std::make_unique<QuadraticNd>(required_matrix(p, path, "Q1"), required_matrix(p, path, "Q2"),
                                         required_vector(p, path, "b1"), required_vector(p, path, "b2"));
  }
  if (kind == "gear") {
    reject_unknown(p, path, {"kind", "p"});
    return std::make_unique<GearToy>(number(p, path, "p", 9.0));
  }
  if (kind == "bandit") {
    reject_unknown(p, path, {"kind", "preset", "arms", "beta", "r0", "r1", "r2"});
    const double beta = number(p, path, "beta", 0.25);
    const std::string preset = text(p, path, "preset", p.contains("r1") ? "custom" : "toy");
    if (preset == "toy") {
      const long long arms = integer(p, path, "arms", 20);
      if (arms < 2) throw ConfigError("problem.arms: need at least 2 arms");
      return std::make_unique<EntropicBandit>(EntropicBandit::toy(static_cast<int>(arms), beta));
    }
    if (preset != "custom") throw ConfigError("problem.preset: expected \"toy\" or \"custom\"");
    Vector r1 = required_vector(p, path, "r1");
    Vector r2 = required_vector(p, path, "r2");
    if (p.contains("r0")) return std::make_unique<EntropicBandit>(required_vector(p, path, "r0"), r1, r2, beta);
    return std::make_unique<EntropicBandit>(EntropicBandit::with_uniform_reference(r1, r2, beta));
  }
  if (kind == "grid_mdp") {
    reject_unknown(p, path, {"kind", "map", "gamma", "beta"});
    GridLayout layout = default_grid_layout();
    const double gamma = number(p, path, "gamma", layout.gamma);
    const double beta = number(p, path, "beta", layout.beta);
    if (p.contains("map")) {
      const auto& m = p.at("map");
      if (!m.is_array() || m.empty()) throw ConfigError("problem.map: expected a nonempty array of strings");
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i].is_string()) throw ConfigError("problem.map[" + std::to_string(i) + "]: expected a string");
        lines.push_back(m[i].get<std::string>());
      }
      layout = GridLayout::from_ascii(lines, gamma, beta);
    } else {
      layout.gamma = gamma;
      layout.beta = beta;
    }
    return std::make_unique<MdpProblem>(grid_mdp_builder(layout));
  }
  if (kind == "tabular_mdp") {
    reject_unknown(p, path,
                   {"kind", "states", "actions", "transition", "r1", "r2", "gamma", "rho", "beta", "reference_policy"});
    const long long states = integer(p, path, "states", 0);
    const long long actions = integer(p, path, "actions", 0);
    if (states < 1 || actions < 1) throw ConfigError("problem.states/actions: required positive integers");
    Vector reference_log;
    if (p.contains("reference_policy")) {
      const Matrix policy = required_matrix(p, path, "reference_policy");
      if (policy.rows() != states || policy.cols() != actions) {
        throw ConfigError("problem.reference_policy: expected states x actions");
      }
      if (!(policy.minCoeff() > 0)) throw ConfigError("problem.reference_policy: entries must be positive");
      reference_log.resize(states * actions);
      for (Eigen::Index s = 0; s < states; ++s) {
        for (Eigen::Index a = 0; a < actions; ++a) reference_log(s * actions + a) = std::log(policy(s, a));
      }
    } else {
      reference_log = Vector::Constant(states * actions, -std::log(static_cast<double>(actions)));
    }
    return std::make_unique<MdpProblem>(TabularKlMdp(
        static_cast<std::size_t>(states), static_cast<std::size_t>(actions), required_matrix(p, path, "transition"),
        required_vector(p, path, "r1"), required_vector(p, path, "r2"), required_number(p, path, "gamma"),
        required_vector(p, path, "rho"), number(p, path, "beta", 1.0), reference_log));
  }
  throw ConfigError("problem.kind: unknown kind \"" + kind + "\" (one of " + kProblemKinds + ")");
}

inline InnerSolverKind parse_inner_kind(const std::string& name) {
  if (name == "closed_form" || name == "exact") return InnerSolverKind::closed_form;
  if (name == "soft_value_iteration") return InnerSolverKind::soft_value_iteration;
  if (name == "projected_gradient") return InnerSolverKind::projected_gradient;
  throw ConfigError("surf.inner.solver: unknown solver \"" + name +
                    "\" (closed_form, soft_value_iteration, projected_gradient)");
}

/// Parses a full configuration document. Problem-construction errors are
/// reported as configuration errors.
inline ExperimentConfig parse_config(const Json& doc) {
  using namespace config_detail;
  require_object(doc, "config");
  reject_unknown(doc, "", {"problem", "surf", "metrics", "output", "seed", "sweep", "bandit_error"});
  ExperimentConfig cfg;
  cfg.source = doc;
  if (!doc.contains("problem")) throw ConfigError("problem: required section missing");
  cfg.problem = doc.at("problem");
  require_object(cfg.problem, "problem");
  const std::string kind = text(cfg.problem, "problem", "kind", "");

  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("seed: expected a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }

  const Json surf = doc.value("surf", Json::object());
  require_object(surf, "surf");
  reject_unknown(surf, "surf",
                 {"segments", "alpha", "iterations", "inner", "interpolation", "grid_size", "threads", "baseline"});
  cfg.surf.segments = static_cast<int>(integer(surf, "surf", "segments", cfg.surf.segments));
  cfg.surf.alpha = number(surf, "surf", "alpha", cfg.surf.alpha);
  cfg.surf.outer_iterations = static_cast<int>(integer(surf, "surf", "iterations", cfg.surf.outer_iterations));
  const long long grid_size = integer(surf, "surf", "grid_size", static_cast<long long>(cfg.surf.grid_size));
  if (grid_size < 2) throw ConfigError("surf.grid_size: must be >= 2");
  cfg.surf.grid_size = static_cast<std::size_t>(grid_size);
  const long long threads = integer(surf, "surf", "threads", 1);
  if (threads < 1) throw ConfigError("surf.threads: must be >= 1");
  cfg.surf.threads = static_cast<unsigned>(threads);
  cfg.baseline = boolean(surf, "surf", "baseline", true);
  const std::string coord = text(surf, "surf", "interpolation", "q");
  if (coord == "q") {
    cfg.surf.interpolation = InterpolationCoordinate::quantile;
  } else if (coord == "w") {
    cfg.surf.interpolation = InterpolationCoordinate::weight;
  } else {
    throw ConfigError("surf.interpolation: expected \"q\" or \"w\"");
  }
  const Json inner = surf.value("inner", Json::object());
  require_object(inner, "surf.inner");
  reject_unknown(inner, "surf.inner", {"solver", "steps", "tolerance", "step_size"});
  const std::string default_solver = is_mdp_kind(kind) ? "soft_value_iteration" : "closed_form";
  cfg.surf.inner.kind = parse_inner_kind(text(inner, "surf.inner", "solver", default_solver));
  cfg.surf.inner.max_steps = static_cast<int>(integer(inner, "surf.inner", "steps", cfg.surf.inner.max_steps));
  cfg.surf.inner.tolerance = number(inner, "surf.inner", "tolerance", cfg.surf.inner.tolerance);
  if (inner.contains("step_size")) cfg.surf.inner.step_size = number(inner, "surf.inner", "step_size", 0.0);

  const Json metrics = doc.value("metrics", Json::object());
  require_object(metrics, "metrics");
  reject_unknown(metrics, "metrics", {"hv_reference", "reference_points", "quadrature"});
  if (metrics.contains("hv_reference")) {
    const Vector ref = vector_of(metrics.at("hv_reference"), "metrics.hv_reference");
    if (ref.size() != 2) throw ConfigError("metrics.hv_reference: expected [f1, f2]");
    cfg.hv_reference = ObjectiveVector{ref(0), ref(1)};
  }
  cfg.reference_points = static_cast<int>(integer(metrics, "metrics", "reference_points", cfg.reference_points));
  if (cfg.reference_points < 2) throw ConfigError("metrics.reference_points: must be >= 2");
  // Each MDP speed sample costs an exact solve and a factorization, so the
  // default reference quadrature is coarser there; the speed is smooth.
  if (is_mdp_kind(kind)) cfg.quadrature = {64, 1e-8, 3};
  const Json quad = metrics.value("quadrature", Json::object());
  require_object(quad, "metrics.quadrature");
  reject_unknown(quad, "metrics.quadrature", {"panels", "tolerance", "max_doublings"});
  cfg.quadrature.panels = static_cast<int>(integer(quad, "metrics.quadrature", "panels", cfg.quadrature.panels));
  cfg.quadrature.refinement_tolerance =
      number(quad, "metrics.quadrature", "tolerance", cfg.quadrature.refinement_tolerance);
  cfg.quadrature.max_doublings =
      static_cast<int>(integer(quad, "metrics.quadrature", "max_doublings", cfg.quadrature.max_doublings));

  const Json output = doc.value("output", Json::object());
  require_object(output, "output");
  reject_unknown(output, "output", {"dir"});
  cfg.out_dir = text(output, "output", "dir", cfg.out_dir);

  if (doc.contains("sweep")) {
    const Json& sw = doc.at("sweep");
    require_object(sw, "sweep");
    reject_unknown(sw, "sweep", {"axis", "values"});
    SweepSpec spec{text(sw, "sweep", "axis", ""), number_list(sw, "sweep", "values")};
    if (spec.axis != "N" && spec.axis != "alpha" && spec.axis != "K" && spec.axis != "kappa_p") {
      throw ConfigError("sweep.axis: expected one of N, alpha, K, kappa_p");
    }
    if (spec.axis == "kappa_p" && kind != "gear") throw ConfigError("sweep.axis: kappa_p sweeps need a gear problem");
    cfg.sweep = std::move(spec);
  }

  if (doc.contains("bandit_error")) {
    const Json& be = doc.at("bandit_error");
    require_object(be, "bandit_error");
    reject_unknown(be, "bandit_error", {"pulls", "trials", "sigma"});
    if (be.contains("pulls")) {
      cfg.bandit_error.pulls.clear();
      for (double t : number_list(be, "bandit_error", "pulls")) {
        if (!(t >= 1) || t != std::floor(t)) throw ConfigError("bandit_error.pulls: expected positive integers");
        cfg.bandit_error.pulls.push_back(static_cast<std::size_t>(t));
      }
    }
    cfg.bandit_error.trials = static_cast<int>(integer(be, "bandit_error", "trials", cfg.bandit_error.trials));
    cfg.bandit_error.sigma = number(be, "bandit_error", "sigma", cfg.bandit_error.sigma);
  }
  if (cfg.bandit_error.trials < 2) throw ConfigError("bandit_error.trials: must be >= 2 (std is undefined otherwise)");
  if (!(cfg.bandit_error.sigma >= 0)) throw ConfigError("bandit_error.sigma: must be >= 0");

  try {
    cfg.surf.validate();
    cfg.quadrature.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

/// Reads and parses a config file. Syntax errors carry line and column.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

/// Builds the problem, reporting construction failures as config errors.
inline std::unique_ptr<BiObjectiveProblem> build_problem_checked(const Json& problem) {
  try {
    return build_problem(problem);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

}  // namespace surf
