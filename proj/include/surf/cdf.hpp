#pragma once

// Normalized, monotone maps [0,1] -> [0,1]: the arc-length CDF, its running
// estimate, and the per-iteration empirical rebuild.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "surf/error.hpp"
#include "surf/format.hpp"
#include "surf/monotone_interp.hpp"

namespace surf {

inline constexpr std::size_t kDefaultGridSize = 1025;
inline constexpr std::size_t kSupScanPoints = 10001;
inline constexpr double kFlatSpotThreshold = 1e-13;
inline constexpr double kFlatSpotJitter = 1e-12;
inline constexpr double kDegenerateLength = 1e-13;

/// Coordinate in which the empirical CDF is interpolated between samples.
enum class InterpolationCoordinate {
  quantile,  // PCHIP over q = Phi_t(w_n), pulled back through Phi_t
  weight,    // PCHIP directly over the sampled weights w_n
};

inline std::vector<double> uniform_grid(std::size_t size) {
  std::vector<double> grid(size);
  const double step = 1.0 / static_cast<double>(size - 1);
  for (std::size_t k = 0; k < size; ++k) grid[k] = static_cast<double>(k) * step;
  grid.back() = 1.0;
  return grid;
}

class CdfEstimate {
 public:
  static CdfEstimate identity() { return CdfEstimate(); }

  /// Table on a uniform grid over [0,1]. Endpoints are pinned to 0 and 1;
  /// tiny rounding decreases are flattened, real decreases are rejected.
  static CdfEstimate from_values(std::vector<double> values) {
    if (values.size() < 2) {
      throw Error(ErrorCode::shape, "cdf", "table needs at least two grid values");
    }
    values.front() = 0.0;
    values.back() = 1.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
      if (!std::isfinite(values[k])) {
        throw Error(ErrorCode::evaluation, "cdf", "non-finite table value at knot " + std::to_string(k));
      }
      if (values[k] < values[k - 1]) {
        if (values[k - 1] - values[k] > 1e-12) {
          throw Error(ErrorCode::ordering, "cdf", "table decreases at knot " + std::to_string(k));
        }
        values[k] = values[k - 1];
      }
    }
    values.back() = 1.0;
    return CdfEstimate(std::move(values));
  }

  bool is_identity() const noexcept { return !table_.has_value(); }
  std::size_t grid_size() const noexcept { return table_ ? table_->size() : kDefaultGridSize; }

  double operator()(double w) const { return eval(w); }

  double eval(double w) const {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::domain, "cdf", "evaluation point " + std::to_string(w) + " outside [0,1]");
    }
    if (!table_) return w;
    return table_->eval(w);
  }

  double derivative(double w) const {
    if (!table_) {
      if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::domain, "cdf", "derivative outside [0,1]");
      return 1.0;
    }
    return table_->eval_derivative(w);
  }

  /// Phi^{-1}(q). Flat spots (duplicate PF points) are resolved by a
  /// strictly increasing jitter so the inverse always exists.
  double invert(double q, double tol = 1e-12) const {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw Error(ErrorCode::domain, "cdf", "quantile " + std::to_string(q) + " outside [0,1]");
    }
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    if (!table_) return q;
    return (jittered_ ? *jittered_ : *table_).invert(q, tol);
  }

  /// Values on the internal grid (the identity reports its default grid).
  std::vector<double> grid_values() const {
    if (table_) return table_->values();
    return uniform_grid(kDefaultGridSize);
  }

  /// Values of this estimate sampled on a uniform grid of the given size.
  std::vector<double> sample(std::size_t size) const {
    std::vector<double> out = uniform_grid(size);
    for (double& v : out) v = eval(v);
    return out;
  }

  const std::optional<MonotoneCubic>& table() const noexcept { return table_; }

  void write_csv(std::ostream& out) const {
    out << "w,phi\n";
    const auto grid = uniform_grid(grid_size());
    for (double w : grid) out << format_double(w) << ',' << format_double(eval(w)) << '\n';
  }

  static CdfEstimate read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "w,phi") {
      throw Error(ErrorCode::shape, "cdf", "CSV header must be 'w,phi'");
    }
    std::vector<double> values;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::shape, "cdf", "malformed CSV row: " + line);
      values.push_back(std::stod(line.substr(comma + 1)));
    }
    return from_values(std::move(values));
  }

 private:
  CdfEstimate() = default;

  explicit CdfEstimate(std::vector<double> values) {
    const auto grid = uniform_grid(values.size());
    bool flat = false;
    for (std::size_t k = 1; k < values.size(); ++k) {
      if (values[k] - values[k - 1] < kFlatSpotThreshold) flat = true;
    }
    if (flat) {
      std::vector<double> jitter(values.size());
      const double scale = 1.0 + kFlatSpotJitter * static_cast<double>(values.size() - 1);
      for (std::size_t k = 0; k < values.size(); ++k) {
        jitter[k] = (values[k] + kFlatSpotJitter * static_cast<double>(k)) / scale;
      }
      jitter.front() = 0.0;
      jitter.back() = 1.0;
      jittered_ = build_pchip(grid, jitter);
    }
    table_ = build_pchip(grid, values);
  }

  std::optional<MonotoneCubic> table_;
  std::optional<MonotoneCubic> jittered_;
};

/// Rebuilds the normalized arc-length CDF from cumulative chord lengths at
/// the sampled weights, interpolated in the weight coordinate.
inline CdfEstimate empirical_cdf(std::span<const double> weights, std::span<const double> cumulative_lengths,
                                 std::size_t grid_size = kDefaultGridSize) {
  if (weights.size() != cumulative_lengths.size()) {
    throw Error(ErrorCode::shape, "cdf", "weights and cumulative lengths differ in length");
  }
  if (weights.size() < 2) throw Error(ErrorCode::insufficient_samples, "cdf", "need at least two samples");
  if (weights.front() != 0.0 || weights.back() != 1.0) {
    throw Error(ErrorCode::domain, "cdf", "sampled weights must start at 0 and end at 1");
  }
  const double total = cumulative_lengths.back();
  if (!(total > kDegenerateLength)) {
    throw Error(ErrorCode::degenerate_front, "cdf", "total chord length below numerical floor");
  }
  std::vector<double> normalized(cumulative_lengths.begin(), cumulative_lengths.end());
  for (double& v : normalized) v /= total;
  normalized.front() = 0.0;
  normalized.back() = 1.0;
  const MonotoneCubic interp = build_pchip(weights, normalized);

  auto values = uniform_grid(grid_size);
  for (double& v : values) v = interp.eval(v);
  return CdfEstimate::from_values(std::move(values));
}

/// Same rebuild, but the PCHIP runs over the quantile coordinate
/// q_n = previous(w_n) and is pulled back through `previous`.
inline CdfEstimate empirical_cdf_quantile(const CdfEstimate& previous, std::span<const double> weights,
                                          std::span<const double> cumulative_lengths,
                                          std::size_t grid_size = kDefaultGridSize) {
  if (weights.size() != cumulative_lengths.size()) {
    throw Error(ErrorCode::shape, "cdf", "weights and cumulative lengths differ in length");
  }
  if (weights.size() < 2) throw Error(ErrorCode::insufficient_samples, "cdf", "need at least two samples");
  if (weights.front() != 0.0 || weights.back() != 1.0) {
    throw Error(ErrorCode::domain, "cdf", "sampled weights must start at 0 and end at 1");
  }
  const double total = cumulative_lengths.back();
  if (!(total > kDegenerateLength)) {
    throw Error(ErrorCode::degenerate_front, "cdf", "total chord length below numerical floor");
  }
  std::vector<double> quantiles(weights.size());
  std::vector<double> normalized(weights.size());
  for (std::size_t n = 0; n < weights.size(); ++n) {
    quantiles[n] = previous.eval(weights[n]);
    normalized[n] = cumulative_lengths[n] / total;
  }
  quantiles.front() = normalized.front() = 0.0;
  quantiles.back() = normalized.back() = 1.0;
  const MonotoneCubic interp = build_pchip(quantiles, normalized);

  auto values = uniform_grid(grid_size);
  for (double& v : values) v = interp.eval(previous.eval(v));
  return CdfEstimate::from_values(std::move(values));
}

inline CdfEstimate empirical_cdf(InterpolationCoordinate coordinate, const CdfEstimate& previous,
                                 std::span<const double> weights, std::span<const double> cumulative_lengths,
                                 std::size_t grid_size = kDefaultGridSize) {
  if (coordinate == InterpolationCoordinate::weight) return empirical_cdf(weights, cumulative_lengths, grid_size);
  return empirical_cdf_quantile(previous, weights, cumulative_lengths, grid_size);
}

/// alpha * empirical + (1 - alpha) * previous, flattened back onto a grid.
inline CdfEstimate damped_update(const CdfEstimate& previous, const CdfEstimate& empirical, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::parameter, "cdf", "damping alpha " + std::to_string(alpha) + " outside (0,1]");
  }
  if (previous.is_identity() && empirical.is_identity()) return CdfEstimate::identity();
  const std::size_t size = std::max(previous.grid_size(), empirical.grid_size());
  auto values = uniform_grid(size);
  for (double& v : values) v = alpha * empirical.eval(v) + (1.0 - alpha) * previous.eval(v);
  return CdfEstimate::from_values(std::move(values));
}

/// max |a - b| over a uniform scan of [0,1]; a lower bound on the true sup.
inline double sup_distance(const CdfEstimate& a, const CdfEstimate& b, std::size_t scan = kSupScanPoints) {
  double worst = 0.0;
  for (std::size_t k = 0; k < scan; ++k) {
    const double w = k + 1 == scan ? 1.0 : static_cast<double>(k) / static_cast<double>(scan - 1);
    worst = std::max(worst, std::abs(a.eval(w) - b.eval(w)));
  }
  return worst;
}

}  // namespace surf
