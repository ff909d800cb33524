#pragma once

// Coverage and quality metrics for sampled fronts, minimization convention.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "surf/error.hpp"
#include "surf/format.hpp"
#include "surf/types.hpp"

namespace surf {

struct PfSample {
  double w = 0.0;
  ObjectiveVector f;
};

class PfSampleSet {
 public:
  PfSampleSet() = default;
  explicit PfSampleSet(std::vector<PfSample> entries) : entries_(std::move(entries)) {
    for (std::size_t n = 1; n < entries_.size(); ++n) {
      if (entries_[n].w < entries_[n - 1].w) {
        throw Error(ErrorCode::ordering, "metrics", "sample weights must be nondecreasing");
      }
    }
  }

  /// Points without meaningful weights (reference fronts, test data).
  static PfSampleSet from_points(std::span<const ObjectiveVector> points) {
    std::vector<PfSample> entries;
    entries.reserve(points.size());
    for (const auto& p : points) entries.push_back({0.0, p});
    return PfSampleSet(std::move(entries));
  }

  const std::vector<PfSample>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<ObjectiveVector> points() const {
    std::vector<ObjectiveVector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.f);
    return out;
  }

 private:
  std::vector<PfSample> entries_;
};

inline std::vector<double> segment_lengths(const PfSampleSet& samples) {
  const auto& e = samples.entries();
  std::vector<double> out;
  for (std::size_t n = 1; n < e.size(); ++n) out.push_back(distance(e[n - 1].f, e[n].f));
  return out;
}

/// Population std / mean of consecutive segment lengths.
inline double cv(const PfSampleSet& samples) {
  if (samples.size() < 3) throw Error(ErrorCode::insufficient_samples, "metrics", "CV needs at least 3 points");
  const auto seg = segment_lengths(samples);
  const double mean = std::accumulate(seg.begin(), seg.end(), 0.0) / static_cast<double>(seg.size());
  if (!(mean > 0)) throw Error(ErrorCode::degenerate_front, "metrics", "mean segment length is zero");
  double var = 0.0;
  for (double s : seg) var += (s - mean) * (s - mean);
  var /= static_cast<double>(seg.size());
  return std::sqrt(var) / mean;
}

struct GapRatio {
  double value = -1.0;  // -1 when a segment has zero length
  bool defined = false;
};

inline GapRatio gap_ratio(const PfSampleSet& samples) {
  if (samples.size() < 3) throw Error(ErrorCode::insufficient_samples, "metrics", "gap ratio needs at least 3 points");
  const auto seg = segment_lengths(samples);
  const auto [lo, hi] = std::minmax_element(seg.begin(), seg.end());
  if (!(*lo > 0)) return {};
  return {*hi / *lo, true};
}

/// Minimization-sense non-dominated subset, sorted by f1 ascending.
/// Exact duplicates of a kept point are kept; order among ties is stable.
inline std::vector<ObjectiveVector> nondominated_filter(std::span<const ObjectiveVector> points) {
  std::vector<ObjectiveVector> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.f1 < b.f1 || (a.f1 == b.f1 && a.f2 < b.f2);
  });
  std::vector<ObjectiveVector> kept;
  for (const auto& p : sorted) {
    if (kept.empty() || p.f2 < kept.back().f2 || p == kept.back()) kept.push_back(p);
  }
  return kept;
}

/// Exact 2-D hypervolume dominated by the samples relative to `reference`.
inline double hypervolume_2d(std::span<const ObjectiveVector> points, const ObjectiveVector& reference) {
  for (const auto& p : points) {
    if (!(p.f1 < reference.f1 && p.f2 < reference.f2)) {
      throw Error(ErrorCode::domain, "metrics",
                  "point (" + format_double(p.f1) + ", " + format_double(p.f2) + ") does not dominate the reference");
    }
  }
  const auto front = nondominated_filter(points);
  double area = 0.0;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double right = i + 1 < front.size() ? front[i + 1].f1 : reference.f1;
    area += (right - front[i].f1) * (reference.f2 - front[i].f2);
  }
  return area;
}

inline double hypervolume_2d(const PfSampleSet& samples, const ObjectiveVector& reference) {
  const auto pts = samples.points();
  return hypervolume_2d(pts, reference);
}

/// Mean over reference points of the distance to the nearest sample.
inline double igd(std::span<const ObjectiveVector> samples, std::span<const ObjectiveVector> reference_front) {
  if (reference_front.empty()) throw Error(ErrorCode::parameter, "metrics", "IGD reference front is empty");
  if (samples.empty()) throw Error(ErrorCode::insufficient_samples, "metrics", "IGD needs samples");
  double total = 0.0;
  for (const auto& r : reference_front) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) best = std::min(best, distance(r, s));
    total += best;
  }
  return total / static_cast<double>(reference_front.size());
}

inline double igd(const PfSampleSet& samples, std::span<const ObjectiveVector> reference_front) {
  const auto pts = samples.points();
  return igd(pts, reference_front);
}

/// Euclidean distance from `p` to the polyline through `vertices`.
inline double distance_to_polyline(const ObjectiveVector& p, std::span<const ObjectiveVector> vertices) {
  if (vertices.empty()) throw Error(ErrorCode::parameter, "metrics", "polyline has no vertices");
  double best = distance(p, vertices.front());
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const auto& a = vertices[i - 1];
    const auto& b = vertices[i];
    const double dx = b.f1 - a.f1;
    const double dy = b.f2 - a.f2;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.f1 - a.f1) * dx + (p.f2 - a.f2) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, distance(p, {a.f1 + t * dx, a.f2 + t * dy}));
  }
  return best;
}

}  // namespace surf
