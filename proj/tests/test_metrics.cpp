#include <gtest/gtest.h>

#include <vector>

#include "surf/metrics.hpp"
#include "surf/stats.hpp"

namespace surf {
namespace {

PfSampleSet line_set(std::vector<ObjectiveVector> pts) { return PfSampleSet::from_points(pts); }

TEST(Cv, TwoUnequalSegments) {
  const auto s = line_set({{0, 0}, {1, 0}, {3, 0}});
  EXPECT_NEAR(cv(s), 1.0 / 3.0, 1e-15);
}

TEST(Cv, EqualSegmentsGiveZero) {
  const auto s = line_set({{0, 3}, {1, 2}, {2, 1}, {3, 0}});
  EXPECT_NEAR(cv(s), 0.0, 1e-15);
}

TEST(Cv, ScaleInvariant) {
  const std::vector<ObjectiveVector> pts{{0, 1}, {0.1, 0.5}, {0.4, 0.2}, {1, 0}};
  std::vector<ObjectiveVector> scaled;
  for (const auto& p : pts) scaled.push_back({7.5 * p.f1, 7.5 * p.f2});
  EXPECT_NEAR(cv(line_set(pts)), cv(line_set(scaled)), 1e-14);
}

TEST(Cv, Errors) {
  EXPECT_THROW(cv(line_set({{0, 0}, {1, 1}})), Error);
  try {
    cv(line_set({{1, 1}, {1, 1}, {1, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_front);
  }
}

TEST(GapRatio, LongestOverShortest) {
  const auto g = gap_ratio(line_set({{0, 0}, {1, 0}, {3, 0}}));
  EXPECT_TRUE(g.defined);
  EXPECT_NEAR(g.value, 2.0, 1e-15);
}

TEST(GapRatio, ZeroSegmentIsUndefined) {
  const auto g = gap_ratio(line_set({{0, 0}, {0, 0}, {1, 0}}));
  EXPECT_FALSE(g.defined);
  EXPECT_EQ(g.value, -1.0);
}

TEST(PfSampleSet, RejectsDecreasingWeights) {
  EXPECT_THROW(PfSampleSet({{0.5, {0, 0}}, {0.2, {1, 1}}}), Error);
}

TEST(NondominatedFilter, DropsDominatedPoints) {
  const std::vector<ObjectiveVector> pts{{1, 1}, {0, 1}, {1, 0}, {0.5, 0.5}, {0.6, 0.6}};
  const auto kept = nondominated_filter(pts);
  const std::vector<ObjectiveVector> expected{{0, 1}, {0.5, 0.5}, {1, 0}};
  EXPECT_EQ(kept, expected);
}

TEST(NondominatedFilter, KeepsDuplicatesAndDropsWeakDominance) {
  const std::vector<ObjectiveVector> pts{{0, 1}, {0, 1}, {0, 2}, {1, 1}};
  const std::vector<ObjectiveVector> expected{{0, 1}, {0, 1}};
  EXPECT_EQ(nondominated_filter(pts), expected);
}

TEST(Hypervolume, SinglePoint) {
  const std::vector<ObjectiveVector> pts{{0, 0}};
  EXPECT_NEAR(hypervolume_2d(pts, {1, 1}), 1.0, 1e-15);
}

TEST(Hypervolume, Staircase) {
  const std::vector<ObjectiveVector> pts{{1, 0}, {0, 1}};
  EXPECT_NEAR(hypervolume_2d(pts, {2, 2}), 3.0, 1e-15);
  const std::vector<ObjectiveVector> with_dominated{{1, 0}, {0, 1}, {1.5, 1.5}};
  EXPECT_NEAR(hypervolume_2d(with_dominated, {2, 2}), 3.0, 1e-15);
}

TEST(Hypervolume, RejectsPointsOutsideReference) {
  const std::vector<ObjectiveVector> pts{{0, 0}, {2, 0}};
  try {
    hypervolume_2d(pts, {2, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
}

TEST(Igd, PythagoreanDistance) {
  const std::vector<ObjectiveVector> s{{0, 0}};
  const std::vector<ObjectiveVector> ref{{3, 4}};
  EXPECT_NEAR(igd(s, ref), 5.0, 1e-15);
}

TEST(Igd, AveragesNearestDistances) {
  const std::vector<ObjectiveVector> s{{0, 0}, {10, 0}};
  const std::vector<ObjectiveVector> ref{{1, 0}, {10, 2}};
  EXPECT_NEAR(igd(s, ref), 1.5, 1e-15);
  EXPECT_THROW(igd(s, std::vector<ObjectiveVector>{}), Error);
  EXPECT_THROW(igd(std::vector<ObjectiveVector>{}, ref), Error);
}

TEST(Polyline, Distance) {
  const std::vector<ObjectiveVector> v{{0, 0}, {2, 0}, {2, 2}};
  EXPECT_NEAR(distance_to_polyline({1, 1}, v), 1.0, 1e-15);
  EXPECT_NEAR(distance_to_polyline({3, 3}, v), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(distance_to_polyline({2, 1}, v), 0.0, 1e-15);
  EXPECT_THROW(distance_to_polyline({0, 0}, std::vector<ObjectiveVector>{}), Error);
}

TEST(Stats, Slopes) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  EXPECT_NEAR(least_squares_slope(x, y), 2.0, 1e-14);
  const std::vector<double> t{100, 1000, 10000};
  const std::vector<double> e{0.1, 0.1 / std::sqrt(10.0), 0.01};
  EXPECT_NEAR(loglog_slope(t, e), -0.5, 1e-14);
  EXPECT_THROW(least_squares_slope(std::vector<double>{1}, std::vector<double>{1}), Error);
  EXPECT_THROW(loglog_slope(x, std::vector<double>{1, 0, 1, 1}), Error);
}

TEST(Stats, MeanAndSampleStd) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_NEAR(mean(v), 5.0, 1e-15);
  EXPECT_NEAR(sample_stddev(v), std::sqrt(32.0 / 7.0), 1e-14);
}

}  // namespace
}  // namespace surf
