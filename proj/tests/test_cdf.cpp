#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "surf/cdf.hpp"
#include "surf/geometry.hpp"
#include "surf/problems/gear.hpp"
#include "surf/problems/quadratic.hpp"

namespace surf {
namespace {

CdfEstimate square_table() {
  auto v = uniform_grid(kDefaultGridSize);
  for (double& x : v) x = x * x;
  return CdfEstimate::from_values(v);
}

TEST(Identity, EvalInvertDistance) {
  const auto id = CdfEstimate::identity();
  EXPECT_EQ(id(0.7), 0.7);
  EXPECT_EQ(id.invert(0.2), 0.2);
  EXPECT_EQ(sup_distance(id, id), 0.0);
}

TEST(EmpiricalCdf, EqualSegmentsGiveIdentity) {
  const std::vector<double> w{0, 0.5, 1}, s{0, 1, 2};
  for (auto coord : {InterpolationCoordinate::weight, InterpolationCoordinate::quantile}) {
    const auto phi = empirical_cdf(coord, CdfEstimate::identity(), w, s, kDefaultGridSize);
    EXPECT_LE(sup_distance(phi, CdfEstimate::identity()), 1e-12);
  }
}

TEST(EmpiricalCdf, DirectNormalization) {
  const std::vector<double> w{0, 0.5, 1}, s{0, 3, 4};
  for (auto coord : {InterpolationCoordinate::weight, InterpolationCoordinate::quantile}) {
    const auto phi = empirical_cdf(coord, CdfEstimate::identity(), w, s, kDefaultGridSize);
    EXPECT_NEAR(phi(0.5), 0.75, 1e-15);
    EXPECT_EQ(phi(0.0), 0.0);
    EXPECT_EQ(phi(1.0), 1.0);
  }
}

TEST(EmpiricalCdf, GearElevenUniformWeights) {
  const GearToy gear(4);
  std::vector<double> w;
  std::vector<ObjectiveVector> pts;
  for (int k = 0; k <= 10; ++k) {
    w.push_back(k / 10.0);
    pts.push_back(gear.pf_point(Weight(w.back())));
  }
  const auto s = chord_cumsum(pts);
  const auto truth = cdf_from_speed(problem_speed(gear));
  for (auto coord : {InterpolationCoordinate::weight, InterpolationCoordinate::quantile}) {
    EXPECT_LE(sup_distance(empirical_cdf(coord, CdfEstimate::identity(), w, s, kDefaultGridSize), truth), 0.05);
  }
}

TEST(EmpiricalCdf, Errors) {
  const std::vector<double> repeated{0, 0.5, 0.5, 1}, s4{0, 1, 2, 3};
  EXPECT_THROW(empirical_cdf(repeated, s4), Error);
  const std::vector<double> w{0, 0.5, 1}, zero{0, 0, 0};
  try {
    empirical_cdf(w, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_front);
  }
  const std::vector<double> open{0.1, 0.5, 1}, s3{0, 1, 2};
  EXPECT_THROW(empirical_cdf(open, s3), Error);
}

TEST(EmpiricalCdf, DuplicatePointsStayInvertible) {
  const std::vector<double> w{0, 0.25, 0.5, 0.75, 1}, s{0, 1, 1, 1, 2};
  for (auto coord : {InterpolationCoordinate::weight, InterpolationCoordinate::quantile}) {
    const auto phi = empirical_cdf(coord, CdfEstimate::identity(), w, s, kDefaultGridSize);
    double prev = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double x = phi.invert(k / 100.0);
      EXPECT_GE(x, prev);
      prev = x;
    }
  }
}

TEST(DampedUpdate, AlphaOneReturnsEmpirical) {
  const auto emp = square_table();
  EXPECT_LE(sup_distance(damped_update(CdfEstimate::identity(), emp, 1.0), emp), 1e-10);
}

TEST(DampedUpdate, FixedPoint) {
  const auto c = square_table();
  const auto out = damped_update(c, c, 0.4);
  for (int k = 0; k <= 1000; ++k) EXPECT_NEAR(out(k / 1000.0), c(k / 1000.0), 1e-15);
}

TEST(DampedUpdate, AffineCombination) {
  const std::vector<double> w{0, 0.5, 1}, s{0, 3, 4};
  const auto emp = empirical_cdf(w, s);
  const auto out = damped_update(CdfEstimate::identity(), emp, 0.3);
  EXPECT_NEAR(out(0.5), 0.3 * 0.75 + 0.7 * 0.5, 1e-10);
}

TEST(DampedUpdate, RejectsAlpha) {
  const auto c = square_table();
  for (double a : {0.0, -0.1, 1.5}) {
    try {
      damped_update(c, c, a);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parameter);
    }
  }
}

TEST(DampedUpdate, MonotoneAndPinned) {
  const auto out = damped_update(square_table(), CdfEstimate::identity(), 0.7);
  EXPECT_EQ(out(0.0), 0.0);
  EXPECT_EQ(out(1.0), 1.0);
  double prev = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double v = out(k / 10000.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Invert, QuadraticQuarterQuantile) {
  const Quadratic1d q(1, 4, 0, 1);
  const auto phi = *q.closed_form_cdf();
  const double w = phi.invert(0.25);
  // Root of the closed form by plain bisection.
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (quadratic_1d_phi(mid, 4.0) < 0.25 ? lo : hi) = mid;
  }
  EXPECT_NEAR(quadratic_1d_phi(w, 4.0), 0.25, 1e-6);
  EXPECT_NEAR(w, lo, 1e-5);
}

TEST(Invert, EndpointsAndDomain) {
  const auto c = square_table();
  EXPECT_EQ(c.invert(0.0), 0.0);
  EXPECT_EQ(c.invert(1.0), 1.0);
  EXPECT_NEAR(c(c.invert(0.37)), 0.37, 1e-10);
  EXPECT_THROW(c.invert(1.2), Error);
  EXPECT_THROW(c.invert(-0.1), Error);
  EXPECT_THROW(c(1.2), Error);
}

TEST(Invert, NondecreasingInQ) {
  const auto c = square_table();
  double prev = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double w = c.invert(k / 1000.0);
    EXPECT_GE(w, prev);
    prev = w;
  }
}

TEST(SupDistance, IdentityVersusSquare) {
  EXPECT_NEAR(sup_distance(CdfEstimate::identity(), square_table()), 0.25, 1e-4);
}

TEST(SupDistance, MetricOnScanGrid) {
  const auto a = square_table();
  const auto b = CdfEstimate::identity();
  const auto c = damped_update(a, b, 0.5);
  EXPECT_EQ(sup_distance(a, b), sup_distance(b, a));
  EXPECT_LE(sup_distance(a, b), sup_distance(a, c) + sup_distance(c, b));
}

TEST(FromValues, ResamplingIsIdempotent) {
  const auto c = cdf_from_speed([](double w) { return 1.0 + w * w; });
  const auto again = CdfEstimate::from_values(c.grid_values());
  EXPECT_LE(sup_distance(c, again), 1e-10);
}

TEST(FromValues, RejectsRealDecrease) {
  try {
    CdfEstimate::from_values({0.0, 0.6, 0.4, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ordering);
  }
}

TEST(FromValues, FlatSpotsAreJitteredForInversion) {
  const auto c = CdfEstimate::from_values({0.0, 0.5, 0.5, 0.5, 1.0});
  EXPECT_EQ(c(0.5), 0.5);
  const double w = c.invert(0.5);
  EXPECT_GE(w, 0.25 - 1e-9);
  EXPECT_LE(w, 0.75 + 1e-9);
}

TEST(Csv, RoundTrip) {
  const auto c = square_table();
  std::stringstream buffer;
  c.write_csv(buffer);
  std::string header;
  std::getline(buffer, header);
  EXPECT_EQ(header, "w,phi");
  buffer.seekg(0);
  const auto back = CdfEstimate::read_csv(buffer);
  EXPECT_EQ(sup_distance(c, back), 0.0);
}

}  // namespace
}  // namespace surf
