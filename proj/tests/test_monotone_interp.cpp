#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "surf/monotone_interp.hpp"
#include "surf/problems/quadratic.hpp"

namespace surf {
namespace {

MonotoneCubic make(std::vector<double> x, std::vector<double> y) { return build_pchip(x, y); }

TEST(BuildPchip, ReproducesLinearData) {
  const auto p = make({0, 0.5, 1}, {0, 0.5, 1});
  EXPECT_DOUBLE_EQ(p.eval(0.25), 0.25);
  for (int k = 0; k <= 10000; ++k) {
    const double w = k / 10000.0;
    EXPECT_NEAR(p.eval(w), w, 1e-14);
    EXPECT_NEAR(p.eval_derivative(w), 1.0, 1e-12);
  }
}

TEST(BuildPchip, SingleIntervalUsesSecant) {
  const auto p = make({0, 1}, {0, 1});
  EXPECT_EQ(p.slopes(), (std::vector<double>{1.0, 1.0}));
  const auto q = make({0, 2}, {1, 5});
  EXPECT_EQ(q.slopes(), (std::vector<double>{2.0, 2.0}));
}

TEST(BuildPchip, ZeroSecantZeroesInteriorSlope) {
  const auto p = make({0, 0.5, 1}, {0, 1, 1});
  EXPECT_EQ(p.slopes()[1], 0.0);
  double prev = p.eval(0.0);
  for (int k = 1; k <= 10000; ++k) {
    const double v = p.eval(k / 10000.0);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
}

TEST(BuildPchip, HarmonicMeanInteriorSlope) {
  // h0 = 1, h1 = 2, d0 = 1, d1 = 0.5:
  // w1 = 2*h1 + h0 = 5, w2 = h1 + 2*h0 = 4, m = (w1 + w2) / (w1/d0 + w2/d1) = 9 / 13.
  const auto p = make({0, 1, 3}, {0, 1, 2});
  EXPECT_NEAR(p.slopes()[1], 9.0 / 13.0, 1e-15);
}

TEST(BuildPchip, SignChangeZeroesSlope) {
  const auto p = make({0, 1, 2}, {0, 1, 0});
  EXPECT_EQ(p.slopes()[1], 0.0);
}

TEST(BuildPchip, EndpointClipping) {
  // Three-point endpoint estimate ((2h0 + h1) d0 - h0 d1) / (h0 + h1) with
  // h = 1, d0 = 1, d1 = 10 gives -3.5, opposite sign to d0, so it is zeroed.
  const auto p = make({0, 1, 2}, {0, 1, 11});
  EXPECT_EQ(p.slopes()[0], 0.0);
  // d0 = 1, d1 = -2 at the right end: (3 * -2 - 1) / 2 = -3.5 keeps sign,
  // |m| = 3.5 <= 3 * 2, no clipping.
  const auto q = make({0, 1, 2}, {0, 1, -1});
  EXPECT_NEAR(q.slopes()[2], -3.5, 1e-15);
  // d0 = 1, d1 = 0.1 at the left end: (3 - 0.1) / 2 = 1.45 <= 3, kept.
  const auto r = make({0, 1, 2}, {0, 1, 1.1});
  EXPECT_NEAR(r.slopes()[0], 1.45, 1e-15);
}

TEST(BuildPchip, EndpointMagnitudeClippedToThreeSecants) {
  // d0 = 1, d1 = -5 on unit spacing: m0 = (3 + 5) / 2 = 4 > 3 |d0|, clipped to 3.
  const auto p = make({0, 1, 2}, {0, 1, -4});
  EXPECT_EQ(p.slopes()[0], 3.0);
}

TEST(BuildPchip, Errors) {
  EXPECT_THROW(make({0, 0, 1}, {0, 1, 2}), Error);
  EXPECT_THROW(make({0, 1}, {0, 1, 2}), Error);
  EXPECT_THROW(make({0}, {0}), Error);
  try {
    make({0, 2, 1}, {0, 1, 2});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ordering);
  }
  try {
    make({0, 1}, {0, 1, 2});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape);
  }
}

TEST(Eval, ExactAtKnotsAndNoExtrapolation) {
  const auto p = make({0, 0.3, 0.7, 1}, {0, 0.1, 0.9, 1});
  EXPECT_EQ(p.eval(0.0), 0.0);
  EXPECT_EQ(p.eval(0.3), 0.1);
  EXPECT_EQ(p.eval(0.7), 0.9);
  EXPECT_EQ(p.eval(1.0), 1.0);
  EXPECT_THROW(p.eval(1.0000001), Error);
  EXPECT_THROW(p.eval(-1e-9), Error);
}

TEST(Eval, SymmetricDataForcesMidpoint) {
  const auto p = make({0, 1.0 / 3, 2.0 / 3, 1}, {0, 0.5, 0.5, 1});
  EXPECT_NEAR(p.eval(0.5), 0.5, 1e-15);
}

TEST(EvalDerivative, EqualsStoredSlopeAtKnots) {
  const auto p = make({0, 0.2, 0.5, 1}, {0, 0.4, 0.6, 1});
  for (std::size_t n = 0; n < p.size(); ++n) EXPECT_NEAR(p.eval_derivative(p.knots()[n]), p.slopes()[n], 1e-12);
}

TEST(EvalDerivative, NonnegativeOnMonotoneData) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x{0}, y{0};
  for (int k = 0; k < 25; ++k) {
    x.push_back(x.back() + 0.01 + u(rng));
    y.push_back(y.back() + (u(rng) < 0.3 ? 0.0 : u(rng)));
  }
  const auto p = make(x, y);
  for (int k = 0; k <= 10000; ++k) {
    EXPECT_GE(p.eval_derivative(x.back() * k / 10000.0), -1e-12);
  }
}

TEST(Invert, IdentityAndEndpoints) {
  const auto p = make({0, 1}, {0, 1});
  EXPECT_NEAR(p.invert(0.3), 0.3, 1e-12);
  EXPECT_EQ(p.invert(1.0), 1.0);
  EXPECT_EQ(p.invert(0.0), 0.0);
}

TEST(Invert, Errors) {
  const auto flat = make({0, 0.5, 1}, {0, 0.5, 0.5});
  try {
    flat.invert(0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_invertible);
  }
  const auto p = make({0, 1}, {0, 1});
  try {
    p.invert(1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
}

TEST(Invert, QuadraticClosedFormOracle) {
  std::vector<double> x(1025), y(1025);
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = k / 1024.0;
    y[k] = quadratic_1d_phi(x[k], 4.0);
  }
  const auto p = make(x, y);
  const double w = p.invert(0.5);
  EXPECT_NEAR(quadratic_1d_phi(w, 4.0), 0.5, 1e-5);
}

TEST(Invert, RoundTrip) {
  const auto p = make({0, 0.2, 0.6, 1}, {0, 0.5, 0.7, 1});
  for (int k = 0; k <= 100; ++k) {
    const double w = k / 100.0;
    EXPECT_NEAR(p.invert(p.eval(w), 1e-12), w, 1e-9);
    EXPECT_NEAR(p.eval(p.invert(p.eval(w), 1e-12)), p.eval(w), 2e-12);
  }
}

}  // namespace
}  // namespace surf
