#include <gtest/gtest.h>

#include <cmath>

#include "entlab/hypgeom.hpp"
#include "entlab/random.hpp"
#include "oracles/oracles.hpp"

using namespace entlab;

TEST(Triangle, EquilateralEuclidean) {
  const auto t = triangle_from_sides(Curvature(0.0), 1, 1, 1);
  for (double a : t.angles) EXPECT_NEAR(a, pi / 3, 1e-15);
  EXPECT_NEAR(t.area, std::sqrt(3.0) / 4, 1e-15);
}

TEST(Triangle, RightEuclidean) {
  const auto t = triangle_from_sides(Curvature(0.0), 3, 4, 5);
  EXPECT_NEAR(t.angles[2], pi / 2, 1e-15);
  EXPECT_NEAR(t.area, 6.0, 1e-13);
}

TEST(Triangle, EquilateralHyperbolicMatchesHyperboloid) {
  const auto t = triangle_from_sides(Curvature(-1.0), 1, 1, 1);
  const auto o = oracle::hyperbolic_triangle(1, 1, 1);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(t.angles[i], o.angles[i], 1e-7);
    EXPECT_NEAR(t.angles[i], 0.91879787217802737, 1e-14);
  }
  EXPECT_NEAR(t.area, o.area, 1e-9);
  EXPECT_NEAR(t.area, 0.38519903705571113, 1e-14);
}

TEST(Triangle, RandomTrianglesMatchHyperboloid) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(0.1, 2.5), b = rng.uniform(0.1, 2.5);
    const double c = rng.uniform(std::abs(a - b) + 0.05, a + b - 0.05);
    const auto t = triangle_from_sides(Curvature(-1.0), a, b, c);
    const auto o = oracle::hyperbolic_triangle(a, b, c);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(t.angles[k], o.angles[k], 1e-7) << a << " " << b << " " << c;
    EXPECT_NEAR(t.area, o.area, 1e-8 * std::max(1.0, o.area));
  }
}

TEST(Triangle, DegenerateRejected) {
  EXPECT_THROW(triangle_from_sides(Curvature(-1.0), 1, 1, 2 - 1e-15), Error);
  EXPECT_THROW(triangle_from_sides(Curvature(-1.0), 1, 1, 3), Error);
  EXPECT_THROW(triangle_from_sides(Curvature(0.0), 0, 1, 1), Error);
  EXPECT_THROW(triangle_from_sides(Curvature(-1.0), 1, 1, std::nan("")), Error);
}

TEST(Triangle, NearDegenerateIsAccurate) {
  const double eps = 1e-9;
  const auto t = triangle_from_sides(Curvature(0.0), 1, 1, 2 - eps);
  EXPECT_GT(t.angles[2], 0.0);
  EXPECT_NEAR(t.angles[0] + t.angles[1] + t.angles[2], pi, 1e-12);
  EXPECT_NEAR(t.angles[0], std::sqrt(eps), 1e-9);
}

TEST(TriangleProperty, AngleSumAndAreaIdentity) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(1e-3, 5.0), b = rng.uniform(1e-3, 5.0);
    const double c = rng.uniform(std::abs(a - b) + 1e-3, a + b - 1e-3);
    if (c <= 0) continue;
    const double K = -rng.uniform(0.0, 3.0);
    const auto t = triangle_from_sides(Curvature(K), a, b, c);
    if (K == 0.0) {
      EXPECT_NEAR(t.angle_sum(), pi, 1e-12 * pi);
    } else {
      EXPECT_LT(t.angle_sum(), pi);
      EXPECT_NEAR(t.area * -K, pi - t.angle_sum(), 1e-12 * pi);
    }
  }
  const auto e = oracle::euclidean_triangle(2, 3, 4);
  EXPECT_NEAR(triangle_from_sides(Curvature(0.0), 2, 3, 4).area, e.area, 1e-12 * e.area);
}

TEST(TriangleProperty, ScalingCovariance) {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0.1, 3.0), b = rng.uniform(0.1, 3.0);
    const double c = rng.uniform(std::abs(a - b) + 0.01, a + b - 0.01);
    const double K = -rng.uniform(0.1, 3.0), s = rng.uniform(0.1, 10.0);
    const auto t1 = triangle_from_sides(Curvature(K), a, b, c);
    const auto t2 = triangle_from_sides(Curvature(K / s), std::sqrt(s) * a, std::sqrt(s) * b, std::sqrt(s) * c);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(t1.angles[k], t2.angles[k], 1e-12);
    EXPECT_NEAR(t2.area, s * t1.area, 1e-11 * s * t1.area);
  }
}

TEST(Compare, IdenticalCurvatureGivesOne) {
  const auto r = compare_triangles(Curvature(-2.0), Curvature(-2.0), 0.7, 1.1, 1.3);
  for (double x : r.angle_ratio) EXPECT_EQ(x, 1.0);
  EXPECT_EQ(r.area_ratio, 1.0);
}

TEST(Compare, SmallTrianglesNearlyEuclidean) {
  const double d = 1e-3;
  const auto r = compare_triangles(Curvature(-1.0), Curvature(0.0), d, d, d);
  for (double x : r.angle_ratio) EXPECT_NEAR(x, 1.0, 1e-5);
  EXPECT_NEAR(r.area_ratio, 1.0, 1e-5);
  // leading order: the angle defect equals the area sqrt(3) d^2 / 4, shared by three angles of pi/3
  EXPECT_NEAR(r.angle_ratio[0], 1.0 - std::sqrt(3.0) * d * d / (4.0 * pi), 1e-10);
}

TEST(Compare, HalfUnitOrientationFromOracle) {
  const auto r = compare_triangles(Curvature(-1.0), Curvature(0.0), 0.5, 0.5, 0.5);
  const auto h = oracle::hyperbolic_triangle(0.5, 0.5, 0.5);
  const auto e = oracle::euclidean_triangle(0.5, 0.5, 0.5);
  EXPECT_NEAR(r.angle_ratio[0], h.angles[0] / e.angles[0], 1e-7);
  EXPECT_NEAR(r.area_ratio, h.area / e.area, 1e-8);
  EXPECT_NEAR(r.angle_ratio[0], 0.96658411346390144, 1e-14);
  EXPECT_NEAR(r.area_ratio, 0.96975542007197326, 1e-14);
  EXPECT_LT(r.area_ratio, 1.0);
}

TEST(CompareProperty, ConvergenceOrderAtLeastTwo) {
  std::vector<double> dev;
  const std::vector<double> ds{1e-1, 1e-2, 1e-3};
  for (double d : ds) {
    const auto r = compare_triangles(Curvature(-1.0), Curvature(0.0), d, 1.2 * d, 1.5 * d);
    double m = std::abs(r.area_ratio - 1.0);
    for (double x : r.angle_ratio) m = std::max(m, std::abs(x - 1.0));
    dev.push_back(m);
  }
  for (std::size_t i = 0; i + 1 < ds.size(); ++i) {
    const double slope = std::log(dev[i] / dev[i + 1]) / std::log(ds[i] / ds[i + 1]);
    EXPECT_GE(slope, 2.0 - 0.1);
  }
}

TEST(Compare, SideDistancesShrinkWithCurvature) {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.2, 2.0), b = rng.uniform(0.2, 2.0);
    const double c = rng.uniform(std::abs(a - b) + 0.05, a + b - 0.05);
    const double r = compare_side_distances(Curvature(-1.0), Curvature(0.0), a, b, c, rng.uniform(), rng.uniform());
    EXPECT_LE(r, 1.0 + 1e-12);
  }
}

TEST(Hexagon, OracleValues) {
  const std::array<std::pair<double, double>, 3> cases{{{1.0, 1.7049128323580138}, {2.0, 0.8271369016385572},
                                                        {4.0, 0.2748545848624188}}};
  double prev = 1e300;
  for (auto [L, expected] : cases) {
    const auto h = hexagon_solve(Curvature(-1.0), {L, L, L});
    for (double x : h.solved()) EXPECT_NEAR(x, expected, 1e-12);
    EXPECT_LT(h.solved()[0], prev);
    prev = h.solved()[0];
  }
}

TEST(Hexagon, LawOfSines) {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 3> p{rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.1, 3)};
    const auto h = hexagon_solve(Curvature(-1.0), p);
    const double r0 = std::sinh(h.sides[0]) / std::sinh(h.sides[3]);
    EXPECT_NEAR(std::sinh(h.sides[2]) / std::sinh(h.sides[5]), r0, 1e-10 * r0);
    EXPECT_NEAR(std::sinh(h.sides[4]) / std::sinh(h.sides[1]), r0, 1e-10 * r0);
  }
}

TEST(Hexagon, CurvatureScaling) {
  const auto h4 = hexagon_solve(Curvature(-4.0), {1, 1, 1});
  const auto h1 = hexagon_solve(Curvature(-1.0), {2, 2, 2});
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(h4.sides[i], 0.5 * h1.sides[i], 1e-14);
}

TEST(HexagonProperty, SwappingRolesRecoversInput) {
  Rng rng(15);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 3> p{rng.uniform(0.1, 4), rng.uniform(0.1, 4), rng.uniform(0.1, 4)};
    const auto h = hexagon_solve(Curvature(-1.0), p);
    const auto back = hexagon_solve(Curvature(-1.0), h.solved());
    const auto again = back.solved();
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(again[k], p[k], 1e-9 * p[k]);
  }
}

TEST(Hexagon, RejectsBadInput) {
  EXPECT_THROW(hexagon_solve(Curvature(-1.0), {1, 0, 1}), Error);
  EXPECT_THROW(hexagon_solve(Curvature(0.0), {1, 1, 1}), Error);
  EXPECT_THROW(Curvature(0.5), Error);
}
