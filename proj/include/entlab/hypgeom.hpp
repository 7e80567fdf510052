#pragma once

// Trigonometry of the constant-curvature planes K <= 0.
//
// Every hyperbolic formula is evaluated at K = -1 after rescaling lengths by
// sqrt(-K); angles are scale invariant and areas pick up a factor 1/(-K).
// Angles and areas use half-angle (L'Huilier-type) forms throughout so thin
// and very small triangles keep full relative precision.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "entlab/core.hpp"

namespace entlab {

struct TriangleShape {
  Curvature curvature;
  std::array<double, 3> sides{};   // a, b, c
  std::array<double, 3> angles{};  // angle i is opposite side i
  double area = 0.0;

  double angle_sum() const { return angles[0] + angles[1] + angles[2]; }
};

struct HexagonShape {
  Curvature curvature;
  // Cyclic order a1, b3, a2, b1, a3, b2: even slots hold the prescribed
  // sides, b_i sits opposite a_i.
  std::array<double, 6> sides{};

  std::array<double, 3> prescribed() const { return {sides[0], sides[2], sides[4]}; }
  std::array<double, 3> solved() const { return {sides[3], sides[5], sides[1]}; }
};

struct TriangleComparison {
  std::array<double, 3> angle_ratio{};  // alpha_1 / alpha_2 per vertex
  double area_ratio = 1.0;              // v_1 / v_2
};

namespace detail {

inline void check_sides(double a, double b, double c, double tol) {
  for (double x : {a, b, c}) require(std::isfinite(x) && x > 0.0, "triangle sides must be positive and finite");
  const double perimeter = a + b + c;
  const double slack = std::min({b + c - a, a + c - b, a + b - c});
  if (slack <= tol * perimeter) {
    std::ostringstream os;
    os.precision(17);
    os << "degenerate triangle (" << a << ", " << b << ", " << c << "): triangle-inequality slack " << slack;
    fail(Error::Kind::Degenerate, os.str());
  }
}

}  // namespace detail

inline TriangleShape triangle_from_sides(Curvature K, double a, double b, double c, double tol = 1e-12) {
  detail::check_sides(a, b, c, tol);
  TriangleShape t{K, {a, b, c}, {}, 0.0};

  // Differences s - x as (y + z - x) / 2 to avoid cancellation.
  if (K.flat()) {
    const double s = 0.5 * (a + b + c);
    const double sa = 0.5 * (b + c - a), sb = 0.5 * (a + c - b), sc = 0.5 * (a + b - c);
    t.angles[0] = 2.0 * std::atan2(std::sqrt(sb * sc), std::sqrt(s * sa));
    t.angles[1] = 2.0 * std::atan2(std::sqrt(sa * sc), std::sqrt(s * sb));
    t.angles[2] = 2.0 * std::atan2(std::sqrt(sa * sb), std::sqrt(s * sc));
    // Kahan's ordering of Heron's formula.
    std::array<double, 3> v{a, b, c};
    std::sort(v.begin(), v.end(), std::greater<>());
    const double x = v[0], y = v[1], z = v[2];
    t.area = 0.25 * std::sqrt((x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z)));
    return t;
  }

  const double k = K.scale();
  const double A = k * a, B = k * b, C = k * c;
  const double s = 0.5 * (A + B + C);
  const double sa = 0.5 * (B + C - A), sb = 0.5 * (A + C - B), sc = 0.5 * (A + B - C);
  const double shs = std::sinh(s), sha = std::sinh(sa), shb = std::sinh(sb), shc = std::sinh(sc);
  t.angles[0] = 2.0 * std::atan2(std::sqrt(shb * shc), std::sqrt(shs * sha));
  t.angles[1] = 2.0 * std::atan2(std::sqrt(sha * shc), std::sqrt(shs * shb));
  t.angles[2] = 2.0 * std::atan2(std::sqrt(sha * shb), std::sqrt(shs * shc));
  const double q = std::tanh(0.5 * s) * std::tanh(0.5 * sa) * std::tanh(0.5 * sb) * std::tanh(0.5 * sc);
  const double defect = 4.0 * std::atan(std::sqrt(q));
  t.area = defect / (-K.value());
  return t;
}

/// Angle and area ratios of the triangles with equal sides in planes K1 and K2.
inline TriangleComparison compare_triangles(Curvature K1, Curvature K2, double a, double b, double c) {
  const auto t1 = triangle_from_sides(K1, a, b, c);
  const auto t2 = triangle_from_sides(K2, a, b, c);
  TriangleComparison r;
  for (int i = 0; i < 3; ++i) r.angle_ratio[i] = t1.angles[i] / t2.angles[i];
  r.area_ratio = t1.area / t2.area;
  return r;
}

/// Distance between the points at distances p and q from a vertex along two
/// geodesic rays meeting at the given angle.
inline double side_point_distance(Curvature K, double p, double q, double angle) {
  const double sh = std::sin(0.5 * angle);
  if (K.flat()) return std::sqrt((p - q) * (p - q) + 4.0 * p * q * sh * sh);
  const double k = K.scale();
  const double P = k * p, Q = k * q;
  // sinh^2(d/2) = sinh^2((p-q)/2) + sinh p sinh q sin^2(angle/2)
  const double h = std::sinh(0.5 * (P - Q));
  const double s2 = h * h + std::sinh(P) * std::sinh(Q) * sh * sh;
  return 2.0 * std::asinh(std::sqrt(s2)) / k;
}

/// Ratio dist_1 / dist_2 between the point at t*b on side b and the point at
/// s*c on side c (both measured from the vertex opposite side a) in the
/// triangles with sides a, b, c at curvatures K1 and K2.
inline double compare_side_distances(Curvature K1, Curvature K2, double a, double b, double c, double t, double s) {
  require(t >= 0 && t <= 1 && s >= 0 && s <= 1, "side parameters must lie in [0, 1]");
  const auto t1 = triangle_from_sides(K1, a, b, c);
  const auto t2 = triangle_from_sides(K2, a, b, c);
  const double d1 = side_point_distance(K1, t * b, s * c, t1.angles[0]);
  const double d2 = side_point_distance(K2, t * b, s * c, t2.angles[0]);
  if (d2 == 0.0) return d1 == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return d1 / d2;
}

/// Right-angled hexagon with three prescribed pairwise non-adjacent sides.
inline HexagonShape hexagon_solve(Curvature K, const std::array<double, 3>& prescribed) {
  require(!K.flat(), "right-angled hexagons need K < 0");
  for (double x : prescribed) require(std::isfinite(x) && x > 0.0, "hexagon sides must be positive and finite");
  const double k = K.scale();
  const std::array<double, 3> a{k * prescribed[0], k * prescribed[1], k * prescribed[2]};
  auto opposite = [&](int i) {
    const double aj = a[(i + 1) % 3], ak = a[(i + 2) % 3];
    const double ch = (std::cosh(a[i]) + std::cosh(aj) * std::cosh(ak)) / (std::sinh(aj) * std::sinh(ak));
    return std::acosh(ch) / k;
  };
  HexagonShape h{K, {}};
  h.sides = {prescribed[0], opposite(2), prescribed[1], opposite(0), prescribed[2], opposite(1)};
  return h;
}

}  // namespace entlab
