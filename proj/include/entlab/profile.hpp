#pragma once

// Warping profiles f(u) of rotationally symmetric metrics du^2 + f(u)^2 dv^2
// with v of period 2*pi. Curvature is K(u) = -f''(u) / f(u), so convex
// profiles are exactly the non-positively curved ones.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/numeric.hpp"

namespace entlab {

struct Jet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

enum class PieceKind { Cosh, Quartic, Sinh, Linear, Blend };

inline const char* to_string(PieceKind k) {
  switch (k) {
    case PieceKind::Cosh: return "cosh";
    case PieceKind::Quartic: return "quartic";
    case PieceKind::Sinh: return "sinh";
    case PieceKind::Linear: return "linear";
    case PieceKind::Blend: return "blend";
  }
  return "?";
}

struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  PieceKind kind = PieceKind::Linear;
  std::function<Jet(double)> eval;
  std::function<double(double)> antiderivative;  // empty when no closed form

  bool analytic() const { return kind != PieceKind::Blend; }
};

class Profile {
 public:
  Profile() = default;

  /// Pieces must tile [lo, hi] in order. rough_points lists the joins where
  /// the profile is only C^1 (or C^0).
  Profile(std::vector<Piece> pieces, std::vector<double> rough_points)
      : pieces_(std::move(pieces)), rough_(std::move(rough_points)) {
    require(!pieces_.empty(), "profile needs at least one piece");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      require(pieces_[i].lo < pieces_[i].hi, "profile piece has empty range");
      if (i > 0) require(pieces_[i].lo == pieces_[i - 1].hi, "profile pieces must be contiguous");
    }
    std::sort(rough_.begin(), rough_.end());
  }

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<double>& rough_points() const { return rough_; }

  /// Index of the piece containing u; joins belong to the right-hand piece.
  /// Points outside the domain evaluate the end pieces' formulas.
  std::size_t piece_index(double u) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), u, [](double x, const Piece& p) { return x < p.lo; });
    if (it == pieces_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
  }

  Jet jet(double u) const { return pieces_[piece_index(u)].eval(u); }
  double operator()(double u) const { return jet(u).f; }

  bool is_rough_at(double u, double tol) const {
    return std::any_of(rough_.begin(), rough_.end(), [&](double r) { return std::abs(r - u) <= tol; });
  }

  /// Characteristic magnitude: largest |f| on a coarse grid.
  double scale(int n = 257) const {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs((*this)(lo() + (hi() - lo()) * i / (n - 1))));
    return m;
  }

  /// Replace [a, b] by one piece whose ends join smoothly with the rest.
  Profile splice(Piece middle) const {
    const double a = middle.lo, b = middle.hi;
    require(a > lo() && b < hi(), "spliced piece must lie strictly inside the profile domain");
    std::vector<Piece> out;
    for (const auto& p : pieces_) {
      if (p.hi <= a) {
        out.push_back(p);
      } else if (p.lo < a) {
        Piece left = p;
        left.hi = a;
        out.push_back(left);
      }
    }
    out.push_back(middle);
    for (const auto& p : pieces_) {
      if (p.lo >= b) {
        out.push_back(p);
      } else if (p.hi > b) {
        Piece right = p;
        right.lo = b;
        out.push_back(right);
      }
    }
    std::vector<double> rough;
    for (double r : rough_)
      if (r < a || r > b) rough.push_back(r);
    return Profile(std::move(out), std::move(rough));
  }

 private:
  std::vector<Piece> pieces_;
  std::vector<double> rough_;
};

inline Piece cosh_piece(double lo, double hi, double amplitude, double k, double shift = 0.0) {
  Piece p;
  p.lo = lo;
  p.hi = hi;
  p.kind = PieceKind::Cosh;
  p.eval = [amplitude, k, shift](double u) {
    const double x = k * (u - shift);
    const double c = std::cosh(x), s = std::sinh(x);
    return Jet{amplitude * c, amplitude * k * s, amplitude * k * k * c};
  };
  p.antiderivative = [amplitude, k, shift](double u) { return amplitude * std::sinh(k * (u - shift)) / k; };
  return p;
}

/// amplitude * sinh(k (u - shift)) / k; k == 0 degenerates to a line.
inline Piece sinh_piece(double lo, double hi, double amplitude, double k, double shift = 0.0) {
  Piece p;
  p.lo = lo;
  p.hi = hi;
  if (k == 0.0) {
    p.kind = PieceKind::Linear;
    p.eval = [amplitude, shift](double u) { return Jet{amplitude * (u - shift), amplitude, 0.0}; };
    p.antiderivative = [amplitude, shift](double u) { return 0.5 * amplitude * (u - shift) * (u - shift); };
    return p;
  }
  p.kind = PieceKind::Sinh;
  p.eval = [amplitude, k, shift](double u) {
    const double x = k * (u - shift);
    return Jet{amplitude * std::sinh(x) / k, amplitude * std::cosh(x), amplitude * k * std::sinh(x)};
  };
  p.antiderivative = [amplitude, k, shift](double u) { return amplitude * std::cosh(k * (u - shift)) / (k * k); };
  return p;
}

inline Piece linear_piece(double lo, double hi, double value_at_lo, double slope) {
  Piece p;
  p.lo = lo;
  p.hi = hi;
  p.kind = PieceKind::Linear;
  p.eval = [lo, value_at_lo, slope](double u) { return Jet{value_at_lo + slope * (u - lo), slope, 0.0}; };
  p.antiderivative = [lo, value_at_lo, slope](double u) {
    const double x = u - lo;
    return value_at_lo * x + 0.5 * slope * x * x;
  };
  return p;
}

/// C^2 piecewise quintic matching the given jets at uniformly spaced nodes on [lo, hi].
inline Piece hermite_piece(double lo, double hi, const std::vector<Jet>& nodes, PieceKind kind = PieceKind::Blend) {
  require(nodes.size() >= 2 && lo < hi, "hermite piece needs two nodes and a nonempty range");
  struct Table {
    double lo = 0.0, h = 0.0;
    std::vector<std::array<double, 6>> c;
    std::vector<double> cum;
  };
  auto tab = std::make_shared<Table>();
  const std::size_t n = nodes.size();
  tab->lo = lo;
  tab->h = (hi - lo) / static_cast<double>(n - 1);
  const double h = tab->h;
  tab->cum.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Jet& a = nodes[i];
    const Jet& b = nodes[i + 1];
    const double dy = b.f - a.f, d0 = h * a.df, d1 = h * b.df, s0 = h * h * a.d2f, s1 = h * h * b.d2f;
    std::array<double, 6> c{a.f,
                            d0,
                            0.5 * s0,
                            10.0 * dy - 6.0 * d0 - 4.0 * d1 - 0.5 * (3.0 * s0 - s1),
                            -15.0 * dy + 8.0 * d0 + 7.0 * d1 + 0.5 * (3.0 * s0 - 2.0 * s1),
                            6.0 * dy - 3.0 * d0 - 3.0 * d1 - 0.5 * (s0 - s1)};
    tab->c.push_back(c);
    tab->cum[i + 1] = tab->cum[i] + h * (c[0] + c[1] / 2 + c[2] / 3 + c[3] / 4 + c[4] / 5 + c[5] / 6);
  }
  auto locate = [tab](double u) {
    const double x = (u - tab->lo) / tab->h;
    const auto last = static_cast<double>(tab->c.size() - 1);
    const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, last));
    return std::pair{i, x - static_cast<double>(i)};
  };
  Piece p;
  p.lo = lo;
  p.hi = hi;
  p.kind = kind;
  p.eval = [tab, locate](double u) {
    const auto [i, t] = locate(u);
    const auto& c = tab->c[i];
    const double v = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    const double d = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
    const double dd = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
    return Jet{v, d / tab->h, dd / (tab->h * tab->h)};
  };
  p.antiderivative = [tab, locate](double u) {
    const auto [i, t] = locate(u);
    const auto& c = tab->c[i];
    const double poly = t * (c[0] + t * (c[1] / 2 + t * (c[2] / 3 + t * (c[3] / 4 + t * (c[4] / 5 + t * c[5] / 6)))));
    return tab->cum[i] + tab->h * poly;
  };
  return p;
}

/// f(u) = a cosh(sqrt(-K) u) on [-u_max, u_max]: the constant-curvature collar.
inline Profile base_profile(double a, Curvature K, double u_max) {
  require(a > 0.0, "collar amplitude a must be positive");
  require(!K.flat(), "base profile needs K < 0");
  require(u_max > 0.0, "profile half-width must be positive");
  return Profile({cosh_piece(-u_max, u_max, a, K.scale())}, {});
}

/// Abscissa u0 > 0 where the tangent line to a cosh(sqrt(-K) u) passes
/// through the origin: coth(x) = x with x = sqrt(-K) u0. Independent of a.
inline double tangent_point(Curvature K) {
  require(!K.flat(), "tangent point needs K < 0");
  auto g = [](double x) { return std::cosh(x) / std::sinh(x) - x; };
  auto dg = [](double x) {
    const double s = std::sinh(x);
    return -1.0 / (s * s) - 1.0;
  };
  const double x = numeric::bisect_newton(g, dg, 1.0, 2.0);
  return x / K.scale();
}

/// Smallest junction abscissa for which the quartic shrink is convex for
/// every s in (0, a]: x tanh(x) = 8/5 with x = sqrt(-K) u.
inline double convex_junction(Curvature K) {
  require(!K.flat(), "junction needs K < 0");
  auto g = [](double x) { return x * std::tanh(x) - 1.6; };
  auto dg = [](double x) {
    const double c = std::cosh(x);
    return std::tanh(x) + x / (c * c);
  };
  return numeric::bisect_newton(g, dg, 1.0, 2.0) / K.scale();
}

enum class JunctionRule { TangentPoint, Convex };

inline const char* to_string(JunctionRule r) { return r == JunctionRule::TangentPoint ? "tangent" : "convex"; }

/// Shrinking data for one collar: the quartic A u^4 + B u^2 + s replaces
/// a cosh(sqrt(-K) u) on (-junction, junction), matching value and slope.
struct CollarSpec {
  double a = 0.0;
  Curvature K;
  double s = 0.0;
  double junction = 0.0;
  double A = 0.0;
  double B = 0.0;
  JunctionRule rule = JunctionRule::TangentPoint;

  double outer_value() const { return a * std::cosh(K.scale() * junction); }
  double outer_slope() const { return a * K.scale() * std::sinh(K.scale() * junction); }
};

inline CollarSpec collar_spec(double a, Curvature K, double s, JunctionRule rule = JunctionRule::TangentPoint) {
  require(a > 0.0, "collar amplitude a must be positive");
  require(!K.flat(), "collar needs K < 0");
  require(s > 0.0 && s <= a, "shrunk value s must lie in (0, a]");
  CollarSpec c;
  c.a = a;
  c.K = K;
  c.s = s;
  c.rule = rule;
  c.junction = rule == JunctionRule::TangentPoint ? tangent_point(K) : convex_junction(K);
  const double u0 = c.junction, f = c.outer_value(), df = c.outer_slope();
  c.A = (df * u0 - 2.0 * f + 2.0 * s) / (2.0 * u0 * u0 * u0 * u0);
  c.B = (4.0 * f - df * u0 - 4.0 * s) / (2.0 * u0 * u0);
  return c;
}

/// Range of s for which the quartic piece of a collar is convex on
/// [-junction, junction], intersected with (0, a].
inline std::pair<double, double> quartic_convex_range(double a, Curvature K, double junction) {
  const double k = K.scale();
  const double f = a * std::cosh(k * junction), df = a * k * std::sinh(k * junction);
  const double lo = std::max(0.0, f - 5.0 * df * junction / 8.0);
  const double hi = std::min(a, f - df * junction / 4.0);
  return {lo, hi};
}

inline Piece quartic_piece(double lo, double hi, double A, double B, double s) {
  Piece p;
  p.lo = lo;
  p.hi = hi;
  p.kind = PieceKind::Quartic;
  p.eval = [A, B, s](double u) {
    const double u2 = u * u;
    return Jet{A * u2 * u2 + B * u2 + s, 4.0 * A * u2 * u + 2.0 * B * u, 12.0 * A * u2 + 2.0 * B};
  };
  p.antiderivative = [A, B, s](double u) {
    const double u2 = u * u;
    return A * u2 * u2 * u / 5.0 + B * u2 * u / 3.0 + s * u;
  };
  return p;
}

/// Shrunk collar profile on [-u_max, u_max]; rough (C^1) at +-junction.
inline Profile quartic_shrink(const CollarSpec& c, double u_max) {
  require(c.s > 0.0 && c.s <= c.a, "shrunk value s must lie in (0, a]");
  require(u_max > c.junction, "profile half-width must exceed the junction abscissa");
  const double k = c.K.scale();
  return Profile({cosh_piece(-u_max, -c.junction, c.a, k), quartic_piece(-c.junction, c.junction, c.A, c.B, c.s),
                  cosh_piece(c.junction, u_max, c.a, k)},
                 {-c.junction, c.junction});
}

/// K(u) = -f''(u) / f(u). Rough joins (not yet mollified) are rejected.
inline double curvature_of_profile(const Profile& f, double u) {
  const double tol = 1e-12 * std::max(1.0, std::abs(u));
  if (f.is_rough_at(u, tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "curvature requested at non-C2 point u = " << u;
    fail(Error::Kind::NonSmooth, os.str());
  }
  const Jet j = f.jet(u);
  require(j.f > 0.0, "profile must be positive where curvature is evaluated");
  return -j.d2f / j.f;
}

enum class AreaMethod { Auto, Quadrature };

/// Area 2*pi * integral of f over [lo, hi]. Auto uses closed-form
/// antiderivatives on analytic pieces and Gauss-Kronrod elsewhere.
inline double collar_area(const Profile& f, double lo, double hi, AreaMethod method = AreaMethod::Auto) {
  require(lo <= hi, "area range must be ordered");
  double total = 0.0;
  for (const auto& p : f.pieces()) {
    const double a = std::max(lo, p.lo), b = std::min(hi, p.hi);
    if (a >= b) continue;
    if (method == AreaMethod::Auto && p.antiderivative) {
      total += p.antiderivative(b) - p.antiderivative(a);
    } else {
      total += numeric::integrate([&p](double u) { return p.eval(u).f; }, a, b);
    }
  }
  return two_pi * total;
}

/// Closed form for the constant-curvature collar over |u| <= u0.
inline double cosh_collar_area(double a, Curvature K, double u0) {
  const double k = K.scale();
  return 2.0 * two_pi * a * std::sinh(k * u0) / k;
}

struct ConvexityScan {
  bool convex = true;
  bool positive = true;
  double worst_second_difference = std::numeric_limits<double>::infinity();  // relative to scale
  double worst_u = 0.0;
  double scale = 0.0;
};

/// Second-difference convexity and positivity scan on n uniform samples.
inline ConvexityScan scan_convexity(const Profile& f, int n = 10000, double tol = 1e-8) {
  require(n >= 3, "convexity scan needs at least three samples");
  std::vector<double> u(n), v(n);
  for (int i = 0; i < n; ++i) {
    u[i] = f.lo() + (f.hi() - f.lo()) * static_cast<double>(i) / (n - 1);
    v[i] = f(u[i]);
  }
  ConvexityScan r;
  for (double x : v) r.scale = std::max(r.scale, std::abs(x));
  r.positive = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / r.scale;
    if (d2 < r.worst_second_difference) {
      r.worst_second_difference = d2;
      r.worst_u = u[i];
    }
  }
  r.convex = r.worst_second_difference >= -tol;
  return r;
}

}  // namespace entlab
