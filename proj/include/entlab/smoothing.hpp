#pragma once

// Convexity-preserving mollification of piecewise profiles and the
// constant-curvature caps that replace cone points of angle > 2*pi.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <tuple>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/numeric.hpp"
#include "entlab/profile.hpp"

namespace entlab {

/// Normalized bump kernel exp(-1 / (1 - (x/eps)^2)) supported on [-eps, eps].
class Mollifier {
 public:
  explicit Mollifier(double half_width) : eps_(half_width) {
    require(half_width > 0.0 && std::isfinite(half_width), "mollifier half-width must be positive");
  }

  double half_width() const { return eps_; }

  double operator()(double x) const {
    const double t = x / eps_;
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t)) / (eps_ * unit_mass());
  }

  /// Integral of the unnormalized bump over [-1, 1].
  static double unit_mass() {
    static const double m = numeric::integrate(
        [](double t) { return std::abs(t) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - t * t)); }, -1.0, 1.0, 1e-15);
    return m;
  }

 private:
  double eps_;
};

namespace detail {

/// Smooth step on [0, 1]: value, first and second derivative.
inline std::array<double, 3> smooth_step(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  auto bump = [](double x) -> std::array<double, 3> {
    // e^{-1/x} and its first two derivatives.
    const double e = std::exp(-1.0 / x);
    const double x2 = x * x;
    return {e, e / x2, e * (1.0 / (x2 * x2) - 2.0 / (x2 * x))};
  };
  const auto a = bump(t);
  const auto b0 = bump(1.0 - t);
  const std::array<double, 3> b{b0[0], -b0[1], b0[2]};
  const double S = a[0] + b[0], dS = a[1] + b[1];
  const double N = a[1] * b[0] - a[0] * b[1];
  const double dN = a[2] * b[0] - a[0] * b[2];
  return {a[0] / S, N / (S * S), (dN * S - 2.0 * N * dS) / (S * S * S)};
}

/// Cutoff equal to 1 on |x| <= delta/2 and 0 on |x| >= delta.
inline std::array<double, 3> cutoff(double x, double delta) {
  const double d = std::abs(x);
  const double half = 0.5 * delta;
  if (d <= half) return {1.0, 0.0, 0.0};
  if (d >= delta) return {0.0, 0.0, 0.0};
  const auto s = smooth_step((d - half) / half);
  const double sign = x > 0 ? 1.0 : -1.0;
  return {1.0 - s[0], -s[1] * sign / half, -s[2] / (half * half)};
}

/// Jet of the convolution of f with the kernel at u; P is the single
/// point where f' may jump (its jump enters f-hat'' as a kernel term).
inline Jet convolve_jet(const Profile& f, double u, double P, double slope_jump, const Mollifier& m) {
  const double eps = m.half_width();
  std::vector<double> breaks;
  if (std::abs(u - P) < eps) breaks.push_back(u - P);
  auto part = [&](auto pick) {
    return numeric::integrate_split([&](double x) { return pick(f.jet(u - x)) * m(x); }, -eps, eps, breaks, 1e-12, 1e-16);
  };
  Jet out;
  out.f = part([](const Jet& j) { return j.f; });
  out.df = part([](const Jet& j) { return j.df; });
  out.d2f = part([](const Jet& j) { return j.d2f; }) + slope_jump * m(u - P);
  return out;
}

inline ConvexityScan scan_convexity_range(const Profile& f, double lo, double hi, int n, double tol, double scale) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = f(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  ConvexityScan r;
  r.scale = scale;
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / scale;
    if (d2 < r.worst_second_difference) {
      r.worst_second_difference = d2;
      r.worst_u = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
  }
  r.convex = r.worst_second_difference >= -tol;
  return r;
}

}  // namespace detail

struct MollifyOptions {
  double kernel_fraction = 0.25;  // initial kernel half-width as a fraction of delta
  int halvings = 6;               // kernel halvings tried before giving up
  int nodes_per_kernel = 64;      // tabulation nodes per kernel half-width
  int max_nodes_per_kernel = 512;
  int scan_points = 10000;
  double convexity_tol = 1e-8;
};

/// Smooth f near P while keeping it convex: f is blended with its
/// convolution on the delta-neighborhood of P and left untouched outside.
/// The blend is tabulated as a C^2 quintic spline through exact jets.
/// A profile whose 2-jets already agree at P is returned unchanged.
inline Profile mollify_convex(const Profile& f, double P, double delta, const MollifyOptions& opt = {}) {
  require(delta > 0.0, "mollification radius must be positive");
  const double reach = delta * (1.0 + opt.kernel_fraction);
  require(P - reach > f.lo() && P + reach < f.hi(), "mollification neighborhood must lie inside the profile domain");
  for (double r : f.rough_points())
    require(r == P || std::abs(r - P) > reach, "profile has another non-smooth point inside the mollification neighborhood");

  const auto input = scan_convexity(f, opt.scan_points, opt.convexity_tol);
  if (!input.convex) fail(Error::Kind::NonConvex, "mollify_convex: input profile is not convex");

  const auto& left = f.pieces()[f.piece_index(std::nextafter(P, f.lo()))];
  const auto& right = f.pieces()[f.piece_index(P)];
  const Jet jl = left.eval(P), jr = right.eval(P);
  const double scale = input.scale;
  require(std::abs(jl.f - jr.f) <= 1e-10 * scale, "mollify_convex: profile must be continuous at P");
  const double jump = jr.df - jl.df;
  const double slope_scale = std::max({1.0, std::abs(jl.df), std::abs(jr.df)});
  const double curv_scale = std::max({1.0, std::abs(jl.d2f), std::abs(jr.d2f)});
  if (std::abs(jump) <= 1e-12 * slope_scale && std::abs(jr.d2f - jl.d2f) <= 1e-12 * curv_scale) return f;

  double eps = opt.kernel_fraction * delta;
  int density = opt.nodes_per_kernel;
  for (int attempt = 0; attempt <= opt.halvings;) {
    const Mollifier kernel(eps);
    const int intervals = 2 * static_cast<int>(std::ceil(density * delta / eps));
    std::vector<Jet> nodes(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
      const double u = P - delta + 2.0 * delta * i / intervals;
      const double d = std::abs(u - P);
      if (i == 0 || i == intervals) {
        nodes[i] = (i == 0 ? left : right).eval(u);
        continue;
      }
      const Jet fh = detail::convolve_jet(f, u, P, jump, kernel);
      if (d <= 0.5 * delta) {
        nodes[i] = fh;
        continue;
      }
      const Jet fj = f.jet(u);
      const auto phi = detail::cutoff(u - P, delta);
      const double e0 = fh.f - fj.f, e1 = fh.df - fj.df, e2 = fh.d2f - fj.d2f;
      nodes[i] = Jet{fj.f + phi[0] * e0, fj.df + phi[1] * e0 + phi[0] * e1,
                     fj.d2f + phi[2] * e0 + 2.0 * phi[1] * e1 + phi[0] * e2};
    }
    double d2_scale = 0.0;
    for (const Jet& j : nodes) d2_scale = std::max(d2_scale, std::abs(j.d2f));
    Piece blend = hermite_piece(P - delta, P + delta, nodes);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2 * intervals; ++i) worst = std::min(worst, blend.eval(P - delta + delta * i / intervals).d2f);
    Profile out = f.splice(std::move(blend));
    const auto scan = detail::scan_convexity_range(out, P - 1.5 * delta, P + 1.5 * delta, 2001, opt.convexity_tol, scale);
    if (scan.convex && worst >= -opt.convexity_tol * d2_scale) return out;
    if (scan.convex && density < opt.max_nodes_per_kernel) {
      density *= 2;
      continue;
    }
    density = opt.nodes_per_kernel;
    eps *= 0.5;
    ++attempt;
  }
  fail(Error::Kind::NonConvex, "mollify_convex: blend is not convex for any tried kernel width");
}

/// Radial profile of a cone point with total angle 2*pi*b in a plane of curvature Kbar.
inline Profile conic_profile(double b, Curvature Kbar, double r_max) {
  if (!(b > 1.0)) fail(Error::Kind::InvalidArgument, "conic profile needs b > 1 (cone angle above 2*pi)");
  require(r_max > 0.0, "conic profile needs a positive radius");
  return Profile({sinh_piece(0.0, r_max, b, Kbar.scale())}, {});
}

enum class CapVariant { OneSector, TwoSector };

/// Constant-curvature cap of radius r0 and curvature k_eps glued C^1 in
/// place of the eps-ball around a cone point.
struct CapSpec {
  CapVariant variant = CapVariant::OneSector;
  double b = 1.0;
  Curvature Kbar;
  double eps = 0.0;
  double k_eps = 0.0;
  double r0 = 0.0;
  double L_eps = 0.0;
  /// Radius in the conic profile at which the cap boundary is glued.
  double glue_radius = 0.0;

  double cap_scale() const { return std::sqrt(-k_eps); }
};

inline CapSpec cap_parameters(double b, Curvature Kbar, double eps) {
  if (!(b > 1.0)) fail(Error::Kind::InvalidArgument, "no negatively curved cap exists for b <= 1");
  require(eps > 0.0, "cap radius eps must be positive");
  const double kb = Kbar.scale();
  const double fbar = Kbar.flat() ? b * eps : b * std::sinh(kb * eps) / kb;
  const double X = b * std::cosh(kb * eps);
  CapSpec c;
  c.variant = CapVariant::OneSector;
  c.b = b;
  c.Kbar = Kbar;
  c.eps = eps;
  c.L_eps = two_pi * fbar;
  c.k_eps = -(4.0 * pi * pi / (c.L_eps * c.L_eps)) * (X * X - 1.0);
  c.r0 = std::acosh(X) / std::sqrt(-c.k_eps);
  c.glue_radius = eps;
  return c;
}

inline CapSpec cap_parameters_two_sector(double b, double eps) {
  if (!(b > 1.0)) fail(Error::Kind::InvalidArgument, "no negatively curved cap exists for b <= 1");
  require(eps > 0.0, "cap radius eps must be positive");
  CapSpec c;
  c.variant = CapVariant::TwoSector;
  c.b = b;
  c.Kbar = Curvature(0.0);
  c.eps = eps;
  c.k_eps = 4.0 * (1.0 - b * b) / (b * b * eps * eps);
  c.r0 = b * std::acosh(b) * eps / (2.0 * std::sqrt(b * b - 1.0));
  c.L_eps = pi * b * eps;
  c.glue_radius = 0.5 * eps;
  return c;
}

/// Relative residuals of the two C^1 gluing equations (boundary length, slope).
inline std::array<double, 2> cap_residuals(const CapSpec& c) {
  const double q = c.cap_scale();
  const double x = q * c.r0;
  if (c.variant == CapVariant::OneSector) {
    const double kb = c.Kbar.scale();
    const double slope = c.b * std::cosh(kb * c.eps);
    return {std::abs(two_pi * std::sinh(x) / q - c.L_eps) / c.L_eps, std::abs(std::cosh(x) - slope) / slope};
  }
  const double half = 0.5 * c.b * c.eps;
  return {std::abs(std::sinh(x) / q - half) / half, std::abs(std::cosh(x) - c.b) / c.b};
}

struct CapProfile {
  CapSpec spec;
  Profile profile;
  Profile glued;  // C^1 profile before the junction is mollified
  double junction_delta = 0.0;
  /// Radius (cap coordinates) beyond which the profile is the shifted cone.
  double modified_radius = 0.0;
};

/// Cap profile: sinh cap on [0, r0], the outer conic profile shifted so its
/// radius glue_radius lands on r0, then the junction mollified over eps/4.
inline CapProfile build_cap_profile(const CapSpec& c, const Profile& outer, const MollifyOptions& opt = {}) {
  if (c.variant == CapVariant::TwoSector)
    require(c.Kbar.flat(), "two-sector caps are built only against the flat sector");
  const double shift = c.r0 - c.glue_radius;
  const double r_max = outer.hi() + shift;
  const double delta = 0.25 * c.eps;
  require(outer.lo() <= c.glue_radius - delta, "outer profile must cover the gluing radius");
  require(r_max > c.r0 + 2.0 * delta, "outer profile radius too small for the cap");

  Piece glued_outer;
  glued_outer.lo = c.r0;
  glued_outer.hi = r_max;
  glued_outer.kind = outer.pieces().size() == 1 ? outer.pieces().front().kind : PieceKind::Blend;
  auto base = std::make_shared<const Profile>(outer);
  glued_outer.eval = [base, shift](double r) { return base->jet(r - shift); };
  if (outer.pieces().size() == 1 && outer.pieces().front().antiderivative) {
    auto anti = outer.pieces().front().antiderivative;
    glued_outer.antiderivative = [anti, shift](double r) { return anti(r - shift); };
  }

  CapProfile out;
  out.spec = c;
  out.glued = Profile({sinh_piece(0.0, c.r0, 1.0, c.cap_scale()), glued_outer}, {c.r0});
  out.profile = mollify_convex(out.glued, c.r0, delta, opt);
  out.junction_delta = delta;
  out.modified_radius = c.r0 + delta;
  return out;
}

/// Convenience overload gluing against conic_profile(b, Kbar) out to radius r_max.
inline CapProfile build_cap_profile(const CapSpec& c, double r_max, const MollifyOptions& opt = {}) {
  return build_cap_profile(c, conic_profile(c.b, c.Kbar, r_max), opt);
}

}  // namespace entlab
