#pragma once

// Riccati and Jacobi integration along curvature tracks, the Gronwall
// expansion bound, and geodesics of warped metrics du^2 + f(u)^2 dv^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/numeric.hpp"
#include "entlab/profile.hpp"

namespace entlab {

/// Gaussian curvature seen along a unit-speed geodesic, as a function of time.
/// Flat and constant pieces are kept symbolic so they can be integrated exactly.
class CurvatureTrack {
 public:
  enum class Kind { Flat, Constant, Function };

  struct Piece {
    Kind kind = Kind::Flat;
    double duration = 0.0;
    double K = 0.0;                           // Constant
    std::shared_ptr<const std::function<double(double)>> K_of;  // Function, local time
    double offset = 0.0;                      // Function: local time of this piece's start
    double K_min = 0.0;                       // most negative curvature on the piece
    double step_hint = std::numeric_limits<double>::infinity();

    double at(double tau) const {
      switch (kind) {
        case Kind::Flat: return 0.0;
        case Kind::Constant: return K;
        case Kind::Function: return (*K_of)(offset + tau);
      }
      return 0.0;
    }
  };

  CurvatureTrack() = default;

  static CurvatureTrack constant(double K, double duration) {
    CurvatureTrack t;
    t.add_constant(K, duration);
    return t;
  }

  static CurvatureTrack flat(double duration) {
    CurvatureTrack t;
    t.add_flat(duration);
    return t;
  }

  /// Linear interpolation of samples K[i] at times i*dt.
  static CurvatureTrack sampled(std::vector<double> K, double dt) {
    require(K.size() >= 2 && dt > 0.0, "sampled curvature needs two samples and dt > 0");
    const double lo = *std::min_element(K.begin(), K.end());
    const double T = dt * static_cast<double>(K.size() - 1);
    auto data = std::make_shared<std::vector<double>>(std::move(K));
    CurvatureTrack t;
    t.add_function(
        [data, dt](double tau) {
          const double x = std::clamp(tau / dt, 0.0, static_cast<double>(data->size() - 1));
          const auto i = std::min(static_cast<std::size_t>(x), data->size() - 2);
          const double r = x - static_cast<double>(i);
          return (*data)[i] + r * ((*data)[i + 1] - (*data)[i]);
        },
        T, lo, dt);
    return t;
  }

  CurvatureTrack& add_flat(double duration) {
    if (duration <= 0.0) return *this;
    if (!pieces_.empty() && pieces_.back().kind == Kind::Flat) {
      pieces_.back().duration += duration;
    } else {
      Piece p;
      p.duration = duration;
      pieces_.push_back(std::move(p));
    }
    return *this;
  }

  CurvatureTrack& add_constant(double K, double duration) {
    require(std::isfinite(K) && K <= 0.0, "track curvature must be finite and <= 0");
    if (K == 0.0) return add_flat(duration);
    if (duration <= 0.0) return *this;
    Piece p;
    p.kind = Kind::Constant;
    p.duration = duration;
    p.K = K;
    p.K_min = K;
    pieces_.push_back(std::move(p));
    return *this;
  }

  /// K_of is evaluated on local time [0, duration]; K_min bounds it from below.
  CurvatureTrack& add_function(std::function<double(double)> K_of, double duration, double K_min,
                               double step_hint = std::numeric_limits<double>::infinity()) {
    require(K_min <= 0.0, "curvature lower bound must be <= 0");
    if (duration <= 0.0) return *this;
    Piece p;
    p.kind = Kind::Function;
    p.duration = duration;
    p.K_of = std::make_shared<const std::function<double(double)>>(std::move(K_of));
    p.K_min = K_min;
    p.step_hint = step_hint;
    pieces_.push_back(std::move(p));
    return *this;
  }

  CurvatureTrack& append(const CurvatureTrack& other) {
    for (const auto& p : other.pieces_) {
      if (p.kind == Kind::Flat) {
        add_flat(p.duration);
      } else {
        pieces_.push_back(p);
      }
    }
    return *this;
  }

  const std::vector<Piece>& pieces() const { return pieces_; }

  double duration() const {
    double d = 0.0;
    for (const auto& p : pieces_) d += p.duration;
    return d;
  }

  /// Largest sqrt(-K) on the track.
  double max_scale() const {
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max(m, std::sqrt(-p.K_min));
    return m;
  }

  double at(double t) const {
    for (const auto& p : pieces_) {
      if (t < p.duration) return p.at(std::max(t, 0.0));
      t -= p.duration;
    }
    return pieces_.empty() ? 0.0 : pieces_.back().at(pieces_.back().duration);
  }

  /// Integral of K over the whole track.
  double integral() const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      if (p.kind == Kind::Constant) {
        s += p.K * p.duration;
      } else if (p.kind == Kind::Function) {
        const double h = std::isfinite(p.step_hint) ? p.step_hint : p.duration;
        const int n = std::max(1, std::min(4096, static_cast<int>(std::ceil(p.duration / h))));
        for (int i = 0; i < n; ++i)
          s += numeric::integrate([&p](double tau) { return p.at(tau); }, p.duration * i / n, p.duration * (i + 1) / n,
                                  1e-12);
      }
    }
    return s;
  }

  /// The part of the track on [t0, t1].
  CurvatureTrack slice(double t0, double t1) const {
    require(t0 <= t1, "slice bounds must be ordered");
    CurvatureTrack out;
    double start = 0.0;
    for (const auto& p : pieces_) {
      const double end = start + p.duration;
      const double a = std::max(t0, start), b = std::min(t1, end);
      if (b > a) {
        Piece q = p;
        q.duration = b - a;
        if (q.kind == Kind::Function) q.offset = p.offset + (a - start);
        if (q.kind == Kind::Flat) {
          out.add_flat(q.duration);
        } else {
          out.pieces_.push_back(std::move(q));
        }
      }
      start = end;
    }
    return out;
  }

 private:
  std::vector<Piece> pieces_;
};

/// Curvature along the meridian geodesic u = u_start + t of a warped profile.
inline CurvatureTrack meridian_track(const Profile& f, double u_start, double length, double step_hint = 1e-3) {
  require(length >= 0.0, "meridian length must be nonnegative");
  require(u_start >= f.lo() && u_start + length <= f.hi(), "meridian must stay inside the profile domain");
  auto prof = std::make_shared<const Profile>(f);
  double kmin = 0.0;
  const int n = 2001;
  for (long i = 0; i < n; ++i) {
    const Jet j = f.jet(u_start + length * i / (n - 1));
    kmin = std::min(kmin, -j.d2f / j.f);
  }
  CurvatureTrack t;
  t.add_function(
      [prof, u_start](double tau) {
        const Jet j = prof->jet(u_start + tau);
        return -j.d2f / j.f;
      },
      length, kmin * (1.0 + 1e-6), step_hint);
  return t;
}

struct RiccatiOptions {
  double dt = 1e-3;
  double tol = 1e-6;  // relative slack on the confinement band
  std::function<void(double t, double w)> observer;
};

struct RiccatiResult {
  double w = 0.0;
  double integral = 0.0;  // integral of w
  double elapsed = 0.0;   // sum of the steps taken, accumulated like integral
  double w_min = 0.0;
  double w_max = 0.0;
};

/// Solve w' = -K - w^2 along the track. Flat pieces use the exact solution
/// w0 / (1 + w0 t); other pieces use RK4 on (w, integral of w).
inline RiccatiResult riccati_step(const CurvatureTrack& track, double w0, const RiccatiOptions& opt = {}) {
  require(opt.dt > 0.0, "Riccati step must be positive");
  require(std::isfinite(w0) && w0 >= 0.0, "Riccati start must be a finite w0 >= 0");
  const double M = std::max(track.max_scale(), w0);
  const double band = M * (1.0 + 1e-12) + opt.tol * std::max(1.0, M);
  RiccatiResult r;
  r.w = r.w_min = r.w_max = w0;
  double t = 0.0;
  if (opt.observer) opt.observer(t, r.w);
  auto check = [&](double w) {
    if (!(std::abs(w) <= band)) {
      fail(Error::Kind::Integration, "Riccati solution left the band [-max sqrt(-K), max sqrt(-K)]");
    }
    r.w_min = std::min(r.w_min, w);
    r.w_max = std::max(r.w_max, w);
  };
  for (const auto& p : track.pieces()) {
    if (p.kind == CurvatureTrack::Kind::Flat) {
      // Sub-stepped only when an observer wants samples.
      const long n = opt.observer ? numeric::step_count(p.duration, opt.dt) : 1;
      const double h = p.duration / n;
      for (long i = 0; i < n; ++i) {
        const double w = r.w;
        r.integral += std::log1p(w * h);
        r.w = w / (1.0 + w * h);
        r.elapsed += h;
        t += h;
        check(r.w);
        if (opt.observer) opt.observer(t, r.w);
      }
      continue;
    }
    const long n = numeric::step_count(p.duration, std::min(opt.dt, p.step_hint));
    const double h = p.duration / n;
    for (long i = 0; i < n; ++i) {
      const double tau = p.duration * i / n;
      auto rhs = [&p](double s, const std::array<double, 2>& y) {
        return std::array<double, 2>{-p.at(s) - y[0] * y[0], y[0]};
      };
      const auto k1 = rhs(tau, {r.w, 0.0});
      const auto k2 = rhs(tau + 0.5 * h, {r.w + 0.5 * h * k1[0], 0.0});
      const auto k3 = rhs(tau + 0.5 * h, {r.w + 0.5 * h * k2[0], 0.0});
      const auto k4 = rhs(tau + h, {r.w + h * k3[0], 0.0});
      r.w += h * ((k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0);
      r.integral += h * ((k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0);
      r.elapsed += h;
      t += h;
      check(r.w);
      if (opt.observer) opt.observer(t, r.w);
    }
  }
  return r;
}

struct JacobiResult {
  double y = 0.0;
  double dy = 0.0;
};

/// RK4 on y'' = -K y along the track.
inline JacobiResult jacobi_integrate(const CurvatureTrack& track, double y0, double dy0, double dt = 1e-3,
                                     const std::function<void(double, double, double)>& observer = {}) {
  require(y0 != 0.0 || dy0 != 0.0, "Jacobi field must start nonzero");
  require(dt > 0.0, "Jacobi step must be positive");
  std::array<double, 2> y{y0, dy0};
  double t = 0.0;
  if (observer) observer(t, y[0], y[1]);
  for (const auto& p : track.pieces()) {
    const long n = numeric::step_count(p.duration, std::min(dt, p.step_hint));
    const double h = p.duration / n;
    auto rhs = [&p](double s, const std::array<double, 2>& z) {
      return std::array<double, 2>{z[1], -p.at(s) * z[0]};
    };
    for (long i = 0; i < n; ++i) {
      y = numeric::rk4_step<2>(rhs, p.duration * i / n, y, h);
      t += h;
      if (observer) observer(t, y[0], y[1]);
    }
  }
  return {y[0], y[1]};
}

/// exp(1/2 * integral of (1 - K)): bound on the growth of the norm of (y, y') under y'' = -K y.
inline double gronwall_bound(const CurvatureTrack& track) {
  return std::exp(0.5 * (track.duration() - track.integral()));
}

// ---------------------------------------------------------------------------
// Warped metrics.

class WarpedMetric {
 public:
  explicit WarpedMetric(Profile f) : f_(std::move(f)) {
    const auto scan = scan_convexity(f_, 4001);
    require(scan.positive, "warped profile must be positive");
    const int n = 20001;
    for (long i = 0; i < n; ++i) {
      const Jet j = f_.jet(lo() + (hi() - lo()) * i / (n - 1));
      max_scale_ = std::max(max_scale_, std::sqrt(std::max(0.0, j.d2f / j.f)));
    }
  }

  const Profile& profile() const { return f_; }
  double lo() const { return f_.lo(); }
  double hi() const { return f_.hi(); }
  double curvature(double u) const {
    const Jet j = f_.jet(u);
    return -j.d2f / j.f;
  }
  /// Largest sqrt(-K) over the profile (dense sampling).
  double max_scale() const { return max_scale_; }

 private:
  Profile f_;
  double max_scale_ = 0.0;
};

struct GeodesicState {
  double u = 0.0, v = 0.0, du = 0.0, dv = 0.0;
};

inline double speed_squared(const WarpedMetric& m, const GeodesicState& s) {
  const double f = m.profile()(s.u);
  return s.du * s.du + f * f * s.dv * s.dv;
}

inline double clairaut(const WarpedMetric& m, const GeodesicState& s) {
  const double f = m.profile()(s.u);
  return f * f * s.dv;
}

/// Unit-speed state at (u, v) making angle theta with the u-direction.
inline GeodesicState unit_state(const WarpedMetric& m, double u, double v, double theta) {
  return {u, v, std::cos(theta), std::sin(theta) / m.profile()(u)};
}

struct TrajectoryPoint {
  double t, u, v, du, dv, K, w;
};

struct GeodesicOptions {
  bool reflect = true;         // reflect u at the ends of the profile domain
  double drift_tol = 1e-6;     // abort when speed or Clairaut drift exceeds this
  std::optional<double> w0;    // integrate the Riccati equation along the way
  double riccati_bound = 0.0;  // band for w; 0 means max sqrt(-K) of the metric
  std::optional<std::array<double, 2>> jacobi;  // integrate y'' = -K y from (y, y')
  int record_every = 0;                         // 0 disables trajectory recording
};

struct GeodesicRun {
  GeodesicState state;
  double t = 0.0;
  double w = 0.0;
  double w_integral = 0.0;
  double elapsed = 0.0;
  double y = 0.0, dy = 0.0;
  double max_speed_drift = 0.0;
  double max_clairaut_drift = 0.0;
  int reflections = 0;
  std::vector<TrajectoryPoint> samples;
};

/// Fixed-step RK4 for u'' = f f' v'^2, v'' = -2 (f'/f) u' v', optionally
/// carrying the Riccati and Jacobi equations for K(u(t)).
inline GeodesicRun integrate_geodesic(const WarpedMetric& m, GeodesicState s0, double T, double dt,
                                      const GeodesicOptions& opt = {}) {
  require(dt > 0.0 && T >= 0.0, "geodesic integration needs dt > 0 and T >= 0");
  require(std::abs(speed_squared(m, s0) - 1.0) <= 1e-8, "geodesic start must be unit speed");
  using State = std::array<double, 8>;  // u v du dv w W y dy
  const Profile& f = m.profile();
  auto rhs = [&f](double, const State& x) {
    const Jet j = f.jet(x[0]);
    const double K = -j.d2f / j.f;
    return State{x[2], x[3], j.f * j.df * x[3] * x[3], -2.0 * (j.df / j.f) * x[2] * x[3], -K - x[4] * x[4], x[4],
                 x[7], -K * x[6]};
  };
  const bool riccati = opt.w0.has_value();
  const double M = std::max({opt.riccati_bound > 0.0 ? opt.riccati_bound : m.max_scale(), riccati ? *opt.w0 : 0.0});
  const double band = M * (1.0 + 1e-9) + 1e-6 * std::max(1.0, M);
  if (riccati) require(*opt.w0 >= 0.0 && *opt.w0 <= band, "Riccati start must lie in [0, max sqrt(-K)]");
  State x{s0.u, s0.v, s0.du, s0.dv, riccati ? *opt.w0 : 0.0, 0.0, opt.jacobi ? (*opt.jacobi)[0] : 0.0,
          opt.jacobi ? (*opt.jacobi)[1] : 0.0};
  const double e0 = speed_squared(m, s0);
  const double c0 = clairaut(m, s0);
  GeodesicRun run;
  auto record = [&](double t) {
    run.samples.push_back({t, x[0], x[1], x[2], x[3], m.curvature(x[0]), x[4]});
  };
  if (opt.record_every > 0) record(0.0);

  auto step = [&](double h) {
    const State y = numeric::rk4_step<8>(rhs, 0.0, x, h);
    return y;
  };
  const long n = numeric::step_count(T, dt);
  const double h = T / n;
  double t = 0.0;
  for (long i = 0; i < n; ++i) {
    double left = h;
    for (int guard = 0; left > 0.0; ++guard) {
      require(guard < 64, "geodesic keeps reflecting within one step");
      State y = step(left);
      const double wall = y[0] < m.lo() ? m.lo() : (y[0] > m.hi() ? m.hi() : std::numeric_limits<double>::quiet_NaN());
      if (!opt.reflect || std::isnan(wall)) {
        x = y;
        break;
      }
      double a = 0.0, b = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double c = 0.5 * (a + b);
        const double uc = step(c * left)[0];
        if ((uc - wall) * (x[0] - wall) > 0.0) {
          a = c;
        } else {
          b = c;
        }
      }
      x = step(a * left);
      x[2] = -x[2];
      ++run.reflections;
      left -= a * left;
      if (a == 0.0) {
        // Already on the wall and heading out: the flip above turns it back.
        continue;
      }
    }
    run.elapsed += h;
    t = h * (i + 1);
    x[1] = std::fmod(x[1], two_pi);
    if (x[1] < 0.0) x[1] += two_pi;
    const GeodesicState s{x[0], x[1], x[2], x[3]};
    const double de = std::abs(speed_squared(m, s) - e0);
    const double dc = std::abs(clairaut(m, s) - c0);
    run.max_speed_drift = std::max(run.max_speed_drift, de);
    run.max_clairaut_drift = std::max(run.max_clairaut_drift, dc);
    if (de > opt.drift_tol || dc > opt.drift_tol) {
      fail(Error::Kind::Integration, "geodesic invariants drifted beyond tolerance (step too large or profile not smooth)");
    }
    if (riccati && !(std::abs(x[4]) <= band)) fail(Error::Kind::Integration, "Riccati solution left its band along the geodesic");
    if (opt.record_every > 0 && (i + 1) % opt.record_every == 0) record(t);
  }
  run.state = {x[0], x[1], x[2], x[3]};
  run.t = t;
  run.w = x[4];
  run.w_integral = x[5];
  run.y = x[6];
  run.dy = x[7];
  return run;
}

}  // namespace entlab
