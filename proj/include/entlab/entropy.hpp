#pragma once

// Entropy quantities: the constant-curvature value, Manning's lower bound,
// Riccati-average metric entropy estimates, word-count lower bounds for the
// topological entropy, and the inequality verdicts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "entlab/core.hpp"
#include "entlab/flow.hpp"
#include "entlab/mesh.hpp"
#include "entlab/numeric.hpp"
#include "entlab/parallel.hpp"
#include "entlab/profile.hpp"
#include "entlab/random.hpp"
#include "entlab/smoothing.hpp"
#include "json.hpp"

namespace entlab {

/// (4 pi (G - 1) / V)^(1/2): both entropies of a constant-curvature metric of area V.
inline double critical_entropy(int G, double V) {
  require(G >= 2, "genus must be at least 2");
  require(V > 0.0 && std::isfinite(V), "area must be positive");
  return std::sqrt(4.0 * pi * (G - 1) / V);
}

/// Entropy of the same metric rescaled from area V_from to area V_to.
inline double normalize_entropy(double h, double V_from, double V_to) {
  require(V_from > 0.0 && V_to > 0.0, "areas must be positive");
  return h * std::sqrt(V_from / V_to);
}

struct ManningTerms {
  double outside = 0.0;       // sqrt(-K) * area outside the collar
  double collar = 0.0;        // 2 pi * integral of sqrt(-K) f over the collar
  double collar_area = 0.0;
  double total_area = 0.0;
  double bound = 0.0;         // (outside + collar) / total_area
};

/// Integral of sqrt(-K) against the normalized area measure, for a surface made
/// of a constant-curvature part and a rotationally symmetric collar.
inline ManningTerms manning_terms(Curvature K_outside, double area_outside, const Profile& collar, double u_lo,
                                  double u_hi, bool include_collar = true) {
  require(area_outside >= 0.0, "outside area must be nonnegative");
  require(u_lo < u_hi && u_lo >= collar.lo() && u_hi <= collar.hi(), "collar range must lie in the profile domain");
  ManningTerms t;
  t.outside = K_outside.scale() * area_outside;
  t.collar_area = collar_area(collar, u_lo, u_hi);
  if (include_collar) {
    double s = 0.0;
    for (const auto& p : collar.pieces()) {
      const double a = std::max(u_lo, p.lo), b = std::min(u_hi, p.hi);
      if (a >= b) continue;
      s += numeric::integrate(
          [&p](double u) {
            const Jet j = p.eval(u);
            if (j.d2f < -1e-9 * std::max(1.0, std::abs(j.f))) {
              fail(Error::Kind::InvalidArgument, "manning_bound: positive curvature in the collar");
            }
            return std::sqrt(std::max(0.0, j.d2f * j.f));
          },
          a, b, 1e-12);
    }
    t.collar = two_pi * s;
  }
  t.total_area = area_outside + t.collar_area;
  t.bound = (t.outside + t.collar) / t.total_area;
  return t;
}

inline double manning_bound(Curvature K_outside, double area_outside, const Profile& collar, double u_lo, double u_hi,
                            bool include_collar = true) {
  return manning_terms(K_outside, area_outside, collar, u_lo, u_hi, include_collar).bound;
}

/// (1 / 2c) log(1 + c / s): entropy lower bound from counting loops.
inline double word_growth_lower(double c, double s) {
  require(c > 0.0 && s > 0.0, "word growth needs c > 0 and s > 0");
  return std::log1p(c / s) / (2.0 * c);
}

/// Limit of log C(R/2s + R/2c, R/2s) / R as R grows.
inline double loop_count_rate_limit(double c, double s) {
  require(c > 0.0 && s > 0.0, "loop count needs c > 0 and s > 0");
  return std::log1p(s / c) / (2.0 * s) + std::log1p(c / s) / (2.0 * c);
}

using BigInt = boost::multiprecision::cpp_int;

/// Natural log of a positive big integer.
inline double big_log(const BigInt& x) {
  require(x > 0, "log of a nonpositive integer");
  const unsigned bits = boost::multiprecision::msb(x);
  if (bits < 60) return std::log(x.convert_to<double>());
  const unsigned shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  require(k <= n, "binomial needs k <= n");
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

struct LoopCount {
  std::uint64_t n = 0;  // floor(R / 2s)
  std::uint64_t m = 0;  // floor(R / 2c)
  BigInt exact;
  double log_exact = 0.0;
  double log_lower = 0.0;  // Stirling brackets
  double log_upper = 0.0;
  double R = 0.0;

  double rate() const { return log_exact / R; }
  bool bracketed() const { return log_lower <= log_exact && log_exact <= log_upper; }
};

namespace detail {
// log of sqrt(2 pi) n^(n+1/2) e^-n and of e n^(n+1/2) e^-n; 0! is exact.
inline double stirling_log_lower(std::uint64_t n) {
  if (n == 0) return 0.0;
  const double x = static_cast<double>(n);
  return 0.5 * std::log(two_pi) + (x + 0.5) * std::log(x) - x;
}
inline double stirling_log_upper(std::uint64_t n) {
  if (n == 0) return 0.0;
  const double x = static_cast<double>(n);
  return 1.0 + (x + 0.5) * std::log(x) - x;
}
}  // namespace detail

/// C(floor(R/2s) + floor(R/2c), floor(R/2s)) exactly, with Stirling brackets.
inline LoopCount binomial_loop_count(double R, double c, double s) {
  require(R > 0.0 && c > 0.0 && s > 0.0, "loop count needs R, c, s > 0");
  require(R / (2.0 * s) < 1e9 && R / (2.0 * c) < 1e9, "loop count arguments too large");
  LoopCount L;
  L.R = R;
  L.n = static_cast<std::uint64_t>(std::floor(R / (2.0 * s)));
  L.m = static_cast<std::uint64_t>(std::floor(R / (2.0 * c)));
  const std::uint64_t N = L.n + L.m;
  L.exact = binomial(N, L.n);
  L.log_exact = big_log(L.exact);
  L.log_lower = detail::stirling_log_lower(N) - detail::stirling_log_upper(L.n) - detail::stirling_log_upper(L.m);
  L.log_upper = detail::stirling_log_upper(N) - detail::stirling_log_lower(L.n) - detail::stirling_log_lower(L.m);
  return L;
}

// ---------------------------------------------------------------------------
// Metric entropy from Riccati averages.

enum class RiccatiStart { Upper, Uniform };

inline const char* to_string(RiccatiStart s) { return s == RiccatiStart::Upper ? "upper" : "uniform"; }

struct EstimateOptions {
  double T = 100.0;     // averaging horizon after burn-in
  double burn = 10.0;   // discarded transient
  double dt = 1e-3;
  std::size_t samples = 10;
  std::uint64_t seed = 1;
  RiccatiStart start = RiccatiStart::Upper;
  unsigned threads = 0;  // 0 = hardware concurrency
  int max_attempts = 64;  // redraws per sample after a vertex hit
};

struct EntropyEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t excluded = 0;  // redrawn samples (vertex hits)
  std::vector<double> values;
};

/// Outcome of one random geodesic: its time average, or a request to redraw.
struct SampleOutcome {
  bool excluded = false;
  double value = 0.0;
};

/// Map-reduce over independent samples; sample i, attempt a uses stream (seed, i, a).
inline EntropyEstimate estimate_from_samples(const EstimateOptions& opt,
                                             const std::function<SampleOutcome(Rng&)>& draw) {
  require(opt.samples >= 2, "need at least two samples for a standard error");
  require(opt.T > 0.0 && opt.burn >= 0.0 && opt.dt > 0.0, "invalid horizon, burn-in or step");
  std::vector<double> values(opt.samples);
  std::vector<std::size_t> excluded(opt.samples, 0);
  parallel_for(opt.samples, opt.threads, [&](std::size_t i) {
    for (int a = 0;; ++a) {
      require(a < opt.max_attempts, "too many excluded samples");
      Rng rng(opt.seed, i, static_cast<std::uint64_t>(a));
      const SampleOutcome o = draw(rng);
      if (o.excluded) {
        ++excluded[i];
        continue;
      }
      values[i] = o.value;
      break;
    }
  });
  EntropyEstimate e;
  e.samples = opt.samples;
  e.values = values;
  for (std::size_t x : excluded) e.excluded += x;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.stderr_ = std::sqrt(ss / static_cast<double>(values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
  return e;
}

inline double riccati_start(RiccatiStart rule, double M, Rng& rng) {
  return rule == RiccatiStart::Upper ? M : rng.uniform() * M;
}

/// Time average of w over [burn, burn + T] along a track of that length.
inline double riccati_average(const CurvatureTrack& track, double w0, const EstimateOptions& opt) {
  RiccatiOptions ro;
  ro.dt = opt.dt;
  const auto head = riccati_step(track.slice(0.0, opt.burn), w0, ro);
  const auto tail = riccati_step(track.slice(opt.burn, opt.burn + opt.T), head.w, ro);
  return tail.integral / tail.elapsed;
}

/// Constant curvature K: every geodesic sees the same track.
inline EntropyEstimate metric_entropy_estimate(Curvature K, const EstimateOptions& opt = {}) {
  const auto track = CurvatureTrack::constant(K.value(), opt.burn + opt.T);
  const double M = K.scale();
  return estimate_from_samples(opt, [&](Rng& rng) {
    return SampleOutcome{false, riccati_average(track, riccati_start(opt.start, M, rng), opt)};
  });
}

/// Geodesics of a warped metric started uniformly in v, in u on [u_lo, u_hi], and in direction.
inline EntropyEstimate metric_entropy_estimate(const WarpedMetric& m, const EstimateOptions& opt, double u_lo,
                                               double u_hi) {
  require(u_lo <= u_hi && u_lo >= m.lo() && u_hi <= m.hi(), "start patch must lie in the profile domain");
  const double M = m.max_scale();
  return estimate_from_samples(opt, [&](Rng& rng) {
    const double u = rng.uniform(u_lo, u_hi);
    const double v = rng.angle();
    const double th = rng.angle();
    const double w0 = riccati_start(opt.start, M, rng);
    GeodesicOptions go;
    go.w0 = w0;
    go.riccati_bound = M;
    const auto head = integrate_geodesic(m, unit_state(m, u, v, th), opt.burn, opt.dt, go);
    go.w0 = std::min(std::max(head.w, 0.0), M);
    const auto tail = integrate_geodesic(m, head.state, opt.T, opt.dt, go);
    return SampleOutcome{false, tail.w_integral / tail.elapsed};
  });
}

inline EntropyEstimate metric_entropy_estimate(const WarpedMetric& m, const EstimateOptions& opt = {}) {
  return metric_entropy_estimate(m, opt, m.lo(), m.hi());
}

struct FlatConeOptions {
  double cap_eps = 0.0;   // cone-point cap radius; 0 keeps the cone points singular
  int table_points = 2049;
  double w0_scale = 1.0;  // Riccati starts are drawn from [0, max(w0_scale, cap sqrt(-K))]
};

/// Curvature seen by straight lines on a flat cone surface. With cap_eps > 0
/// the cone points are replaced by negatively curved caps of radius eps
/// (support eps + eps/4); otherwise every trace is flat.
class FlatConeSampler {
 public:
  FlatConeSampler(TriangulatedSurface S, FlatConeOptions opt = {}, unsigned threads = 0)
      : S_(std::move(S)), opt_(opt) {
    require(S_.flat(), "flat cone sampler needs a flat surface");
    require(opt.cap_eps >= 0.0 && opt.table_points >= 3 && opt.w0_scale >= 0.0, "invalid flat cone options");
    tables_.resize(S_.vertex_count());
    kmin_.assign(S_.vertex_count(), 0.0);
    max_scale_ = opt.w0_scale;
    if (opt.cap_eps == 0.0) return;
    const auto cones = S_.cone_angles();
    radius_ = 1.25 * opt.cap_eps;
    parallel_for(tables_.size(), threads, [&](std::size_t v) { build_table(v, cones.angles[v] / two_pi); });
    for (double k : kmin_) max_scale_ = std::max(max_scale_, std::sqrt(-k));
  }

  const TriangulatedSurface& surface() const { return S_; }
  double max_scale() const { return max_scale_; }
  double cap_support() const { return radius_; }
  bool capped() const { return radius_ > 0.0; }

  /// Curvature along the trace: flat except for chords through cap discs.
  CurvatureTrack track(const GeodesicTrace& tr) const {
    CurvatureTrack out;
    const double step = opt_.cap_eps / 20.0;
    for (const auto& s : tr.segments) {
      const auto P = face_layout(S_, s.face);
      const auto corners = S_.face_vertices(s.face);
      const Vec2 d = s.exit - s.entry;
      const double L = s.length;
      struct Chord {
        double a, b, t0, dist;
        int v;
      };
      std::vector<Chord> chords;
      if (L > 0.0) {
        const Vec2 u = d * (1.0 / d.norm());
        for (int i = 0; i < 3; ++i) {
          const int v = corners[i];
          if (!tables_[v]) continue;
          const double t0 = (P[i] - s.entry).dot(u);
          const double perp2 = std::max(0.0, (P[i] - s.entry).dot(P[i] - s.entry) - t0 * t0);
          if (perp2 >= radius_ * radius_) continue;
          const double w = std::sqrt(radius_ * radius_ - perp2);
          const double a = std::max(0.0, t0 - w), b = std::min(L, t0 + w);
          if (b > a) chords.push_back({a, b, t0, std::sqrt(perp2), v});
        }
      }
      std::sort(chords.begin(), chords.end(), [](const Chord& x, const Chord& y) { return x.a < y.a; });
      double pos = 0.0;
      for (const auto& c : chords) {
        const double a = std::max(c.a, pos);
        if (c.b <= a) continue;
        out.add_flat(a - pos);
        auto table = tables_[c.v];
        const double t0 = c.t0 - a, dist = c.dist, R = radius_;
        out.add_function(
            [table, t0, dist, R](double tau) {
              const double x = tau - t0;
              return table->at(std::min(R, std::sqrt(dist * dist + x * x)));
            },
            c.b - a, kmin_[c.v], step);
        pos = c.b;
      }
      out.add_flat(L - pos);
    }
    return out;
  }

 private:
  struct Table {
    double h = 0.0;
    std::vector<double> K;
    double at(double rho) const {
      const double x = rho / h;
      const auto last = static_cast<double>(K.size() - 1);
      if (x >= last) return K.back();
      const auto i = static_cast<std::size_t>(x);
      const double r = x - static_cast<double>(i);
      return K[i] + r * (K[i + 1] - K[i]);
    }
  };

  void build_table(std::size_t v, double b) {
    if (b <= 1.0 + 1e-12) return;  // smooth point, no cap
    const double eps = opt_.cap_eps;
    const CapSpec spec = cap_parameters(b, Curvature(0.0), eps);
    const CapProfile cap = build_cap_profile(spec, conic_profile(b, Curvature(0.0), 3.0 * eps));
    auto t = std::make_shared<Table>();
    const int n = opt_.table_points;
    t->h = radius_ / (n - 1);
    t->K.resize(n);
    double kmin = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rho = t->h * i;
      double K;
      if (i == 0) {
        K = spec.k_eps;
      } else {
        const double r = rho >= eps ? rho - eps + spec.r0 : rho * spec.r0 / eps;
        const Jet j = cap.profile.jet(r);
        K = std::min(0.0, -j.d2f / j.f);
      }
      t->K[i] = K;
      kmin = std::min(kmin, K);
    }
    t->K.back() = 0.0;
    kmin_[v] = kmin;
    tables_[v] = std::move(t);
  }

  TriangulatedSurface S_;
  FlatConeOptions opt_;
  double radius_ = 0.0;
  double max_scale_ = 0.0;
  std::vector<std::shared_ptr<const Table>> tables_;
  std::vector<double> kmin_;
};

/// Straight lines on a flat cone surface, with cone points smoothed into caps.
/// Traces that hit a vertex are redrawn and counted as excluded.
inline EntropyEstimate metric_entropy_estimate(const FlatConeSampler& sampler, const EstimateOptions& opt = {}) {
  const double M = sampler.max_scale();
  const auto& S = sampler.surface();
  return estimate_from_samples(opt, [&](Rng& rng) {
    const FacePoint start = sample_flat_start(S, rng);
    const double w0 = riccati_start(opt.start, M, rng);
    const GeodesicTrace tr = trace_geodesic(S, start, opt.burn + opt.T);
    if (tr.hit_vertex) return SampleOutcome{true, 0.0};
    return SampleOutcome{false, riccati_average(sampler.track(tr), w0, opt)};
  });
}

// ---------------------------------------------------------------------------
// Reports and verdicts.

struct Verdict {
  bool consistent = true;
  bool metric_below_critical = false;   // h_metric <= critical + 3 stderr
  bool metric_strictly_below = false;   // h_metric + 3 stderr < critical
  bool top_above_critical = false;      // top lower bound >= critical - tol
  bool top_strictly_above = false;      // top lower bound > critical + tol
  bool constant_equality = false;       // all three agree (constant curvature)
  std::string verdict;
};

struct EntropyReport {
  int genus = 2;
  double area = 0.0;
  double critical = 0.0;
  double manning_lower = 0.0;
  double metric_est = 0.0;
  double metric_stderr = 0.0;
  std::size_t metric_samples = 0;
  double top_lower = 0.0;
  Verdict flags;
};

inline Verdict verify_inequalities(const EntropyReport& r, bool constant_curvature, double tol = 1e-2) {
  require(r.critical > 0.0 && r.metric_samples >= 2, "report is not fully populated");
  Verdict v;
  const double se3 = 3.0 * r.metric_stderr;
  const double slack = 1e-9 * std::max(1.0, r.critical);
  v.metric_below_critical = r.metric_est <= r.critical + se3 + slack;
  v.metric_strictly_below = r.metric_est + se3 < r.critical - slack;
  v.top_above_critical = r.top_lower >= r.critical - tol * r.critical;
  v.top_strictly_above = r.top_lower > r.critical + tol * r.critical;
  if (r.manning_lower > r.metric_est + se3 + slack) v.consistent = false;
  if (constant_curvature) {
    const double band = std::max(tol * r.critical, se3);
    v.constant_equality = std::abs(r.metric_est - r.critical) <= band && std::abs(r.top_lower - r.critical) <= band &&
                          std::abs(r.manning_lower - r.critical) <= band;
  }
  if (!v.consistent) {
    v.verdict = "numerically inconsistent";
  } else if (constant_curvature) {
    v.verdict = v.constant_equality ? "equality" : "equality violated";
  } else if (v.metric_strictly_below && v.top_strictly_above) {
    v.verdict = "strict";
  } else if (v.metric_below_critical && v.top_above_critical) {
    v.verdict = "consistent";
  } else {
    v.verdict = "violated";
  }
  return v;
}

inline nlohmann::json to_json(const Verdict& v) {
  return {{"consistent", v.consistent},
          {"metric_below_critical", v.metric_below_critical},
          {"metric_strictly_below", v.metric_strictly_below},
          {"top_above_critical", v.top_above_critical},
          {"top_strictly_above", v.top_strictly_above},
          {"constant_equality", v.constant_equality},
          {"verdict", v.verdict}};
}

inline nlohmann::json to_json(const EntropyReport& r) {
  return {{"genus", r.genus},
          {"area", r.area},
          {"critical", r.critical},
          {"manning_lower", r.manning_lower},
          {"metric_entropy_est", r.metric_est},
          {"metric_entropy_stderr", r.metric_stderr},
          {"metric_samples", r.metric_samples},
          {"top_entropy_lower", r.top_lower},
          {"flags", to_json(r.flags)}};
}

}  // namespace entlab
