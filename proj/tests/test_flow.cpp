#include <gtest/gtest.h>

#include <cmath>

#include "entlab/io.hpp"
#include "entlab/sweep.hpp"

using namespace entlab;

namespace {

CurvatureTrack random_track(Rng& rng, double duration, int knots) {
  std::vector<double> K(knots);
  for (double& k : K) k = -rng.uniform();
  return CurvatureTrack::sampled(std::move(K), duration / (knots - 1));
}

WarpedMetric shrunk_metric() { return WarpedMetric(build_shrunk_collar(2, 0.1, Curvature(-1.0), 0.02, JunctionRule::Convex).profile); }

}  // namespace

TEST(Riccati, FixedPoint) {
  const auto r = riccati_step(CurvatureTrack::constant(-1.0, 10.0), 1.0);
  EXPECT_NEAR(r.w, 1.0, 1e-12);
  EXPECT_NEAR(r.integral, 10.0, 1e-10);
}

TEST(Riccati, FlatClosedForm) {
  const auto r = riccati_step(CurvatureTrack::flat(1.0), 1.0);
  EXPECT_DOUBLE_EQ(r.w, 0.5);
  EXPECT_NEAR(r.integral, std::log(2.0), 1e-15);
  const auto z = riccati_step(CurvatureTrack::flat(7.0), 0.0);
  EXPECT_EQ(z.w, 0.0);
  EXPECT_EQ(z.integral, 0.0);
}

TEST(Riccati, FlatAfterCurvedStretch) {
  CurvatureTrack t = CurvatureTrack::constant(-1.0, 2.0);
  t.add_flat(3.0);
  const double w1 = std::tanh(2.0);
  const auto r = riccati_step(t, 0.0);
  EXPECT_NEAR(r.w, 1.0 / (3.0 + 1.0 / w1), 1e-10);
  EXPECT_NEAR(r.integral, std::log(std::cosh(2.0)) + std::log1p(3.0 * w1), 1e-10);
}

TEST(Riccati, Tanh) {
  for (double T : {0.5, 2.0, 5.0}) {
    const auto r = riccati_step(CurvatureTrack::constant(-1.0, T), 0.0);
    EXPECT_NEAR(r.w, std::tanh(T), 1e-10);
    EXPECT_NEAR(r.integral, std::log(std::cosh(T)), 1e-10);
    CurvatureTrack g;
    g.add_function([](double) { return -1.0; }, T, -1.0);
    const auto q = riccati_step(g, 0.0);
    EXPECT_NEAR(q.w, std::tanh(T), 1e-8);
    EXPECT_NEAR(q.integral, std::log(std::cosh(T)), 1e-8);
  }
}

TEST(Riccati, ConfinementOnRandomTracks) {
  Rng rng(2024);
  for (int k = 0; k < 100000; ++k) {
    const auto track = random_track(rng, 2.0, 6);
    const double M = track.max_scale();
    const double w0 = rng.uniform(0.0, M);
    RiccatiOptions opt;
    opt.dt = 0.05;
    const auto r = riccati_step(track, w0, opt);
    ASSERT_GE(r.w_min, -1e-6) << k;
    ASSERT_LE(r.w_max, M + 1e-6) << k;
  }
}

TEST(Riccati, ExponentialAttraction) {
  for (double K : {-1.0, -4.0}) {
    const double k = std::sqrt(-K);
    for (double w0 : {0.0, 0.5 * k, 2.0 * k}) {
      for (double T : {1.0, 2.0, 4.0}) {
        const auto r = riccati_step(CurvatureTrack::constant(K, T), w0);
        EXPECT_LT(std::abs(r.w - k), 2.0 * k * std::exp(-k * T)) << K << " " << w0 << " " << T;
      }
    }
  }
}

TEST(Riccati, LeavingTheBandIsAnError) {
  EXPECT_THROW(riccati_step(CurvatureTrack::constant(-1.0, 1.0), -1.0), Error);
}

TEST(Jacobi, Exponential) {
  const auto j = jacobi_integrate(CurvatureTrack::constant(-1.0, 3.0), 1.0, 1.0);
  EXPECT_NEAR(j.y, std::exp(3.0), 1e-9 * std::exp(3.0));
  EXPECT_NEAR(j.dy, std::exp(3.0), 1e-9 * std::exp(3.0));
}

TEST(Jacobi, Linear) {
  const auto j = jacobi_integrate(CurvatureTrack::flat(4.0), 0.5, -0.25);
  EXPECT_NEAR(j.y, 0.5 - 0.25 * 4.0, 1e-12);
  EXPECT_NEAR(j.dy, -0.25, 1e-12);
}

TEST(Jacobi, LyapunovRate) {
  // y = alpha e^t + beta e^-t, so T (rate - 1) tends to log(sqrt(2) |alpha|).
  Rng rng(9);
  for (int k = 0; k < 5; ++k) {
    const double y0 = rng.uniform(0.0, 1.0), dy0 = rng.uniform(0.1, 1.0);
    const double alpha = 0.5 * (y0 + dy0);
    for (double T : {20.0, 40.0}) {
      const auto j = jacobi_integrate(CurvatureTrack::constant(-1.0, T), y0, dy0);
      const double rate = std::log(std::hypot(j.y, j.dy)) / T;
      EXPECT_NEAR(T * (rate - 1.0), std::log(std::sqrt(2.0) * std::abs(alpha)), 1e-6);
    }
    const auto j = jacobi_integrate(CurvatureTrack::constant(-1.0, 400.0), y0, dy0, 1e-2);
    EXPECT_NEAR(std::log(std::hypot(j.y, j.dy)) / 400.0, 1.0, 1e-2);
  }
}

TEST(Jacobi, RiccatiConsistency) {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const auto track = random_track(rng, 5.0, 11);
    const double w0 = rng.uniform(0.0, track.max_scale());
    std::vector<double> ws, ys, dys;
    RiccatiOptions opt;
    opt.dt = 1e-3;
    opt.observer = [&](double, double w) { ws.push_back(w); };
    riccati_step(track, w0, opt);
    jacobi_integrate(track, 1.0, w0, 1e-3, [&](double, double y, double dy) {
      ys.push_back(y);
      dys.push_back(dy);
    });
    ASSERT_EQ(ws.size(), ys.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
      if (std::abs(ys[i]) > 1e-3) EXPECT_NEAR(ws[i], dys[i] / ys[i], 1e-6);
  }
}

TEST(Gronwall, ClosedForms) {
  EXPECT_NEAR(gronwall_bound(CurvatureTrack::flat(3.0)), std::exp(1.5), 1e-12);
  EXPECT_NEAR(gronwall_bound(CurvatureTrack::constant(-1.0, 3.0)), std::exp(3.0), 1e-12);
  EXPECT_EQ(gronwall_bound(CurvatureTrack()), 1.0);
}

TEST(Gronwall, DominatesExpansion) {
  Rng rng(31);
  const auto m = shrunk_metric();
  const auto meridian = meridian_track(m.profile(), m.lo() + 0.05, m.hi() - m.lo() - 0.1);
  for (const auto& track : {CurvatureTrack::constant(-1.0, 3.0), meridian}) {
    const double bound = gronwall_bound(track);
    for (int k = 0; k < 100; ++k) {
      const double th = rng.angle();
      const auto j = jacobi_integrate(track, std::cos(th), std::sin(th));
      EXPECT_LE(std::hypot(j.y, j.dy), bound * (1.0 + 1e-9));
    }
  }
}

TEST(Geodesic, ClosedGeodesicAtCenter) {
  const auto m = shrunk_metric();
  const GeodesicState s0{0.0, 0.0, 0.0, 1.0 / m.profile()(0.0)};
  const auto run = integrate_geodesic(m, s0, 50.0, 1e-3);
  EXPECT_EQ(run.state.u, 0.0);
  EXPECT_EQ(run.state.du, 0.0);
  EXPECT_NEAR(std::remainder(run.state.v - 50.0 * s0.dv, two_pi), 0.0, 1e-9);
}

TEST(Geodesic, MeridianKeepsV) {
  const auto m = shrunk_metric();
  GeodesicOptions opt;
  opt.reflect = false;
  const auto run = integrate_geodesic(m, unit_state(m, m.lo() + 0.01, 1.0, 0.0), 0.5, 1e-3, opt);
  EXPECT_NEAR(run.state.v, 1.0, 1e-14);
  EXPECT_NEAR(run.state.u, m.lo() + 0.51, 1e-12);
}

TEST(Geodesic, ConservationOnBaseProfile) {
  const WarpedMetric m(base_profile(1.0, Curvature(-1.0), 1.0));
  const auto run = integrate_geodesic(m, unit_state(m, 0.2, 0.0, 1.1), 1000.0, 1e-3);
  EXPECT_LT(run.max_clairaut_drift, 1e-8);
  EXPECT_LT(run.max_speed_drift, 1e-8);
  EXPECT_GT(run.reflections, 0);
}

TEST(Geodesic, TimeReversal) {
  const WarpedMetric m(base_profile(1.0, Curvature(-1.0), 3.0));
  GeodesicOptions opt;
  opt.reflect = false;
  const auto s0 = unit_state(m, 0.0, 0.5, 1.2);
  const auto fwd = integrate_geodesic(m, s0, 4.0, 1e-3, opt);
  GeodesicState back = fwd.state;
  back.du = -back.du;
  back.dv = -back.dv;
  const auto rev = integrate_geodesic(m, back, 4.0, 1e-3, opt);
  EXPECT_NEAR(rev.state.u, s0.u, 1e-6);
  EXPECT_NEAR(std::remainder(rev.state.v - s0.v, two_pi), 0.0, 1e-6);
  EXPECT_NEAR(-rev.state.du, s0.du, 1e-6);
}

TEST(Geodesic, RiccatiAndJacobiAlongTrajectory) {
  const auto m = shrunk_metric();
  GeodesicOptions opt;
  opt.w0 = 0.5 * m.max_scale();
  opt.jacobi = std::array<double, 2>{1.0, *opt.w0};
  for (double T : {1.0, 5.0, 20.0}) {
    const auto run = integrate_geodesic(m, unit_state(m, 0.1, 0.0, 0.7), T, 1e-3, opt);
    EXPECT_NEAR(run.w, run.dy / run.y, 1e-6);
    EXPECT_GE(run.w, 0.0);
    EXPECT_LE(run.w, m.max_scale() + 1e-6);
  }
}

TEST(Geodesic, LargeStepAborts) {
  const WarpedMetric m(base_profile(1.0, Curvature(-25.0), 0.5));
  try {
    integrate_geodesic(m, unit_state(m, 0.0, 0.0, 0.3), 50.0, 0.2);
    FAIL() << "expected an integration error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::Integration);
  }
}

TEST(Geodesic, RejectsNonUnitStart) {
  const WarpedMetric m(base_profile(1.0, Curvature(-1.0), 1.0));
  EXPECT_THROW(integrate_geodesic(m, GeodesicState{0.0, 0.0, 2.0, 0.0}, 1.0, 1e-3), Error);
}

TEST(Geodesic, TrajectoryExport) {
  const auto m = shrunk_metric();
  GeodesicOptions opt;
  opt.w0 = m.max_scale();
  opt.record_every = 100;
  const auto run = integrate_geodesic(m, unit_state(m, 0.0, 0.0, 0.4), 2.0, 1e-3, opt);
  ASSERT_EQ(run.samples.size(), 21u);
  EXPECT_NEAR(run.samples.back().t, 2.0, 1e-12);
  const auto t = trajectory_table(run.samples);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "u", "v", "du", "dv", "K", "w"}));
  for (const auto& p : run.samples) EXPECT_NEAR(p.K, m.curvature(p.u), 1e-15);
}

TEST(Jacobi, LogExpansionSplitsIntoRiccatiTerms) {
  // log |(y, y')| grows by the integral of w plus half the change of log(1 + w^2).
  Rng rng(23);
  for (int k = 0; k < 20; ++k) {
    const auto track = random_track(rng, 4.0, 9);
    const double w0 = rng.uniform(0.0, track.max_scale());
    const auto r = riccati_step(track, w0);
    const auto j = jacobi_integrate(track, 1.0, w0);
    const double lhs = std::log(std::hypot(j.y, j.dy) / std::hypot(1.0, w0));
    const double rhs = r.integral + 0.5 * std::log((1.0 + r.w * r.w) / (1.0 + w0 * w0));
    EXPECT_NEAR(lhs, rhs, 1e-8);
  }
}
