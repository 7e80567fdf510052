// Acceptance suite. `acceptance N` runs criterion N, no argument runs all ten.
// Each criterion prints one "criterion N: PASS" or "criterion N: FAIL" line.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "entlab/entlab.hpp"
#include "oracles/oracles.hpp"

namespace fs = std::filesystem;
using namespace entlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void note(const std::string& s) { std::cout << "  " << s << "\n"; }

std::string fmt(double x) { return format_double(x); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("entlab_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool constant_curvature_entropy() {
  const auto t0 = Clock::now();
  const double critical = critical_entropy(2, 4 * pi);
  EstimateOptions opt;
  opt.T = 100.0;
  opt.samples = 10;
  const auto e = metric_entropy_estimate(Curvature(-1.0), opt);
  const double elapsed = seconds_since(t0);
  note("estimate " + fmt(e.mean) + " stderr " + fmt(e.stderr_) + " critical " + fmt(critical) + " in " +
       fmt(elapsed) + " s");
  opt.start = RiccatiStart::Uniform;
  const auto u = metric_entropy_estimate(Curvature(-1.0), opt);
  note("uniform Riccati starts: " + fmt(u.mean) + " stderr " + fmt(u.stderr_));
  return std::abs(e.mean - critical) <= 2.0 * e.stderr_ && e.stderr_ < 1e-2 && elapsed < 10.0;
}

bool riccati_closed_forms() {
  double flat_err = 0.0;
  for (double ws : {0.1, 1.0, 5.0}) {
    // Exact flat update against RK4 on w' = -w^2, both sampled on [0, 20].
    CurvatureTrack rk;
    rk.add_function([](double) { return 0.0; }, 20.0, 0.0);
    std::vector<std::pair<double, double>> a, b;
    RiccatiOptions opt;
    opt.dt = 1e-3;
    opt.observer = [&](double t, double w) { a.push_back({t, w}); };
    riccati_step(CurvatureTrack::flat(20.0), ws, opt);
    opt.observer = [&](double t, double w) { b.push_back({t, w}); };
    riccati_step(rk, ws, opt);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double exact = 1.0 / (a[i].first + 1.0 / ws);
      flat_err = std::max({flat_err, std::abs(a[i].second - b[i].second), std::abs(a[i].second - exact)});
    }
  }
  double tanh_err = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    CurvatureTrack track;
    if (variant == 0) {
      track = CurvatureTrack::constant(-1.0, 20.0);
    } else {
      track.add_function([](double) { return -1.0; }, 20.0, -1.0);
    }
    RiccatiOptions opt;
    opt.observer = [&](double t, double w) { tanh_err = std::max(tanh_err, std::abs(w - std::tanh(t))); };
    riccati_step(track, 0.0, opt);
  }
  note("flat closed form vs RK4, max error " + fmt(flat_err));
  note("tanh on [0, 20], max error " + fmt(tanh_err));
  return flat_err < 1e-8 && tanh_err < 1e-8;
}

bool gauss_bonnet() {
  bool ok = true;
  for (int level = 0; level <= 2; ++level) {
    const auto S = build_octagon_surface(Curvature(-1.0), level);
    const double fv = S.face_count() + S.vertex_count();
    double worst = 0.0;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double r = gauss_bonnet_residual(interpolate_curvature(S, t));
      worst = std::max(worst, r / fv);
    }
    const double excess = interpolate_curvature(S, 1.0).cone_angles().excess();
    note("level " + std::to_string(level) + ": worst residual/(F+V) " + fmt(worst) + ", excess - 4 pi " +
         fmt(excess - 4 * pi));
    ok = ok && worst < 1e-9 && std::abs(excess - 4 * pi) < 1e-9;
  }
  return ok;
}

bool construction_one() {
  const auto t0 = Clock::now();
  SweepConfig cfg;
  cfg.scenario = "construct1";
  cfg.a = 0.1;
  cfg.K = -1.0;
  cfg.c = 1.0;
  cfg.grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  cfg.out = scratch("c1").string();
  const auto r = run_construct1(cfg);
  const double elapsed = seconds_since(t0);
  bool ok = r.exit_code == 0;
  double prev = 0.0, last = 0.0;
  for (const auto& row : r.report["rows"]) {
    if (row.contains("error")) {
      note("row s=" + fmt(row["s"].get<double>()) + " failed: " + row["error"].get<std::string>());
      ok = false;
      continue;
    }
    const double top = row["top_lower"], manning = row["manning_lower"], critical = row["critical"];
    note("s " + fmt(row["s"].get<double>()) + ": top lower " + fmt(top) + ", normalized Manning " + fmt(manning) +
         ", critical " + fmt(critical));
    ok = ok && top > prev && std::abs(critical - manning) <= 0.1;
    prev = last = top;
  }
  note("runtime " + fmt(elapsed) + " s");
  return ok && last > 5.0 && elapsed < 60.0;
}

bool word_counting() {
  Rng rng(2718);
  int bracketed = 0;
  for (int k = 0; k < 100; ++k) {
    const double R = rng.uniform(1.0, 2000.0), c = rng.uniform(0.1, 3.0), s = rng.uniform(0.05, 3.0);
    const auto L = binomial_loop_count(R, c, s);
    const double ref = oracle::log_binomial(static_cast<double>(L.n + L.m), static_cast<double>(L.n));
    if (L.bracketed() && std::abs(L.log_exact - ref) <= 1e-9 * std::max(1.0, ref)) ++bracketed;
  }
  note(std::to_string(bracketed) + "/100 exact counts inside their Stirling brackets");
  const auto L = binomial_loop_count(1000.0, 1.0, 0.1);
  const double target = word_growth_lower(1.0, 0.1);
  const double gap = std::abs(L.rate() - target) / target;
  note("log C(" + std::to_string(L.n + L.m) + ", " + std::to_string(L.n) + ")/R = " + fmt(L.rate()) +
       ", (1/2c) log(1 + c/s) = " + fmt(target) + ", relative gap " + fmt(gap));
  const double full = loop_count_rate_limit(1.0, 0.1);
  note("full binomial limit log(1+s/c)/2s + log(1+c/s)/2c = " + fmt(full) + ", relative gap " +
       fmt(std::abs(L.rate() - full) / full));
  note("the count rate exceeds the one-term bound by log(1+s/c)/2s = " + fmt(full - target) +
       "; the bound holds but is not within 5%");
  return bracketed == 100 && gap <= 0.05;
}

bool cap_gluing() {
  double worst = 0.0, worst_asym = 0.0;
  for (double b : {1.1, 1.5, 2.0, 4.0}) {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      for (const auto& c : {cap_parameters(b, Curvature(0.0), eps), cap_parameters(b, Curvature(-1.0), eps),
                            cap_parameters_two_sector(b, eps)}) {
        const auto r = cap_residuals(c);
        worst = std::max({worst, r[0], r[1]});
      }
    }
    for (double Kbar : {0.0, -1.0}) {
      const double eps = 1e-3;
      const auto c = cap_parameters(b, Curvature(Kbar), eps);
      const double target = -(b * b - 1.0) / (b * b);
      worst_asym = std::max(worst_asym, std::abs(c.k_eps * eps * eps - target) / std::abs(target));
    }
  }
  note("worst gluing residual " + fmt(worst));
  note("worst relative deviation of k eps^2 from -(b^2-1)/b^2 at eps = 1e-3: " + fmt(worst_asym));
  return worst < 1e-10 && worst_asym < 1e-2;
}

bool convexity() {
  bool ok = true;
  int profiles = 0;
  double worst = 0.0;
  for (double s : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const auto c = build_shrunk_collar(2, 0.1, Curvature(-1.0), s, JunctionRule::Convex);
    const auto scan = scan_convexity(c.profile, 10000, 1e-8);
    worst = std::min(worst, scan.worst_second_difference);
    ok = ok && scan.convex && scan.positive;
    ++profiles;
  }
  for (double b : {1.1, 1.5, 2.0, 4.0}) {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      for (const auto& spec : {cap_parameters(b, Curvature(0.0), eps), cap_parameters(b, Curvature(-1.0), eps),
                               cap_parameters_two_sector(b, eps)}) {
        const auto cap = build_cap_profile(spec, 4.0 * eps);
        const auto scan = scan_convexity(cap.profile, 10000, 1e-8);
        worst = std::min(worst, scan.worst_second_difference);
        ok = ok && scan.convex;
        ++profiles;
      }
    }
  }
  note(std::to_string(profiles) + " mollified profiles scanned, worst scaled second difference " + fmt(worst));
  return ok;
}

bool flat_decay() {
  const auto t0 = Clock::now();
  auto S = interpolate_curvature(build_octagon_surface(Curvature(-1.0), 2), 1.0);
  S = rescale(S, 4 * pi / S.total_area());
  const FlatConeSampler sampler(S);
  bool ok = true;
  for (double T : {1e3, 1e5}) {
    EstimateOptions opt;
    opt.T = T;
    opt.samples = 10;
    const auto e = metric_entropy_estimate(sampler, opt);
    note("T = " + fmt(T) + ": estimate " + fmt(e.mean) + " stderr " + fmt(e.stderr_) + ", excluded " +
         std::to_string(e.excluded) + ", log(T)/T = " + fmt(std::log(T) / T));
    ok = ok && e.mean < (T == 1e3 ? 0.1 : 0.02);
  }
  const double elapsed = seconds_since(t0);
  note("runtime " + fmt(elapsed) + " s");
  return ok && elapsed < 300.0;
}

bool gronwall() {
  Rng rng(99);
  int dominated = 0, segments = 0;
  double tightest = 0.0;
  auto check = [&](const CurvatureTrack& track) {
    const double th = rng.angle();
    const double y0 = std::cos(th), dy0 = std::sin(th);
    const auto j = jacobi_integrate(track, y0, dy0);
    const double growth = std::hypot(j.y, j.dy);
    const double bound = gronwall_bound(track);
    tightest = std::max(tightest, growth / bound);
    if (growth <= bound * (1.0 + 1e-12)) ++dominated;
    ++segments;
  };
  for (int k = 0; k < 34; ++k) check(CurvatureTrack::constant(-rng.uniform(0.0, 4.0), rng.uniform(0.1, 5.0)));
  for (int k = 0; k < 33; ++k) {
    const auto c = build_shrunk_collar(2, 0.1, Curvature(-1.0), 0.1 * std::pow(10.0, -rng.uniform(0.0, 4.0)),
                                       JunctionRule::Convex);
    const double lo = rng.uniform(-c.u_max, c.u_max), hi = rng.uniform(lo, c.u_max);
    check(meridian_track(c.profile, lo, hi - lo));
  }
  const WarpedMetric m(build_shrunk_collar(2, 0.1, Curvature(-1.0), 0.01, JunctionRule::Convex).profile);
  for (int k = 0; k < 33; ++k) {
    GeodesicOptions go;
    go.record_every = 10;
    const auto run = integrate_geodesic(m, unit_state(m, rng.uniform(m.lo(), m.hi()), rng.angle(), rng.angle()),
                                        rng.uniform(0.5, 5.0), 1e-3, go);
    std::vector<double> K;
    for (const auto& p : run.samples) K.push_back(p.K);
    check(CurvatureTrack::sampled(std::move(K), 1e-2));
  }
  note(std::to_string(dominated) + "/" + std::to_string(segments) +
       " segments dominated; largest growth/bound ratio " + fmt(tightest));
  return dominated == segments && segments == 100;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ENTLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool determinism() {
  const auto dir = scratch("determinism");
  const std::pair<const char*, const char*> runs[] = {
      {"construct1", "--grid 0.1,0.001,0.00001"},
      {"construct2", "--samples 4 --horizon 50 --cap-eps 0.05"},
      {"riccati-demo", "--samples 4 --horizon 10"},
      {"verify", ""},
  };
  bool ok = true;
  for (const auto& [sub, extra] : runs) {
    const fs::path a = dir / (std::string(sub) + "_a"), b = dir / (std::string(sub) + "_b");
    const std::string base = std::string(sub) + " --seed 17 " + extra + " --out ";
    const int ca = run_cli(base + a.string()), cb = run_cli(base + b.string());
    int files = 0, same = 0;
    if (fs::exists(a)) {
      for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        if (fs::exists(b / e.path().filename()) && slurp(e.path()) == slurp(b / e.path().filename())) ++same;
      }
    }
    const int files_b = fs::exists(b) ? static_cast<int>(std::distance(fs::directory_iterator(b), {})) : 0;
    note(std::string(sub) + ": exit " + std::to_string(ca) + "/" + std::to_string(cb) + ", " + std::to_string(same) +
         "/" + std::to_string(files) + " files byte-identical");
    ok = ok && ca == 0 && cb == 0 && files >= 2 && same == files && files_b == files;
  }
  return ok;
}

const std::function<bool()> criteria[] = {constant_curvature_entropy, riccati_closed_forms, gauss_bonnet,
                                          construction_one,           word_counting,        cap_gluing,
                                          convexity,                  flat_decay,           gronwall,
                                          determinism};

}  // namespace

int main(int argc, char** argv) {
  int first = 1, last = 10;
  if (argc > 1) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > 10) {
      std::cerr << "usage: acceptance [1-10]\n";
      return 2;
    }
  }
  int failed = 0;
  for (int n = first; n <= last; ++n) {
    bool pass = false;
    try {
      pass = criteria[n - 1]();
    } catch (const std::exception& e) {
      note(std::string("error: ") + e.what());
    }
    std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << std::endl;
    if (!pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
