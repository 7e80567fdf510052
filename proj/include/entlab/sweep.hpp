#pragma once

// Scenario runners behind the CLI: Construction I and II sweeps and the
// Riccati demo. Each writes sweep.csv and report.json into cfg.out.

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "entlab/config.hpp"
#include "entlab/entropy.hpp"
#include "entlab/flow.hpp"
#include "entlab/io.hpp"
#include "entlab/mesh.hpp"
#include "entlab/parallel.hpp"
#include "entlab/profile.hpp"
#include "entlab/smoothing.hpp"
#include "json.hpp"

namespace entlab {

struct RunResult {
  int exit_code = 0;
  nlohmann::json report;
};

/// Collar half-width from the collar lemma: sinh(k w) sinh(k l / 2) = 1 for a
/// closed geodesic of length l = 2 pi a in curvature K = -k^2.
inline double collar_half_width(double a, Curvature K) {
  const double k = K.scale();
  return std::asinh(1.0 / std::sinh(pi * a * k)) / k;
}

/// A shrunk and mollified collar placed in a closed constant-curvature surface.
struct ShrunkCollar {
  CollarSpec spec;
  Profile rough;
  Profile profile;
  double u_max = 0.0;
  double delta = 0.0;          // mollification radius at each junction
  double base_area = 0.0;      // 4 pi (G - 1) / -K
  double outside_area = 0.0;   // base area minus the constant-curvature collar
  double collar_area = 0.0;    // area of the shrunk collar
  double total_area = 0.0;     // V_s
};

inline ShrunkCollar build_shrunk_collar(int genus, double a, Curvature K, double s, JunctionRule rule,
                                        const MollifyOptions& opt = {}) {
  ShrunkCollar c;
  c.spec = collar_spec(a, K, s, rule);
  c.u_max = collar_half_width(a, K);
  if (!(c.u_max > c.spec.junction))
    fail(Error::Kind::InvalidArgument, "collar is narrower than the junction abscissa; use a smaller a");
  c.delta = 0.4 * (c.u_max - c.spec.junction);
  c.rough = quartic_shrink(c.spec, c.u_max);
  c.profile = mollify_convex(mollify_convex(c.rough, c.spec.junction, c.delta, opt), -c.spec.junction, c.delta, opt);
  c.base_area = 4.0 * pi * (genus - 1) / -K.value();
  c.outside_area = c.base_area - cosh_collar_area(a, K, c.u_max);
  c.collar_area = entlab::collar_area(c.profile, -c.u_max, c.u_max);
  c.total_area = c.outside_area + c.collar_area;
  return c;
}

inline JunctionRule junction_rule(const std::string& name) {
  return name == "tangent" ? JunctionRule::TangentPoint : JunctionRule::Convex;
}

namespace detail {

inline Stamp stamp_for(const SweepConfig& cfg) { return Stamp{"entlab", cfg.scenario, config_hash(cfg), cfg.seed}; }

inline nlohmann::json report_header(const SweepConfig& cfg) {
  return {{"tool", "entlab"},
          {"scenario", cfg.scenario},
          {"config_hash", config_hash(cfg)},
          {"seed", cfg.seed},
          {"config", canonical_json(cfg)}};
}

inline std::vector<double> grid_of(const SweepConfig& cfg) { return cfg.grid.empty() ? default_grid(cfg) : cfg.grid; }

inline std::string error_text(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->kind())) + ": " + e.what();
  return e.what();
}

inline void write_outputs(const SweepConfig& cfg, const Table& table, const nlohmann::json& report) {
  ensure_dir(cfg.out);
  write_text(std::filesystem::path(cfg.out) / "sweep.csv", to_csv(table, stamp_for(cfg)));
  write_text(std::filesystem::path(cfg.out) / "report.json", report.dump(2) + "\n");
}

inline void write_json(const SweepConfig& cfg, const std::string& name, nlohmann::json j) {
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  write_text(std::filesystem::path(cfg.out) / name, j.dump(2) + "\n");
}

inline void write_table(const SweepConfig& cfg, const std::string& name, const Table& t) {
  write_text(std::filesystem::path(cfg.out) / name, to_csv(t, stamp_for(cfg)));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Construction I: shrink the systole.

inline RunResult run_construct1(const SweepConfig& cfg) {
  validate(cfg);
  const auto grid = detail::grid_of(cfg);
  const Curvature K(cfg.K);
  const double V = cfg.target_area();
  const double critical = critical_entropy(cfg.genus, V);
  const JunctionRule rule = junction_rule(cfg.junction);

  Table table{{"s", "status", "junction", "A", "B", "convexity_worst", "convex", "collar_area", "total_area",
               "manning_raw", "manning_normalized", "critical", "manning_gap", "systole_length", "c_normalized",
               "h_top_lower", "h_metric_lower", "h_metric_upper", "top_above_critical", "manning_within_delta",
               "error"},
              {}};
  struct Row {
    std::vector<Cell> cells;
    std::optional<Table> profile;
    nlohmann::json report;
    bool ok = false;
    double top = 0.0;
  };
  std::vector<Row> rows(grid.size());
  ensure_dir(cfg.out);
  parallel_for(grid.size(), default_threads(), [&](std::size_t i) {
    const double s = grid[i];
    Row& r = rows[i];
    try {
      const auto c = build_shrunk_collar(cfg.genus, cfg.a, K, s, rule);
      const auto scan = scan_convexity(c.profile, 10000);
      const auto mt = manning_terms(K, c.outside_area, c.profile, -c.u_max, c.u_max);
      const double manning = normalize_entropy(mt.bound, c.total_area, V);
      const double stretch = std::sqrt(V / c.total_area);
      const double systole = s * stretch, cn = cfg.c * stretch;
      const double top = word_growth_lower(cn, systole);
      const bool within = std::abs(critical - manning) <= cfg.delta;
      r.cells = {s, std::string("ok"), c.spec.junction, c.spec.A, c.spec.B, scan.worst_second_difference, scan.convex,
                 c.collar_area, c.total_area, mt.bound, manning, critical, critical - manning, systole, cn, top, manning,
                 critical, top >= critical, within, std::string()};
      r.profile = profile_table(c.profile, -c.u_max, c.u_max, 1001);
      r.report = {{"s", s},
                  {"genus", cfg.genus},
                  {"area", V},
                  {"critical", critical},
                  {"manning_lower", manning},
                  {"top_lower", top},
                  {"convex", scan.convex},
                  {"manning_within_delta", within}};
      r.ok = scan.convex;
      r.top = top;
    } catch (const std::exception& e) {
      r.cells = {s,  std::string("error"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
                 critical, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, detail::error_text(e)};
      r.report = {{"s", s}, {"error", detail::error_text(e)}};
    }
  });

  nlohmann::json report = detail::report_header(cfg);
  report["rows"] = nlohmann::json::array();
  bool all_ok = true, monotone = true, all_within = true;
  std::optional<std::pair<double, double>> prev;  // (s, top) of the previous successful row
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.add(rows[i].cells);
    report["rows"].push_back(rows[i].report);
    if (rows[i].profile) detail::write_table(cfg, "profile_" + std::to_string(i) + ".csv", *rows[i].profile);
    all_ok = all_ok && rows[i].ok;
    if (!rows[i].ok) continue;
    all_within = all_within && rows[i].report["manning_within_delta"].get<bool>();
    if (prev) {
      const bool smaller = grid[i] < prev->first;
      if (smaller ? rows[i].top < prev->second : rows[i].top > prev->second) monotone = false;
    }
    prev = {grid[i], rows[i].top};
  }
  report["checks"] = {{"rows_ok", all_ok}, {"top_monotone_in_s", monotone}, {"manning_within_delta", all_within}};
  report["delta"] = cfg.delta;
  detail::write_outputs(cfg, table, report);
  return {all_ok && monotone ? 0 : 1, report};
}

// ---------------------------------------------------------------------------
// Construction II: interpolate the octagon surface towards a flat cone metric.

inline RunResult run_construct2(const SweepConfig& cfg) {
  validate(cfg);
  const auto grid = detail::grid_of(cfg);
  const double V = cfg.target_area();
  const double critical = critical_entropy(cfg.genus, V);
  if (cfg.genus != 2) fail(Error::Kind::Config, "construct2 builds the genus-2 octagon surface; use --genus 2");
  const auto base = build_octagon_surface(Curvature(cfg.K), cfg.refinement);
  const double base_area = base.total_area();
  const int FV = base.face_count() + base.vertex_count();

  std::vector<std::string> cols{"t", "faces", "vertices", "residual", "residual_bound", "excess", "min_cone_angle",
                                "max_cone_angle", "area", "area_ratio", "h_metric_est", "stderr", "samples",
                                "excluded", "h_top_lower", "critical", "verdict"};
  if (cfg.cap_eps > 0.0) {
    cols.insert(cols.end(), {"h_metric_capped", "stderr_capped", "excluded_capped"});
  }
  Table table{cols, {}};
  Table cones{{"t", "vertex", "angle", "excess"}, {}};
  nlohmann::json report = detail::report_header(cfg);
  report["rows"] = nlohmann::json::array();
  bool ok = true;

  ensure_dir(cfg.out);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const auto S = interpolate_curvature(base, t);
    const double residual = gauss_bonnet_residual(S);
    const auto cone = S.cone_angles();
    double amin = cone.angles.front(), amax = cone.angles.front();
    for (std::size_t v = 0; v < cone.angles.size(); ++v) {
      amin = std::min(amin, cone.angles[v]);
      amax = std::max(amax, cone.angles[v]);
      cones.add({t, static_cast<std::int64_t>(v), cone.angles[v], cone.angles[v] - two_pi});
    }
    const double area = S.total_area();
    const bool gb_ok = residual < 1e-9 * FV;
    ok = ok && gb_ok;
    nlohmann::json row = {{"t", t},
                          {"gauss_bonnet_residual", residual},
                          {"gauss_bonnet_ok", gb_ok},
                          {"excess", cone.excess()},
                          {"area_ratio", area / base_area}};
    std::vector<Cell> cells{t,          static_cast<std::int64_t>(S.face_count()),
                            static_cast<std::int64_t>(S.vertex_count()), residual, 1e-9 * FV, cone.excess(), amin, amax,
                            area,       area / base_area};
    detail::write_json(cfg, "surface_" + std::to_string(i) + ".json", S.to_json());

    if (S.flat()) {
      const auto flat = rescale(S, V / area);
      EstimateOptions eo;
      eo.T = cfg.horizon;
      eo.dt = cfg.dt;
      eo.samples = cfg.samples;
      eo.seed = cfg.seed;
      const auto est = metric_entropy_estimate(FlatConeSampler(flat), eo);
      EntropyReport er;
      er.genus = cfg.genus;
      er.area = V;
      er.critical = critical;
      er.manning_lower = 0.0;
      er.metric_est = est.mean;
      er.metric_stderr = est.stderr_;
      er.metric_samples = est.samples;
      er.top_lower = critical;
      er.flags = verify_inequalities(er, false);
      ok = ok && er.flags.consistent && er.flags.metric_below_critical;
      cells.insert(cells.end(), {est.mean, est.stderr_, static_cast<std::int64_t>(est.samples),
                                 static_cast<std::int64_t>(est.excluded), critical, critical, er.flags.verdict});
      row["entropy"] = to_json(er);
      row["entropy"]["excluded"] = est.excluded;
      row["entropy"]["top_entropy_lower_source"] = "area bound for any metric of area V";

      if (cfg.cap_eps > 0.0) {
        FlatConeOptions co;
        co.cap_eps = cfg.cap_eps;
        const auto capped = metric_entropy_estimate(FlatConeSampler(flat, co), eo);
        cells.insert(cells.end(), {capped.mean, capped.stderr_, static_cast<std::int64_t>(capped.excluded)});
        row["entropy"]["capped"] = {{"cap_eps", cfg.cap_eps},
                                    {"metric_entropy_est", capped.mean},
                                    {"metric_entropy_stderr", capped.stderr_},
                                    {"excluded", capped.excluded}};
      }

      // First 20 length units of sample 0's trace.
      Rng rng(cfg.seed, 0, 0);
      const FacePoint start = sample_flat_start(flat, rng);
      const auto tr = trace_geodesic(flat, start, std::min(20.0, eo.burn + eo.T));
      detail::write_table(cfg, "trace_" + std::to_string(i) + ".csv", trace_table(tr));
    } else {
      cells.insert(cells.end(), {Cell{}, Cell{}, Cell{}, Cell{}, critical, critical, std::string()});
      if (cfg.cap_eps > 0.0) cells.insert(cells.end(), {Cell{}, Cell{}, Cell{}});
    }
    table.add(std::move(cells));
    report["rows"].push_back(row);
  }
  detail::write_table(cfg, "cones.csv", cones);
  report["checks"] = {{"all_ok", ok}};
  detail::write_outputs(cfg, table, report);
  return {ok ? 0 : 1, report};
}

// ---------------------------------------------------------------------------
// Riccati demo: metric-entropy estimates on the shrunk collar itself.

inline RunResult run_riccati_demo(const SweepConfig& cfg) {
  validate(cfg);
  const auto grid = detail::grid_of(cfg);
  const Curvature K(cfg.K);
  const JunctionRule rule = junction_rule(cfg.junction);
  Table table{{"s", "status", "h_metric_est", "stderr", "samples", "max_sqrt_neg_K", "collar_mean_sqrt_neg_K",
               "trajectory_speed_drift", "trajectory_clairaut_drift", "reflections", "error"},
              {}};
  nlohmann::json report = detail::report_header(cfg);
  report["rows"] = nlohmann::json::array();
  bool ok = true;
  ensure_dir(cfg.out);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    try {
      const auto c = build_shrunk_collar(cfg.genus, cfg.a, K, s, rule);
      const WarpedMetric m(c.profile);
      EstimateOptions eo;
      eo.T = cfg.horizon;
      eo.dt = cfg.dt;
      eo.samples = cfg.samples;
      eo.seed = cfg.seed;
      const auto est = metric_entropy_estimate(m, eo);
      const auto mt = manning_terms(K, 0.0, c.profile, -c.u_max, c.u_max);

      Rng rng(cfg.seed, 0, 0);
      const double u0 = rng.uniform(m.lo(), m.hi()), v0 = rng.angle(), th = rng.angle();
      GeodesicOptions go;
      go.w0 = m.max_scale();
      go.riccati_bound = m.max_scale();
      const long steps = numeric::step_count(cfg.horizon, cfg.dt);
      go.record_every = static_cast<int>(std::max(1L, (steps + 1999) / 2000));
      const auto run = integrate_geodesic(m, unit_state(m, u0, v0, th), cfg.horizon, cfg.dt, go);
      detail::write_table(cfg, "trajectory_" + std::to_string(i) + ".csv", trajectory_table(run.samples));
      detail::write_table(cfg, "profile_" + std::to_string(i) + ".csv",
                          profile_table(c.profile, -c.u_max, c.u_max, 1001));

      table.add({s, std::string("ok"), est.mean, est.stderr_, static_cast<std::int64_t>(est.samples), m.max_scale(),
                 mt.bound, run.max_speed_drift, run.max_clairaut_drift, static_cast<std::int64_t>(run.reflections),
                 std::string()});
      report["rows"].push_back({{"s", s},
                                {"metric_entropy_est", est.mean},
                                {"metric_entropy_stderr", est.stderr_},
                                {"samples", est.samples},
                                {"collar_mean_sqrt_neg_K", mt.bound}});
    } catch (const std::exception& e) {
      ok = false;
      table.add({s, std::string("error"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
                 detail::error_text(e)});
      report["rows"].push_back({{"s", s}, {"error", detail::error_text(e)}});
    }
  }
  report["checks"] = {{"rows_ok", ok}};
  detail::write_outputs(cfg, table, report);
  return {ok ? 0 : 1, report};
}

}  // namespace entlab
