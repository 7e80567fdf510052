#pragma once

// Sweep configuration shared by the CLI scenarios.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/io.hpp"
#include "json.hpp"

namespace entlab {

struct SweepConfig {
  std::string scenario;  // construct1 | construct2 | riccati-demo | verify
  int genus = 2;
  double area = 0.0;  // 0 means 4 pi (G - 1), the constant-curvature area at K = -1
  std::uint64_t seed = 1;
  std::string out = "out";
  std::size_t samples = 10;
  double horizon = 100.0;
  double dt = 1e-3;
  std::vector<double> grid;  // s-values or t-values; empty means the scenario default

  // Construction I and the Riccati demo.
  double a = 0.1;   // systole half-length parameter: f(0) = a
  double K = -1.0;  // curvature of the starting metric
  double c = 1.0;   // loop length constant
  std::string junction = "convex";
  double delta = 0.1;  // allowed gap between the normalized Manning bound and the critical value
  // Construction II.
  int refinement = 2;
  double cap_eps = 0.0;
  // verify.
  double tol_override = 0.0;  // > 0 replaces every check tolerance
  bool timing = false;

  double target_area() const { return area > 0.0 ? area : 4.0 * pi * (genus - 1); }
};

/// Grid from "x1,x2,..." or "start:stop:count" (inclusive, evenly spaced).
inline std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](std::string s) {
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
      fail(Error::Kind::Config, "bad number in grid: '" + s + "'");
    return x;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
      if (ch == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3) fail(Error::Kind::Config, "range grid must be start:stop:count");
    const double a = number(parts[0]), b = number(parts[1]), n = number(parts[2]);
    if (!(n >= 1.0) || n != std::floor(n)) fail(Error::Kind::Config, "grid count must be a positive integer");
    const auto count = static_cast<int>(n);
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    return out;
  }
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      out.push_back(number(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

inline std::vector<double> default_grid(const SweepConfig& c) {
  if (c.scenario == "construct1") return {c.a, 1e-1 * c.a, 1e-2 * c.a, 1e-3 * c.a, 1e-4 * c.a, 1e-5 * c.a};
  if (c.scenario == "construct2") return {0.0, 0.25, 0.5, 0.75, 1.0};
  if (c.scenario == "riccati-demo") return {c.a, 1e-1 * c.a, 1e-2 * c.a};
  return {};
}

/// Throws Error::Kind::Config on any invalid combination.
inline void validate(const SweepConfig& c) {
  auto bad = [](const std::string& m) { fail(Error::Kind::Config, m); };
  if (c.scenario != "construct1" && c.scenario != "construct2" && c.scenario != "riccati-demo" && c.scenario != "verify")
    bad("unknown scenario '" + c.scenario + "'");
  if (c.genus < 2) bad("genus must be at least 2");
  if (!(c.area >= 0.0) || !std::isfinite(c.area)) bad("area must be positive (or 0 for the default)");
  if (c.samples < 2) bad("samples must be at least 2");
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) bad("horizon must be positive");
  if (!(c.dt > 0.0) || !(c.dt <= c.horizon)) bad("dt must be positive and at most the horizon");
  if (!(c.a > 0.0) || !std::isfinite(c.a)) bad("a must be positive");
  if (!(c.K < 0.0) || !std::isfinite(c.K)) bad("K must be negative");
  if (!(c.c > 0.0) || !std::isfinite(c.c)) bad("c must be positive");
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) bad("delta must be positive");
  if (c.junction != "convex" && c.junction != "tangent") bad("junction must be 'convex' or 'tangent'");
  if (c.refinement < 0 || c.refinement > 5) bad("refinement must be in [0, 5]");
  if (!(c.cap_eps >= 0.0)) bad("cap-eps must be nonnegative");
  if (!(c.tol_override >= 0.0)) bad("tol-override must be nonnegative");
  if (c.out.empty()) bad("output directory must be set");
  for (double x : c.grid) {
    if (!std::isfinite(x)) bad("grid values must be finite");
    if ((c.scenario == "construct1" || c.scenario == "riccati-demo") && !(x > 0.0 && x <= c.a))
      bad("s-grid values must lie in (0, a]");
    if (c.scenario == "construct2" && !(x >= 0.0 && x <= 1.0)) bad("t-grid values must lie in [0, 1]");
  }
}

/// Canonical form: every field that can change results, with the resolved grid.
/// The output directory and the timing switch are excluded.
inline nlohmann::json canonical_json(const SweepConfig& c) {
  std::vector<std::string> grid;
  for (double x : c.grid.empty() ? default_grid(c) : c.grid) grid.push_back(format_double(x));
  return {{"scenario", c.scenario}, {"genus", c.genus},           {"area", format_double(c.target_area())},
          {"seed", c.seed},         {"samples", c.samples},       {"horizon", format_double(c.horizon)},
          {"dt", format_double(c.dt)}, {"grid", grid},            {"a", format_double(c.a)},
          {"K", format_double(c.K)}, {"c", format_double(c.c)},   {"junction", c.junction},
          {"delta", format_double(c.delta)},
          {"refinement", c.refinement}, {"cap_eps", format_double(c.cap_eps)},
          {"tol_override", format_double(c.tol_override)}};
}

inline std::string config_hash(const SweepConfig& c) { return hex64(fnv1a(canonical_json(c).dump())); }

}  // namespace entlab
