#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "entlab/entlab.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  entlab::SweepConfig cfg;
  std::string grid;

  CLI::App app{"entlab: entropy-flexibility experiments on genus-G surfaces"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  app.add_option("--genus", cfg.genus, "Surface genus G (>= 2)")->capture_default_str();
  app.add_option("--area", cfg.area, "Target total area V; 0 means 4 pi (G - 1)")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Geodesic samples per estimate")->capture_default_str();
  app.add_option("--horizon", cfg.horizon, "Averaging horizon T")->capture_default_str();
  app.add_option("--dt", cfg.dt, "Integration step")->capture_default_str();
  app.add_option("--grid", grid, "Parameter grid: x1,x2,... or start:stop:count");
  app.add_option("--a", cfg.a, "Collar parameter a: f(0) of the unshrunk collar")->capture_default_str();
  app.add_option("--K", cfg.K, "Curvature of the starting metric (< 0)")->capture_default_str();
  app.add_option("--c", cfg.c, "Loop length constant c")->capture_default_str();
  app.add_option("--junction", cfg.junction, "Quartic junction: convex or tangent")->capture_default_str();
  app.add_option("--delta", cfg.delta, "Allowed Manning-bound gap to the critical value")->capture_default_str();
  app.add_option("--refinement", cfg.refinement, "Octagon subdivision level")->capture_default_str();
  app.add_option("--cap-eps", cfg.cap_eps, "Cone-point cap radius for an extra capped estimate (0 = off)")
      ->capture_default_str();
  app.add_option("--tol-override", cfg.tol_override, "verify: replace every check tolerance")->capture_default_str();
  app.add_flag("--timing", cfg.timing, "verify: record per-check wall time (output is then not reproducible)");

  for (const char* name : {"construct1", "construct2", "riccati-demo", "verify"}) {
    std::string help = std::string(name) == "construct1"   ? "Shrink the systole: s-sweep of entropy bounds"
                       : std::string(name) == "construct2" ? "Octagon surface towards a flat cone metric: t-sweep"
                       : std::string(name) == "riccati-demo" ? "Riccati metric-entropy estimates on the shrunk collar"
                                                             : "Run the invariant suite";
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  cfg.scenario = app.get_subcommands().front()->get_name();
  try {
    if (!grid.empty()) cfg.grid = entlab::parse_grid(grid);
    entlab::RunResult r;
    if (cfg.scenario == "construct1") {
      r = entlab::run_construct1(cfg);
    } else if (cfg.scenario == "construct2") {
      r = entlab::run_construct2(cfg);
    } else if (cfg.scenario == "riccati-demo") {
      r = entlab::run_riccati_demo(cfg);
    } else {
      r = entlab::run_verify(cfg);
    }
    std::cout << cfg.scenario << ": wrote " << cfg.out << "/sweep.csv and " << cfg.out << "/report.json"
              << " (config_hash=" << r.report["config_hash"].get<std::string>() << ", seed=" << cfg.seed << ")\n";
    if (r.report.contains("failures")) {
      for (const auto& f : r.report["failures"]) std::cout << "FAIL " << f.get<std::string>() << "\n";
      std::cout << r.report["passed"].get<std::size_t>() << " passed, " << r.report["failed"].get<std::size_t>()
                << " failed\n";
    }
    return r.exit_code == 0 ? kOk : kCheckFailure;
  } catch (const entlab::Error& e) {
    std::cerr << "entlab: " << entlab::to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == entlab::Error::Kind::Config ? kConfigError : kCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "entlab: " << e.what() << "\n";
    return kCheckFailure;
  }
}
