// gtib: recover Zakharov-Shabat potentials from spectral data.
//
//   gtib recover --config exp.json --out results/
//   gtib plan    --config exp.json --method WithCuts
//   gtib sweep   --config exp.json
//   gtib oracle  --config exp.json
//   gtib scatter --config exp.json
//
// Exit codes: 0 success, 2 config error, 3 numerical instability.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gtib/io.hpp"

namespace fs = std::filesystem;
using namespace gtib;

namespace {

constexpr int kConfigExit = 2;
constexpr int kInstabilityExit = 3;

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::string> method;
  std::optional<double> h;
  std::optional<double> P;
  std::optional<std::size_t> M;
  std::optional<double> zone_constant;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--method", f.method, "NoCuts, WithCuts, Extended, LeftOnly or RightOnly");
  sub->add_option("--h", f.h, "integration step h = 2 L / M");
  sub->add_option("--P", f.P, "z window of each start-point solve (0 = automatic)");
  sub->add_option("--M", f.M, "number of grid steps");
  sub->add_option("--zone-constant", f.zone_constant, "stability zone radius times eta (default 6)");
}

ExperimentConfig load(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    const fs::path p = f.config;
    c = config_from_json(read_json_file(p), p.parent_path());
  }
  if (f.method) c.method = method_from_config(*f.method);
  if (f.P) {
    if (*f.P < 0.0) throw ConfigError("--P must be non-negative");
    c.P = *f.P;
  }
  if (f.M) {
    if (*f.M < 1) throw ConfigError("--M must be positive");
    c.M = *f.M;
  }
  if (f.zone_constant) {
    if (!(*f.zone_constant > 0.0)) throw ConfigError("--zone-constant must be positive");
    c.zone_constant = *f.zone_constant;
  }
  return c;
}

TimeGrid make_grid(ExperimentConfig& c, const Flags& f, const Scenario& s) {
  const double L = interval_length(c, s);
  if (f.h) {
    if (!(*f.h > 0.0)) throw ConfigError("--h must be positive");
    const double m = 2.0 * L / *f.h;
    if (std::abs(m - std::round(m)) > 1e-9 * m) throw ConfigError("--h does not divide 2 L");
    if (f.M && *f.M != static_cast<std::size_t>(std::llround(m)))
      throw ConfigError("--h and --M disagree");
    c.M = static_cast<std::size_t>(std::llround(m));
  }
  return TimeGrid::centered(L, c.M);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write " + (dir / name).string());
  return os;
}

void write_json(const fs::path& dir, const std::string& name, const Json& j) {
  open_out(dir, name) << j.dump(2) << '\n';
}

void write_errors(const fs::path& dir, const Scenario& s, const RecoveredSignal& r, double h) {
  if (!s.exact) return;
  const ErrorReport rep = error_report(r, s.exact(r.grid), h, s.name);
  auto os = open_out(dir, "error.csv");
  write_error_csv(os, r.grid, rep.pointwise);
  Json j = to_json(rep);
  j["slope"] = nullptr;  // one resolution only
  write_json(dir, "error.json", j);
}

int cmd_recover(const Flags& f, bool plan_only) {
  ExperimentConfig c = load(f);
  const Scenario s = build_scenario(c);
  const TimeGrid g = make_grid(c, f, s);
  const CutterOptions o = cutter_options(c, g.tau);
  const CutPlan p = plan(s.data, g, o);
  write_json(f.out, "plan.json", to_json(p));
  if (plan_only) return 0;
  try {
    const RecoveredSignal r = recover(s.data, p, o);
    auto os = open_out(f.out, "signal.csv");
    write_csv(os, r);
    write_errors(f.out, s, r, 2.0 * g.tau);
  } catch (const RecoveryError& e) {
    auto os = open_out(f.out, "signal.csv");
    write_csv(os, e.partial());
    throw;
  }
  return 0;
}

int cmd_sweep(const Flags& f) {
  ExperimentConfig c = load(f);
  const Scenario s = build_scenario(c);
  if (!s.exact) throw ConfigError("sweep needs a scenario with an exact signal");
  const double L = interval_length(c, s);
  if (f.h || f.M) throw ConfigError("sweep takes its resolutions from the config's sweep.M");
  auto run = [&](std::size_t M) {
    const TimeGrid g = TimeGrid::centered(L, M);
    const CutterOptions o = cutter_options(c, g.tau);
    return std::tuple{recover(s.data, g, o), s.exact(g), 2.0 * g.tau};
  };
  const ConvergenceResult res = convergence_sweep(run, c.sweep_M);
  auto os = open_out(f.out, "sweep.csv");
  os << "M,h,rmse\n";
  for (std::size_t i = 0; i < res.reports.size(); ++i)
    os << c.sweep_M[i] << ',' << format_double(res.reports[i].h) << ','
       << format_double(res.reports[i].rmse) << '\n';
  write_json(f.out, "sweep.json", to_json(res));
  return 0;
}

int cmd_oracle(const Flags& f) {
  ExperimentConfig c = load(f);
  const Scenario s = build_scenario(c);
  if (!s.exact) throw ConfigError("scenario has no reference signal");
  const TimeGrid g = make_grid(c, f, s);
  auto os = open_out(f.out, "exact.csv");
  write_csv(os, s.exact(g));
  return 0;
}

int cmd_scatter(const Flags& f) {
  ExperimentConfig c = load(f);
  const Scenario s = build_scenario(c);
  if (!s.signal) throw ConfigError("scenario has no signal to scatter");
  const double T = c.scatter.T;
  ScatterOptions so;
  so.xi0 = -c.scatter.X;
  so.dxi = c.scatter.dxi;
  so.xi_count = static_cast<std::size_t>(std::llround(2.0 * c.scatter.X / c.scatter.dxi)) + 1;
  const SpectralPair pair = forward_scatter_pair(s.signal, -T, T, c.scatter.dt, c.scatter.dispersion, so);
  write_json(f.out, "spectral.json", to_json(pair));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GLME recovery of Zakharov-Shabat potentials"};
  app.require_subcommand(1);
  // -h would clash with --h
  app.set_help_flag("--help", "print this help message and exit");
  Flags f;
  auto* rec = app.add_subcommand("recover", "recover q(t) and write signal.csv, plan.json");
  auto* pl = app.add_subcommand("plan", "write the cut plan only");
  auto* sw = app.add_subcommand("sweep", "convergence study over sweep.M");
  auto* orc = app.add_subcommand("oracle", "write the reference signal");
  auto* sc = app.add_subcommand("scatter", "forward-scatter the reference signal");
  for (auto* s : {rec, pl, sw, orc, sc}) add_flags(s, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  try {
    if (rec->parsed()) return cmd_recover(f, false);
    if (pl->parsed()) return cmd_recover(f, true);
    if (sw->parsed()) return cmd_sweep(f);
    if (orc->parsed()) return cmd_oracle(f);
    if (sc->parsed()) return cmd_scatter(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const RecoveryError& e) {
    std::cerr << "instability: " << e.what() << " (segment " << e.segment() << ", step "
              << e.step() << ")\n";
    return kInstabilityExit;
  } catch (const Error& e) {
    std::cerr << "instability: " << e.what() << '\n';
    return kInstabilityExit;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
