#pragma once

// JSON forms of spectral data, cut plans, error summaries and experiment
// configs.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtib/cutter.hpp"
#include "gtib/metrics.hpp"
#include "gtib/scenarios.hpp"

namespace gtib {

using Json = nlohmann::json;

/// Malformed or inconsistent input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(what + " must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

inline const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing '") + key + "'");
  return j[key];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spectral data

/// {"side", "discrete": [{"zeta", "norming"}], "continuous": {...} | null}.
/// "sign_mode" is written too; readers treat it as optional.
inline Json to_json(const SpectralData& d) {
  Json j;
  j["side"] = to_string(d.side);
  j["sign_mode"] = to_string(d.sign_mode);
  j["discrete"] = Json::array();
  for (const auto& e : d.discrete)
    j["discrete"].push_back({{"zeta", detail::complex_json(e.zeta)},
                             {"norming", detail::complex_json(e.norming)}});
  if (d.continuous && !d.continuous->values.empty()) {
    Json c;
    c["xi0"] = d.continuous->xi0;
    c["dxi"] = d.continuous->dxi;
    c["values"] = Json::array();
    for (const auto& v : d.continuous->values) c["values"].push_back(detail::complex_json(v));
    j["continuous"] = std::move(c);
  } else {
    j["continuous"] = nullptr;
  }
  return j;
}

inline SpectralData spectral_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("spectral data must be a JSON object");
  SpectralData d;
  const std::string side = detail::member(j, "side").get<std::string>();
  if (side == "left") d.side = Side::Left;
  else if (side == "right") d.side = Side::Right;
  else throw ConfigError("side must be \"left\" or \"right\"");

  if (j.contains("discrete")) {
    if (!j["discrete"].is_array()) throw ConfigError("'discrete' must be an array");
    for (const auto& e : j["discrete"])
      d.discrete.push_back({detail::complex_from(detail::member(e, "zeta"), "zeta"),
                            detail::complex_from(detail::member(e, "norming"), "norming")});
  }
  if (j.contains("continuous") && !j["continuous"].is_null()) {
    const Json& c = j["continuous"];
    ContinuousSpectrum cs;
    cs.xi0 = detail::member(c, "xi0").get<double>();
    cs.dxi = detail::member(c, "dxi").get<double>();
    const Json& v = detail::member(c, "values");
    if (!v.is_array()) throw ConfigError("'values' must be an array");
    for (const auto& x : v) cs.values.push_back(detail::complex_from(x, "continuous value"));
    d.continuous = std::move(cs);
  }
  d.sign_mode = default_sign_mode(d.discrete);
  if (j.contains("sign_mode")) {
    const std::string m = j["sign_mode"].get<std::string>();
    if (m == "with_discrete") d.sign_mode = SignMode::WithDiscrete;
    else if (m == "continuous_only") d.sign_mode = SignMode::ContinuousOnly;
    else throw ConfigError("unknown sign_mode '" + m + "'");
  }
  try {
    validate(d);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return d;
}

/// {"left": ..., "right": ...}; either may be absent.
inline Json to_json(const SpectralPair& p) {
  Json j = Json::object();
  if (p.left) j["left"] = to_json(*p.left);
  if (p.right) j["right"] = to_json(*p.right);
  return j;
}

/// Accepts a single-side document or a {"left", "right"} pair.
inline SpectralPair spectral_pair_from_json(const Json& j) {
  SpectralPair p;
  if (j.is_object() && j.contains("side")) {
    SpectralData d = spectral_from_json(j);
    (d.side == Side::Left ? p.left : p.right) = std::move(d);
    return p;
  }
  if (j.is_object() && j.contains("left")) p.left = spectral_from_json(j["left"]);
  if (j.is_object() && j.contains("right")) p.right = spectral_from_json(j["right"]);
  if (!p.left && !p.right) throw ConfigError("no spectral data in document");
  if (p.left && p.left->side != Side::Left) throw ConfigError("'left' entry has side right");
  if (p.right && p.right->side != Side::Right) throw ConfigError("'right' entry has side left");
  return p;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Plans and error summaries

inline Json to_json(const CutPlan& p) {
  Json j;
  j["method"] = to_string(p.method);
  j["grid"] = {{"t0", p.grid.t0}, {"tau", p.grid.tau}, {"count", p.grid.count}};
  j["centers"] = Json::array();
  for (const auto& c : p.centers)
    j["centers"].push_back({{"index", c.index}, {"center", c.center}, {"merged", c.merged}});
  j["zones"] = Json::array();
  for (const auto& z : p.zones)
    j["zones"].push_back(
        {{"center", z.center}, {"radius", z.radius}, {"active_solitons", z.active_solitons}});
  j["segments"] = Json::array();
  for (const auto& s : p.segments)
    j["segments"].push_back({{"id", s.id},
                             {"side", to_string(s.side)},
                             {"direction", s.side == Side::Left ? "rightward" : "leftward"},
                             {"first", s.first},
                             {"last", s.last},
                             {"t_start", p.start_t(s)},
                             {"t_end", p.end_t(s)},
                             {"march_start", s.march_start},
                             {"use_extended", s.use_extended},
                             {"unguarded", s.unguarded},
                             {"active_solitons", s.active},
                             {"cut_solitons", s.cut}});
  return j;
}

inline Json to_json(const ErrorReport& r) {
  return {{"label", r.label}, {"h", r.h}, {"rmse", r.rmse}, {"max_error", max_error(r.pointwise)}};
}

inline Json to_json(const ConvergenceResult& c) {
  Json j;
  j["rows"] = Json::array();
  for (const auto& r : c.reports) j["rows"].push_back(to_json(r));
  j["slope"] = std::isnan(c.slope) ? Json(nullptr) : Json(c.slope);
  return j;
}

// ---------------------------------------------------------------------------
// Experiment config

enum class ScenarioKind { FromSpectralFile, SingleSoliton, TwoSoliton, EightSoliton, ChirpedSech };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::FromSpectralFile: return "FromSpectralFile";
    case ScenarioKind::SingleSoliton: return "SingleSoliton";
    case ScenarioKind::TwoSoliton: return "TwoSoliton";
    case ScenarioKind::EightSoliton: return "EightSoliton";
    case ScenarioKind::ChirpedSech: return "ChirpedSech";
  }
  return "?";
}

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::SingleSoliton;
  std::filesystem::path spectral_file;
  SolitonParams soliton{1.0, 0.5, 0.8, 0.0};
  double delta = 8.0;
  ChirpedSechSetup chirp;
  /// Forward-scattering settings of the scatter subcommand.
  ChirpedSechSetup scatter;
  std::optional<double> L;
  std::size_t M = 1024;
  /// z window of every start-point solve; zero picks it automatically.
  double P = 0.0;
  Method method = Method::Extended;
  double zone_constant = 6.0;
  std::vector<std::size_t> sweep_M{256, 512, 1024, 2048, 4096};
};

inline Method method_from_config(const std::string& s) {
  try {
    return method_from_string(s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

inline Dispersion dispersion_from_string(const std::string& s) {
  if (s == "anomalous") return Dispersion::Anomalous;
  if (s == "normal") return Dispersion::Normal;
  throw ConfigError("dispersion must be \"anomalous\" or \"normal\"");
}

namespace detail {

inline void read_scatter_block(const Json& j, ChirpedSechSetup& c) {
  c.T = number(j, "T", c.T);
  c.dt = number(j, "dt", c.dt);
  c.X = number(j, "X", c.X);
  c.dxi = number(j, "dxi", c.dxi);
  if (!(c.T > 0.0) || !(c.dt > 0.0) || !(c.X > 0.0) || !(c.dxi > 0.0))
    throw ConfigError("scatter settings must be positive");
}

}  // namespace detail

/// Relative paths in the document resolve against `base_dir`.
inline ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    if (j.contains("scenario")) {
      const std::string s = j["scenario"].get<std::string>();
      bool found = false;
      for (auto k : {ScenarioKind::FromSpectralFile, ScenarioKind::SingleSoliton,
                     ScenarioKind::TwoSoliton, ScenarioKind::EightSoliton, ScenarioKind::ChirpedSech})
        if (s == to_string(k)) {
          c.scenario = k;
          found = true;
        }
      if (!found) throw ConfigError("unknown scenario '" + s + "'");
    }
    if (c.scenario == ScenarioKind::FromSpectralFile) {
      const std::filesystem::path f = detail::member(j, "spectral_file").get<std::string>();
      c.spectral_file = f.is_absolute() ? f : base_dir / f;
    }
    if (j.contains("soliton")) {
      const Json& s = j["soliton"];
      c.soliton.eta = detail::number(s, "eta", c.soliton.eta);
      c.soliton.xi = detail::number(s, "xi", c.soliton.xi);
      c.soliton.theta = detail::number(s, "theta", c.soliton.theta);
      c.soliton.delta = detail::number(s, "delta", c.soliton.delta);
      if (!(c.soliton.eta > 0.0)) throw ConfigError("soliton eta must be positive");
    }
    c.delta = detail::number(j, "delta", c.delta);
    if (j.contains("chirp")) {
      const Json& s = j["chirp"];
      c.chirp.signal.A = detail::number(s, "A", c.chirp.signal.A);
      c.chirp.signal.C = detail::number(s, "C", c.chirp.signal.C);
      if (s.contains("dispersion"))
        c.chirp.dispersion = dispersion_from_string(s["dispersion"].get<std::string>());
      detail::read_scatter_block(s, c.chirp);
      if (!(c.chirp.signal.A > 0.0)) throw ConfigError("chirp amplitude must be positive");
    }
    c.scatter = c.chirp;
    if (j.contains("scatter")) {
      const Json& s = j["scatter"];
      if (s.contains("dispersion"))
        c.scatter.dispersion = dispersion_from_string(s["dispersion"].get<std::string>());
      detail::read_scatter_block(s, c.scatter);
    }

    if (j.contains("grid")) {
      const Json& g = j["grid"];
      if (g.contains("L")) c.L = detail::number(g, "L", 0.0);
      const bool hasM = g.contains("M"), hasTau = g.contains("tau");
      if (hasM) {
        const double m = detail::number(g, "M", 0.0);
        if (!(m >= 1.0) || m != std::floor(m)) throw ConfigError("grid M must be a positive integer");
        c.M = static_cast<std::size_t>(m);
      }
      if (hasTau) {
        const double tau = detail::number(g, "tau", 0.0);
        if (!c.L) throw ConfigError("grid tau needs L");
        if (!(tau > 0.0)) throw ConfigError("grid tau must be positive");
        const double m = *c.L / tau;
        if (std::abs(m - std::round(m)) > 1e-9 * m)
          throw ConfigError("grid tau does not divide L");
        if (hasM && std::llround(m) != static_cast<long long>(c.M))
          throw ConfigError("grid tau is inconsistent with M (tau must equal L/M)");
        c.M = static_cast<std::size_t>(std::llround(m));
      }
      if (c.L && !(*c.L > 0.0)) throw ConfigError("grid L must be positive");
    }
    c.P = detail::number(j, "P", c.P);
    if (c.P < 0.0) throw ConfigError("P must be non-negative");
    if (j.contains("method")) c.method = method_from_config(j["method"].get<std::string>());
    c.zone_constant = detail::number(j, "zone_constant", c.zone_constant);
    if (!(c.zone_constant > 0.0)) throw ConfigError("zone_constant must be positive");
    if (j.contains("sweep")) {
      const Json& s = detail::member(j["sweep"], "M");
      if (!s.is_array()) throw ConfigError("sweep M must be an array");
      c.sweep_M.clear();
      for (const auto& m : s) {
        if (!m.is_number_integer() || m.get<long long>() < 1)
          throw ConfigError("sweep M entries must be positive integers");
        c.sweep_M.push_back(m.get<std::size_t>());
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline Scenario build_scenario(const ExperimentConfig& c) {
  switch (c.scenario) {
    case ScenarioKind::SingleSoliton: return single_soliton_scenario(c.soliton);
    case ScenarioKind::TwoSoliton: return two_soliton_scenario(c.delta);
    case ScenarioKind::EightSoliton: return eight_soliton_scenario();
    case ScenarioKind::ChirpedSech: return chirped_sech_scenario(c.chirp);
    case ScenarioKind::FromSpectralFile: {
      Scenario s;
      s.name = "FromSpectralFile";
      s.data = spectral_pair_from_json(read_json_file(c.spectral_file));
      s.default_L = 0.0;
      return s;
    }
  }
  throw ConfigError("unknown scenario");
}

inline double interval_length(const ExperimentConfig& c, const Scenario& s) {
  if (c.L) return *c.L;
  if (s.default_L > 0.0) return s.default_L;
  throw ConfigError("grid L is required for this scenario");
}

/// Cutter options from a config on a grid with step tau. P must be a
/// multiple of h = 2 tau.
inline CutterOptions cutter_options(const ExperimentConfig& c, double tau) {
  CutterOptions o;
  o.method = c.method;
  o.zone_constant = c.zone_constant;
  if (c.P > 0.0) {
    const double k = c.P / (2.0 * tau);
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
      throw ConfigError("P must be a multiple of h = 2 L / M");
    o.extended_window = 0.5 * c.P;
  }
  return o;
}

}  // namespace gtib
