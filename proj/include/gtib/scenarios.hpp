#pragma once

// Test potentials with their spectral data and, where one exists, the exact
// signal to compare against.

#include <functional>
#include <string>
#include <vector>

#include "gtib/oracles.hpp"
#include "gtib/signal.hpp"
#include "gtib/spectral.hpp"

namespace gtib {

struct Scenario {
  std::string name;
  SpectralPair data;
  /// Exact samples on a grid; empty when no reference exists.
  std::function<RecoveredSignal(const TimeGrid&)> exact;
  /// Same reference at a single point.
  std::function<Complex(double)> signal;
  /// Interval length used when the caller gives none.
  double default_L = 20.0;
};

inline Scenario single_soliton_scenario(const SolitonParams& p = {1.0, 0.5, 0.8, 0.0}) {
  Scenario s;
  s.name = "SingleSoliton";
  const SpectralData l = soliton_data({p});
  s.data = {l, reflectionless_right(l)};
  s.exact = [p](const TimeGrid& g) { return exact_soliton(p, g); };
  s.signal = [p](double t) { return exact_soliton(p, t); };
  s.default_L = 20.0 / p.eta;
  return s;
}

inline std::vector<SolitonParams> two_soliton_params(double delta) {
  return {{1.0, 0.5, 0.1, -delta}, {1.75, -1.4, 0.8, delta}};
}

/// Norming constants are those of the two solitons taken separately, so the
/// left soliton sits at -delta/2 and the right one shifts by the interaction.
inline Scenario two_soliton_scenario(double delta) {
  Scenario s;
  s.name = "TwoSoliton";
  const SpectralData l = soliton_data(two_soliton_params(delta));
  s.data = {l, reflectionless_right(l)};
  s.exact = [eig = l.discrete](const TimeGrid& g) { return darboux_multisoliton(eig, g); };
  s.signal = [eig = l.discrete](double t) { return darboux_multisoliton(eig, t); };
  s.default_L = 60.0;
  return s;
}

/// First soliton for t < 0, second for t >= 0.
inline RecoveredSignal one_soliton_approximation(double delta, const TimeGrid& g) {
  const auto ps = two_soliton_params(delta);
  RecoveredSignal out(g);
  for (std::size_t j = 0; j < g.count; ++j) out.q[j] = exact_soliton(ps[g[j] < 0.0 ? 0 : 1], g[j]);
  return out;
}

/// Eight solitons on [-50, 50]:
///   a lone soliton at -36,
///   a chain at -20, -15, -10, -5 whose neighbours overlap but whose ends do not,
///   a close pair at 12 and 18,
///   a lone soliton at 36.
/// Centers hold in the far-apart sense (see separated_soliton_data).
inline std::vector<SolitonParams> eight_soliton_params() {
  const double c[8] = {-36.0, -20.0, -15.0, -10.0, -5.0, 12.0, 18.0, 36.0};
  const double eta[8] = {0.9, 1.0, 0.85, 1.0, 0.95, 0.8, 1.0, 0.9};
  const double xi[8] = {0.3, -0.5, 0.8, 0.1, -0.9, 0.6, -0.2, 1.0};
  std::vector<SolitonParams> ps;
  for (int n = 0; n < 8; ++n) ps.push_back({eta[n], xi[n], 0.2 + 0.7 * n, 2.0 * eta[n] * c[n]});
  return ps;
}

inline Scenario eight_soliton_scenario() {
  Scenario s;
  s.name = "EightSoliton";
  const SpectralData l = separated_soliton_data(eight_soliton_params());
  s.data = {l, reflectionless_right(l)};
  s.exact = [eig = l.discrete](const TimeGrid& g) { return darboux_multisoliton(eig, g); };
  s.signal = [eig = l.discrete](double t) { return darboux_multisoliton(eig, t); };
  s.default_L = 100.0;
  return s;
}

struct ChirpedSechSetup {
  ChirpedSechParams signal;
  Dispersion dispersion = Dispersion::Anomalous;
  /// Scattering interval [-T, T] and cell width.
  double T = 22.0;
  double dt = 0.005;
  /// xi grid [-X, X] with step dxi.
  double X = 16.0;
  double dxi = 0.02;
};

/// Spectral data by forward scattering of A sech(t)^{1 + iC}.
inline Scenario chirped_sech_scenario(const ChirpedSechSetup& c = {}) {
  Scenario s;
  s.name = "ChirpedSech";
  ScatterOptions so;
  so.xi0 = -c.X;
  so.dxi = c.dxi;
  so.xi_count = static_cast<std::size_t>(std::llround(2.0 * c.X / c.dxi)) + 1;
  const ChirpedSechParams p = c.signal;
  s.data = forward_scatter_pair([p](double t) { return chirped_sech(p, t); }, -c.T, c.T, c.dt,
                                c.dispersion, so);
  s.exact = [p](const TimeGrid& g) { return chirped_sech(p, g); };
  s.signal = [p](double t) { return chirped_sech(p, t); };
  s.default_L = 30.0;
  return s;
}

}  // namespace gtib
