#pragma once

// Recovery error measures:
//   eps(t) = |q(t) - q_exact(t)| / max |q_exact|
//   RMSE   = sqrt( 1/(M+1) sum_j eps(t_j)^2 )

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gtib/signal.hpp"

namespace gtib {

inline std::vector<double> pointwise_error(const std::vector<Complex>& q,
                                           const std::vector<Complex>& q_exact) {
  if (q.size() != q_exact.size()) throw InvalidArgument("signals live on different grids");
  double peak = 0.0;
  for (const auto& v : q_exact) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw InvalidArgument("exact signal is identically zero");
  std::vector<double> eps(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double e = std::abs(q[j] - q_exact[j]) / peak;
    // a sample that never converged counts as infinitely wrong
    eps[j] = std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
  }
  return eps;
}

inline std::vector<double> pointwise_error(const RecoveredSignal& q, const RecoveredSignal& q_exact) {
  if (q.grid.count != q_exact.grid.count || std::abs(q.grid.t0 - q_exact.grid.t0) > 1e-12 ||
      std::abs(q.grid.tau - q_exact.grid.tau) > 1e-15)
    throw InvalidArgument("signals live on different grids");
  return pointwise_error(q.q, q_exact.q);
}

inline double rmse(const std::vector<double>& eps) {
  if (eps.empty()) throw InvalidArgument("rmse of an empty sample");
  double s = 0.0;
  for (double e : eps) s += e * e;
  return std::sqrt(s / static_cast<double>(eps.size()));
}

inline double max_error(const std::vector<double>& eps) {
  double m = 0.0;
  for (double e : eps) m = std::max(m, e);
  return m;
}

/// Largest error over the samples with lo <= t <= hi.
inline double max_error_in(const TimeGrid& g, const std::vector<double>& eps, double lo, double hi) {
  double m = 0.0;
  for (std::size_t j = 0; j < g.count; ++j)
    if (g[j] >= lo && g[j] <= hi) m = std::max(m, eps[j]);
  return m;
}

struct ErrorReport {
  std::vector<double> pointwise;
  double rmse = 0.0;
  double h = 0.0;
  std::string label;
};

inline ErrorReport error_report(const RecoveredSignal& q, const RecoveredSignal& q_exact, double h,
                                std::string label = {}) {
  ErrorReport r;
  r.pointwise = pointwise_error(q, q_exact);
  r.rmse = rmse(r.pointwise);
  r.h = h;
  r.label = std::move(label);
  return r;
}

/// Least-squares slope of log(rmse) against log(h).
inline double convergence_slope(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size()) throw InvalidArgument("step and error lists differ in length");
  if (h.size() < 3) throw InvalidArgument("slope needs at least three step sizes");
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) throw InvalidArgument("slope needs positive values");
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ConvergenceResult {
  std::vector<ErrorReport> reports;
  double slope = std::numeric_limits<double>::quiet_NaN();  // NaN with < 3 rows
};

/// Runs `scenario(M)` for each resolution. The scenario returns the pair
/// (recovered, exact) on the same grid together with its step h.
template <class Scenario>
ConvergenceResult convergence_sweep(Scenario&& scenario, const std::vector<std::size_t>& Ms) {
  ConvergenceResult out;
  std::vector<double> hs, es;
  for (auto M : Ms) {
    auto [rec, exact, h] = scenario(M);
    out.reports.push_back(error_report(rec, exact, h, "M=" + std::to_string(M)));
    hs.push_back(h);
    es.push_back(out.reports.back().rmse);
  }
  if (hs.size() >= 3) out.slope = convergence_slope(hs, es);
  return out;
}

/// CSV with columns t, epsilon.
inline void write_error_csv(std::ostream& os, const TimeGrid& g, const std::vector<double>& eps) {
  os << "t,epsilon\n";
  for (std::size_t j = 0; j < g.count; ++j)
    os << format_double(g[j]) << ',' << format_double(eps[j]) << '\n';
}

}  // namespace gtib
