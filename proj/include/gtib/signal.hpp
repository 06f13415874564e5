#pragma once

// Uniform time grids and sampled potentials.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gtib/common.hpp"

namespace gtib {

/// t_j = t0 + j tau, j = 0..count-1.
struct TimeGrid {
  double t0 = 0.0;
  double tau = 1.0;
  std::size_t count = 0;

  double operator[](std::size_t j) const { return t0 + static_cast<double>(j) * tau; }
  double back() const { return (*this)[count - 1]; }
  std::size_t size() const { return count; }

  /// Grid of an interval of length L split into M steps (M + 1 points).
  static TimeGrid centered(double L, std::size_t M) {
    if (!(L > 0.0) || M < 1) throw InvalidArgument("grid needs L > 0 and M >= 1");
    return {-0.5 * L, L / static_cast<double>(M), M + 1};
  }

  /// Index of the sample closest to t, clamped to the grid.
  std::size_t nearest(double t) const {
    const double u = std::round((t - t0) / tau);
    if (u <= 0.0) return 0;
    if (u >= static_cast<double>(count - 1)) return count - 1;
    return static_cast<std::size_t>(u);
  }
};

struct RecoveredSignal {
  TimeGrid grid;
  std::vector<Complex> q;
  /// Segment that produced each sample; -1 for samples never written.
  std::vector<int> provenance;

  RecoveredSignal() = default;
  explicit RecoveredSignal(TimeGrid g)
      : grid(g), q(g.count, Complex{0.0, 0.0}), provenance(g.count, -1) {}

  std::size_t size() const { return q.size(); }
  bool complete() const {
    for (int p : provenance)
      if (p < 0) return false;
    return true;
  }
};

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// CSV with columns t, re_q, im_q, segment.
inline void write_csv(std::ostream& os, const RecoveredSignal& s) {
  os << "t,re_q,im_q,segment\n";
  for (std::size_t j = 0; j < s.size(); ++j)
    os << format_double(s.grid[j]) << ',' << format_double(s.q[j].real()) << ','
       << format_double(s.q[j].imag()) << ',' << s.provenance[j] << '\n';
}

}  // namespace gtib
