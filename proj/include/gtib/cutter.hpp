#pragma once

// Multi-zone recovery: soliton stability zones, cut planning, per-segment
// marching and stitching of the segment outputs into one signal.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gtib/glme.hpp"
#include "gtib/signal.hpp"
#include "gtib/spectral.hpp"

namespace gtib {

enum class Method { NoCuts, WithCuts, Extended, LeftOnly, RightOnly };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::NoCuts: return "NoCuts";
    case Method::WithCuts: return "WithCuts";
    case Method::Extended: return "Extended";
    case Method::LeftOnly: return "LeftOnly";
    case Method::RightOnly: return "RightOnly";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  for (Method m : {Method::NoCuts, Method::WithCuts, Method::Extended, Method::LeftOnly,
                   Method::RightOnly})
    if (s == to_string(m)) return m;
  throw InvalidArgument("unknown method '" + s + "'");
}

struct CutterOptions {
  Method method = Method::Extended;
  /// Zone radius is zone_constant / eta.
  double zone_constant = 6.0;
  /// A start point needs extension when the isolated-soliton magnitude there
  /// exceeds this fraction of 2 eta_max.
  double extended_threshold = 1e-6;
  /// Fixed extension of every start point in t (half the z window P);
  /// zero lets the threshold decide.
  double extended_window = 0.0;
  /// Single-direction variants start every segment extended when needed.
  bool single_direction_extended = true;
  LevinsonOptions levinson;
  bool parallel = true;
};

class PlanningError : public Error {
 public:
  using Error::Error;
};

/// A segment that stopped early. The partially stitched signal is kept.
class RecoveryError : public InstabilityError {
 public:
  RecoveryError(const std::string& what, int segment, std::size_t step, RecoveredSignal partial)
      : InstabilityError(what, step), segment_(segment), partial_(std::move(partial)) {}
  int segment() const noexcept { return segment_; }
  const RecoveredSignal& partial() const noexcept { return partial_; }

 private:
  int segment_;
  RecoveredSignal partial_;
};

struct SolitonCenter {
  std::size_t index = 0;
  double center = 0.0;
  /// Set when another center lies within one grid step.
  bool merged = false;
};

struct StabilityZone {
  double center = 0.0;
  double radius = 0.0;
  std::vector<std::size_t> active_solitons;
};

struct Segment {
  int id = 0;
  Side side = Side::Left;  // left GLME marches rightward
  std::size_t first = 0;   // grid index range, inclusive
  std::size_t last = 0;
  std::vector<std::size_t> active;
  std::vector<std::size_t> cut;
  bool use_extended = false;
  /// Recovery point where the recursion starts; equals the first sample
  /// of the march unless extended.
  double march_start = 0.0;
  /// Kernel monitors off: the uncut baseline runs into whatever the
  /// kernel does.
  bool unguarded = false;

  MarchDirection direction() const { return direction_for(side); }
};

struct CutPlan {
  TimeGrid grid;
  Method method = Method::Extended;
  std::vector<SolitonCenter> centers;
  std::vector<StabilityZone> zones;
  std::vector<Segment> segments;

  double start_t(const Segment& s) const { return grid[s.side == Side::Left ? s.first : s.last]; }
  double end_t(const Segment& s) const { return grid[s.side == Side::Left ? s.last : s.first]; }
};

namespace detail {

inline double zone_radius(const SpectralData& d, std::size_t n, double zc) {
  return zc / d.discrete[n].eta();
}

// Constant of soliton n with its far-side neighbours cut. Neighbours
// within `tie` of it count on neither side.
inline Complex isolated_norming(const SpectralData& d, std::size_t n,
                                const std::vector<double>& centers, double tie) {
  Complex l = d.discrete[n].norming;
  for (std::size_t j = 0; j < d.discrete.size(); ++j) {
    if (j == n) continue;
    const double gap = centers[j] - centers[n];
    const bool far = d.side == Side::Left ? gap < -tie : gap > tie;
    if (far) {
      const Complex b = blaschke(d.discrete[n].zeta, d.discrete[j].zeta);
      l *= b * b;
    }
  }
  return l;
}

inline std::shared_ptr<const KernelTable> march_kernel(const SpectralData& d, double t_first,
                                                       std::size_t blocks, double h) {
  const auto N = static_cast<double>(blocks);
  if (d.side == Side::Left) {
    const double c = 2.0 * t_first - h;
    return std::make_shared<KernelTable>(kernel_left(d, c - (N - 1.0) * h, h, 2 * blocks));
  }
  const double za = 2.0 * t_first + h;
  return std::make_shared<KernelTable>(kernel_right(d, za - N * h, h, 2 * blocks));
}

}  // namespace detail

/// Centers of the solitons by a single-soliton recovery per eigenvalue and
/// the argmax of |q|. Each soliton is isolated with its far-side neighbours
/// cut; the neighbour order is refined until it is stable. With both sides
/// known the isolated constant is the geometric mean of the left estimate
/// and the left equivalent of the right one, which puts the members of a
/// bound state at a common center.
inline std::vector<SolitonCenter> find_centers(const SpectralPair& pair, const TimeGrid& grid,
                                               const CutterOptions& opt = {}) {
  const SpectralData& data = pair.any();
  const std::size_t N = data.discrete.size();
  if (N == 0) throw InvalidArgument("find_centers needs discrete eigenvalues");
  const bool both = pair.left && pair.right;
  if (both && pair.right->discrete.size() != N)
    throw InvalidArgument("left and right data list different eigenvalues");
  const double tau = grid.tau;
  const bool left = data.side == Side::Left;

  auto norming = [&](std::size_t n, const std::vector<double>& c) {
    const Complex l = detail::isolated_norming(data, n, c, tau);
    if (!both) return l;
    const double eta = data.discrete[n].eta();
    const Complex r = detail::isolated_norming(*pair.right, n, c, tau);
    // an isolated soliton has r = 4 eta^2 / l in magnitude
    return std::polar(std::sqrt(std::abs(l) * 4.0 * eta * eta / std::abs(r)), std::arg(l));
  };

  auto locate = [&](std::size_t n, Complex norming) {
    SpectralData one;
    one.side = data.side;
    one.sign_mode = SignMode::WithDiscrete;
    one.discrete.push_back({data.discrete[n].zeta, norming});
    const double eta = data.discrete[n].eta();
    // closed-form guess for an isolated soliton; the march refines it
    const double guess = (left ? 1.0 : -1.0) * std::log(2.0 * eta / std::abs(norming)) / (2.0 * eta);
    const double step = tau * std::max(1.0, std::floor(0.01 / (eta * tau)));
    const double span = 24.0 / eta;
    const auto steps = static_cast<std::size_t>(std::ceil(span / step));
    const double off = std::round((guess - (left ? 1.0 : -1.0) * 0.5 * span - grid.t0) / step);
    const double t_first = grid.t0 + off * step;
    auto kern = detail::march_kernel(one, t_first, steps + 1, 2.0 * step);
    MarchState st(kern, SignMode::WithDiscrete, t_first, opt.levinson);
    double best = std::abs(st.q()), best_t = st.t();
    for (std::size_t i = 0; i < steps; ++i) {
      try {
        st.advance();
      } catch (const Error&) {
        break;
      }
      const double a = std::abs(st.q());
      if (a > best) {
        best = a;
        best_t = st.t();
      } else if (a < 1e-3 * best) {
        break;  // well past the peak
      }
    }
    return best_t;
  };

  // all centers equal: the first pass cuts nothing
  std::vector<double> c(N, 0.0);
  for (int iter = 0; iter < 8; ++iter) {
    std::vector<double> next(N);
    for (std::size_t n = 0; n < N; ++n) next[n] = locate(n, norming(n, c));
    std::vector<std::size_t> a(N), b(N);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    std::sort(a.begin(), a.end(), [&](auto i, auto j) { return c[i] < c[j]; });
    std::sort(b.begin(), b.end(), [&](auto i, auto j) { return next[i] < next[j]; });
    const bool same = iter > 0 && a == b;
    c = std::move(next);
    if (same) break;
  }

  std::vector<SolitonCenter> out(N);
  for (std::size_t n = 0; n < N; ++n) out[n] = {n, c[n], false};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(c[i] - c[j]) < tau) out[i].merged = out[j].merged = true;
  return out;
}

namespace detail {

struct Unit {
  std::vector<std::size_t> members;  // sorted by center
  double lo = 0.0, hi = 0.0;         // extreme centers
  double center() const { return 0.5 * (lo + hi); }
};

inline std::size_t first_at_or_after(const TimeGrid& g, double t) {
  if (t <= g.t0) return 0;
  const double u = (t - g.t0) / g.tau;
  auto k = static_cast<std::size_t>(std::ceil(u - 1e-9));
  return std::min(k, g.count);
}

inline std::size_t first_after(const TimeGrid& g, double t) {
  if (t < g.t0) return 0;
  const double u = (t - g.t0) / g.tau;
  auto k = static_cast<std::size_t>(std::floor(u + 1e-9)) + 1;
  return std::min(k, g.count);
}

// Isolated-soliton magnitude of the active set at t, relative to 2 eta_max.
inline double start_magnitude(const SpectralData& d, const std::vector<SolitonCenter>& c,
                              const std::vector<std::size_t>& active, double t) {
  double m = 0.0;
  for (auto j : active) {
    const double eta = d.discrete[j].eta();
    m += 2.0 * eta / std::cosh(std::min(700.0, 2.0 * eta * std::abs(t - c[j].center)));
  }
  return m / (2.0 * d.max_eta());
}

}  // namespace detail

/// Splits the grid into marching segments for the chosen method.
inline CutPlan plan(const SpectralPair& pair, const TimeGrid& grid, const CutterOptions& opt = {}) {
  if (grid.count < 1) throw InvalidArgument("empty grid");
  if (!(opt.zone_constant > 0.0)) throw InvalidArgument("zone constant must be positive");
  const SpectralData& data = pair.any();
  validate(data);
  CutPlan p;
  p.grid = grid;
  p.method = opt.method;
  const std::size_t N = data.discrete.size();
  const double tau = grid.tau;
  int next_id = 0;

  std::vector<std::size_t> all(N);
  std::iota(all.begin(), all.end(), 0);

  auto add = [&](Side side, std::size_t first, std::size_t last, std::vector<std::size_t> cut,
                 bool allow_extended) {
    if (first > last || last >= grid.count) return;
    Segment s;
    s.id = next_id++;
    s.side = side;
    s.first = first;
    s.last = last;
    std::sort(cut.begin(), cut.end());
    for (auto j : all)
      if (!std::binary_search(cut.begin(), cut.end(), j)) s.active.push_back(j);
    s.cut = std::move(cut);
    const double start = side == Side::Left ? grid[first] : grid[last];
    s.march_start = start;
    if (allow_extended && !s.active.empty()) {
      double ext = 0.0;
      if (opt.extended_window > 0.0) {
        ext = opt.extended_window;
      } else if (detail::start_magnitude(data, p.centers, s.active, start) > opt.extended_threshold) {
        // move the start beyond every active soliton's threshold distance
        const double eta_max = data.max_eta();
        for (auto j : s.active) {
          const double c = p.centers[j].center;
          const double eta = data.discrete[j].eta();
          const double d =
              std::acosh(std::max(1.0, eta / (opt.extended_threshold * eta_max))) / (2.0 * eta);
          ext = std::max(ext, side == Side::Left ? start - (c - d) : (c + d) - start);
        }
      }
      if (ext > 0.0) {
        const double k = std::ceil(ext / tau - 1e-9);
        s.use_extended = true;
        s.march_start = side == Side::Left ? start - k * tau : start + k * tau;
      }
    }
    p.segments.push_back(std::move(s));
  };

  const std::size_t mid = detail::first_after(grid, 0.5 * (grid.t0 + grid.back()));

  if (N == 0 || opt.method == Method::NoCuts) {
    if (N > 0) p.centers = find_centers(pair, grid, opt);
    const bool guard = opt.method != Method::NoCuts;
    add(Side::Left, 0, mid == 0 ? 0 : mid - 1, {}, false);
    add(Side::Right, mid, grid.count - 1, {}, false);
    for (auto& s : p.segments) s.unguarded = !guard;
    return p;
  }

  p.centers = find_centers(pair, grid, opt);
  std::vector<double> c(N), R(N);
  for (std::size_t n = 0; n < N; ++n) {
    c[n] = p.centers[n].center;
    R[n] = detail::zone_radius(data, n, opt.zone_constant);
  }
  std::vector<std::size_t> order = all;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return c[i] < c[j]; });

  // Transitive merge of intersecting zones, then short groups stay whole and
  // long ones split into single solitons.
  std::vector<detail::Unit> units;
  {
    std::vector<std::vector<std::size_t>> groups;
    for (auto n : order) {
      if (!groups.empty()) {
        const auto& g = groups.back();
        double reach = -std::numeric_limits<double>::infinity();
        for (auto j : g) reach = std::max(reach, c[j] + R[j]);
        if (c[n] - R[n] <= reach) {
          groups.back().push_back(n);
          continue;
        }
      }
      groups.push_back({n});
    }
    for (const auto& g : groups) {
      const auto a = g.front(), b = g.back();
      const bool short_group = g.size() == 1 || c[b] - c[a] <= R[a] + R[b];
      if (short_group) {
        units.push_back({g, c[a], c[b]});
        continue;
      }
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (i > 0 && p.centers[g[i]].merged && std::abs(c[g[i]] - c[g[i - 1]]) < tau) {
          if (opt.method != Method::Extended)
            throw PlanningError("long soliton group with indistinguishable centers");
          units.back().members.push_back(g[i]);
          units.back().hi = c[g[i]];
          continue;
        }
        units.push_back({{g[i]}, c[g[i]], c[g[i]]});
      }
    }
  }
  for (const auto& u : units) {
    StabilityZone z;
    z.center = u.center();
    for (auto j : u.members) z.radius = std::max(z.radius, std::abs(c[j] - z.center) + R[j]);
    z.active_solitons = u.members;
    p.zones.push_back(std::move(z));
  }

  auto cut_left_of = [&](double m, double e) {
    std::vector<std::size_t> cut;
    for (auto j : all)
      if (c[j] < m && c[j] + R[j] < e) cut.push_back(j);
    return cut;
  };
  auto cut_right_of = [&](double m, double e) {
    std::vector<std::size_t> cut;
    for (auto j : all)
      if (c[j] > m && c[j] - R[j] > e) cut.push_back(j);
    return cut;
  };

  if (opt.method == Method::WithCuts || opt.method == Method::Extended) {
    const bool ext = opt.method == Method::Extended;
    const std::size_t K = units.size();
    std::vector<double> m(K + 1);
    m[0] = -std::numeric_limits<double>::infinity();
    m[K] = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < K; ++k) m[k] = 0.5 * (units[k - 1].hi + units[k].lo);
    for (std::size_t k = 0; k < K; ++k) {
      const double ck = units[k].center();
      // GTIBL over [m_{k-1}, c_k], GTIBR over (c_k, m_k); the last one keeps
      // the grid end.
      const std::size_t l0 = detail::first_at_or_after(grid, m[k]);
      const std::size_t r0 = detail::first_after(grid, ck);
      const std::size_t r1 = k + 1 == K ? grid.count : detail::first_at_or_after(grid, m[k + 1]);
      if (r0 > l0) {
        const double ms = grid[l0], es = grid[r0 - 1];
        add(Side::Left, l0, r0 - 1, cut_left_of(ms, es), ext);
      }
      if (r1 > r0) {
        const double ms = grid[r1 - 1], es = grid[r0];
        add(Side::Right, r0, r1 - 1, cut_right_of(ms, es), ext);
      }
    }
    return p;
  }

  // Single direction: restart whenever a zone ends.
  const bool ext = opt.single_direction_extended;
  std::vector<double> ev;
  for (auto j : all) {
    const double e = opt.method == Method::LeftOnly ? c[j] + R[j] : c[j] - R[j];
    if (std::isfinite(e) && e > grid.t0 && e < grid.back()) ev.push_back(e);
  }
  std::sort(ev.begin(), ev.end());
  if (opt.method == Method::LeftOnly) {
    std::vector<std::size_t> starts{0};
    for (double e : ev) starts.push_back(detail::first_at_or_after(grid, e));
    starts.push_back(grid.count);
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
      const std::size_t a = starts[k], b = starts[k + 1] - 1;
      if (a >= grid.count) break;
      std::vector<std::size_t> cut;
      for (auto j : all)
        if (c[j] + R[j] <= grid[a]) cut.push_back(j);
      add(Side::Left, a, b, cut, ext);
    }
  } else {
    std::vector<std::size_t> ends{0};
    for (double e : ev) ends.push_back(detail::first_after(grid, e));
    ends.push_back(grid.count);
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    // segment k covers (e_k, e_{k+1}] marching leftward; the first keeps the
    // grid start
    for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
      const std::size_t a = ends[k], b = ends[k + 1] - 1;
      std::vector<std::size_t> cut;
      for (auto j : all)
        if (c[j] - R[j] >= grid[b]) cut.push_back(j);
      add(Side::Right, a, b, cut, ext);
    }
  }
  return p;
}

namespace detail {

struct SegmentOutput {
  std::vector<Complex> q;  // indexed from seg.first
  MarchStop stop = MarchStop::Completed;
  std::size_t step = 0;
  std::string message;
  std::size_t written = 0;  // samples produced, counted in march order
};

inline SegmentOutput run_segment(const SpectralPair& pair, const CutPlan& p, const Segment& s,
                                 const CutterOptions& opt) {
  SegmentOutput out;
  const std::size_t count = s.last - s.first + 1;
  out.q.assign(count, Complex{0.0, 0.0});
  const SpectralData& base = pair.get(s.side);
  const bool has_cont = base.continuous && !base.continuous->values.empty();
  if (s.active.empty() && !has_cont) {
    out.written = count;  // nothing left to recover
    return out;
  }
  const SpectralData d = cut_solitons(base, s.cut);
  const TimeGrid& g = p.grid;
  const double tau = g.tau, h = 2.0 * tau;
  const bool left = s.side == Side::Left;
  const double t_begin = left ? g[s.first] : g[s.last];
  const auto lead = static_cast<std::size_t>(std::llround(std::abs(t_begin - s.march_start) / tau));
  const std::size_t blocks = lead + count;

  LevinsonOptions lo = opt.levinson;
  if (s.unguarded) {
    lo.growth_zone = 0.0;
    lo.check_contraction = false;
    lo.honor_divergence_flags = false;
    lo.pivot_factor = 0.0;
  } else if (lo.growth_zone > 0.0) {
    // segments end on a zone edge; keep the monitor one unit outside it
    lo.growth_zone = std::max(lo.growth_zone, opt.zone_constant + 1.0);
  }
  auto kern = march_kernel(d, s.march_start, blocks, h);
  try {
    MarchState st(kern, d.sign_mode, s.march_start, lo);
    for (std::size_t i = 0;; ++i) {
      if (i >= lead) {
        const std::size_t k = i - lead;
        out.q[left ? k : count - 1 - k] = st.q();
        ++out.written;
      }
      if (i + 1 >= blocks) break;
      st.advance();
    }
  } catch (const CutRequired& e) {
    out.stop = MarchStop::CutBoundary;
    out.message = e.what();
  } catch (const InstabilityError& e) {
    out.stop = MarchStop::Instability;
    out.step = e.step();
    out.message = e.what();
  } catch (const RangeError& e) {
    out.stop = MarchStop::KernelRange;
    out.message = e.what();
  }
  return out;
}

}  // namespace detail

/// Runs every segment of the plan and stitches the outputs. Throws
/// RecoveryError, carrying the partial signal, when a segment stops early.
inline RecoveredSignal recover(const SpectralPair& pair, const CutPlan& p,
                               const CutterOptions& opt = {}) {
  RecoveredSignal out(p.grid);
  std::vector<detail::SegmentOutput> res(p.segments.size());
  if (opt.parallel && p.segments.size() > 1) {
    std::vector<std::future<detail::SegmentOutput>> jobs;
    for (const auto& s : p.segments)
      jobs.push_back(std::async(std::launch::async, [&pair, &p, &s, &opt] {
        return detail::run_segment(pair, p, s, opt);
      }));
    for (std::size_t i = 0; i < jobs.size(); ++i) res[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < p.segments.size(); ++i)
      res[i] = detail::run_segment(pair, p, p.segments[i], opt);
  }

  const Segment* failed = nullptr;
  const detail::SegmentOutput* fres = nullptr;
  for (std::size_t i = 0; i < p.segments.size(); ++i) {
    const auto& s = p.segments[i];
    const auto& r = res[i];
    const std::size_t count = s.last - s.first + 1;
    for (std::size_t k = 0; k < r.written; ++k) {
      const std::size_t off = s.side == Side::Left ? k : count - 1 - k;
      out.q[s.first + off] = r.q[off];
      out.provenance[s.first + off] = s.id;
    }
    if (r.stop != MarchStop::Completed && !failed) {
      failed = &s;
      fres = &r;
    }
  }
  if (failed)
    throw RecoveryError("segment " + std::to_string(failed->id) + " stopped (" +
                            to_string(fres->stop) + "): " + fres->message,
                        failed->id, fres->step, out);
  return out;
}

/// recover() restricted to plans whose segments all use one GLME side.
inline RecoveredSignal recover_single_direction(const SpectralPair& pair, const CutPlan& p,
                                                Side side, const CutterOptions& opt = {}) {
  for (const auto& s : p.segments)
    if (s.side != side) throw InvalidArgument("plan mixes march directions");
  return recover(pair, p, opt);
}

/// Plans and recovers in one call.
inline RecoveredSignal recover(const SpectralPair& pair, const TimeGrid& grid,
                               const CutterOptions& opt = {}) {
  return recover(pair, plan(pair, grid, opt), opt);
}

}  // namespace gtib
