#pragma once

// Reference signals and independent solvers used to validate the recovery:
// exact solitons, Darboux multi-solitons, the chirped secant, a forward
// Zakharov-Shabat scattering solver and a dense GLME solve.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "gtib/glme.hpp"
#include "gtib/signal.hpp"
#include "gtib/spectral.hpp"

namespace gtib {

struct SolitonParams {
  double eta = 1.0;
  double xi = 0.0;
  double theta = 0.0;
  double delta = 0.0;

  Complex zeta() const { return {xi, eta}; }
  double center() const { return delta / (2.0 * eta); }
};

/// q(t) = 2 eta sech(2 eta t - delta) exp[-i (2 xi t + theta)]
inline Complex exact_soliton(const SolitonParams& p, double t) {
  if (!(p.eta > 0.0)) throw InvalidArgument("soliton needs eta > 0");
  return 2.0 * p.eta / std::cosh(2.0 * p.eta * t - p.delta) *
         std::polar(1.0, -(2.0 * p.xi * t + p.theta));
}

inline RecoveredSignal exact_soliton(const SolitonParams& p, const TimeGrid& g) {
  RecoveredSignal s(g);
  for (std::size_t j = 0; j < g.count; ++j) s.q[j] = exact_soliton(p, g[j]);
  return s;
}

/// Left norming constant of the isolated soliton p.
inline Complex soliton_norming(const SolitonParams& p) {
  return -kI * std::polar(2.0 * p.eta * std::exp(-p.delta), -p.theta);
}

/// a'(zeta_n) for a reflectionless potential with the given eigenvalues.
inline Complex reflectionless_a_prime(const std::vector<Complex>& zetas, std::size_t n) {
  Complex d = 1.0 / (zetas[n] - std::conj(zetas[n]));
  for (std::size_t j = 0; j < zetas.size(); ++j)
    if (j != n) d *= blaschke(zetas[n], zetas[j]);
  return d;
}

/// Left data of the reflectionless potential whose solitons, each taken in
/// isolation, are the given ones.
inline SpectralData soliton_data(const std::vector<SolitonParams>& ps) {
  SpectralData d;
  d.side = Side::Left;
  d.sign_mode = SignMode::WithDiscrete;
  for (const auto& p : ps) d.discrete.push_back({p.zeta(), soliton_norming(p)});
  return d;
}

/// Left data of the reflectionless potential whose solitons, once far apart,
/// sit at their own centers: each constant carries the Blaschke factors of
/// the solitons left of it.
inline SpectralData separated_soliton_data(const std::vector<SolitonParams>& ps) {
  SpectralData d = soliton_data(ps);
  for (std::size_t n = 0; n < ps.size(); ++n)
    for (std::size_t j = 0; j < ps.size(); ++j)
      if (j != n && ps[j].center() < ps[n].center()) {
        const Complex b = blaschke(ps[n].zeta(), ps[j].zeta());
        d.discrete[n].norming /= b * b;
      }
  return d;
}

/// Right data of a reflectionless potential from its left data:
/// r_n = -1 / (l_n a'(zeta_n)^2).
inline SpectralData reflectionless_right(const SpectralData& left) {
  if (left.side != Side::Left) throw InvalidArgument("expected left spectral data");
  if (left.continuous && !left.continuous->values.empty())
    throw InvalidArgument("data is not reflectionless");
  std::vector<Complex> z;
  for (const auto& e : left.discrete) z.push_back(e.zeta);
  SpectralData r = left;
  r.side = Side::Right;
  for (std::size_t n = 0; n < z.size(); ++n) {
    const Complex ap = reflectionless_a_prime(z, n);
    r.discrete[n].norming = -1.0 / (left.discrete[n].norming * ap * ap);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Darboux multi-soliton

namespace detail {

// Unit-scale eigenfunction (e^{-i zeta t}, B e^{i zeta t}) with |B| = e^{logb}.
inline std::array<Complex, 2> seed(Complex zeta, double logb, double argb, double t) {
  const double lu = zeta.imag() * t;
  const double lv = logb - zeta.imag() * t;
  const double s = std::max(lu, lv);
  return {std::polar(std::exp(lu - s), -zeta.real() * t),
          std::polar(std::exp(lv - s), argb + zeta.real() * t)};
}

}  // namespace detail

/// N-soliton potential from left data (zeta_n, l_n) by repeated Darboux
/// steps on the zero potential, eigenvalues taken in order of increasing eta.
/// The seed of soliton k is B_k = -2 i eta_k / l_k * prod_{j != k} 1/B(zeta_k, zeta_j),
/// which makes l_k the left norming constant of the result.
inline Complex darboux_multisoliton(const std::vector<DiscreteEigenvalue>& eig, double t) {
  const std::size_t N = eig.size();
  std::vector<std::size_t> order(N);
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return eig[a].eta() < eig[b].eta(); });

  std::vector<std::array<Complex, 2>> phi(N);
  for (std::size_t k = 0; k < N; ++k) {
    const Complex z = eig[k].zeta;
    double logb = std::log(2.0 * z.imag()) - std::log(std::abs(eig[k].norming));
    double argb = std::arg(-kI / eig[k].norming);
    for (std::size_t j = 0; j < N; ++j) {
      if (j == k) continue;
      const Complex b = blaschke(z, eig[j].zeta);
      logb -= std::log(std::abs(b));
      argb -= std::arg(b);
    }
    phi[k] = detail::seed(z, logb, argb, t);
  }

  Complex q{0.0, 0.0};
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t k = order[s];
    const Complex z1 = eig[k].zeta;
    const auto [p1, p2] = phi[k];
    const double nrm = std::norm(p1) + std::norm(p2);
    q += 4.0 * z1.imag() * p1 * std::conj(p2) / nrm;
    for (std::size_t r = s + 1; r < N; ++r) {
      const std::size_t j = order[r];
      const Complex z = eig[j].zeta;
      auto& [a, b] = phi[j];
      const Complex proj = (std::conj(p1) * a + std::conj(p2) * b) / nrm;
      const Complex na = (z - std::conj(z1)) * a - (z1 - std::conj(z1)) * p1 * proj;
      const Complex nb = (z - std::conj(z1)) * b - (z1 - std::conj(z1)) * p2 * proj;
      const double m = std::max(std::abs(na), std::abs(nb));
      a = na / m;
      b = nb / m;
    }
  }
  return q;
}

inline RecoveredSignal darboux_multisoliton(const std::vector<DiscreteEigenvalue>& eig,
                                            const TimeGrid& g) {
  for (std::size_t i = 0; i < eig.size(); ++i) {
    if (!(eig[i].eta() > 0.0)) throw InvalidArgument("eigenvalue not in the upper half-plane");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(eig[i].zeta - eig[j].zeta) < 1e-12)
        throw InvalidArgument("coincident eigenvalues");
  }
  RecoveredSignal s(g);
  for (std::size_t j = 0; j < g.count; ++j) s.q[j] = darboux_multisoliton(eig, g[j]);
  return s;
}

// ---------------------------------------------------------------------------
// Chirped hyperbolic secant

struct ChirpedSechParams {
  double A = 5.2;
  double C = 4.0;
};

/// q(t) = A sech(t)^{1 + iC}
inline Complex chirped_sech(const ChirpedSechParams& p, double t) {
  if (!(p.A > 0.0)) throw InvalidArgument("chirped secant needs A > 0");
  // log sech t computed without overflow
  const double a = std::abs(t);
  const double lsech = std::log(2.0) - a - std::log1p(std::exp(-2.0 * a));
  return p.A * std::exp(Complex{1.0, p.C} * lsech);
}

inline RecoveredSignal chirped_sech(const ChirpedSechParams& p, const TimeGrid& g) {
  RecoveredSignal s(g);
  for (std::size_t j = 0; j < g.count; ++j) s.q[j] = chirped_sech(p, g[j]);
  return s;
}

// ---------------------------------------------------------------------------
// Forward scattering

/// Anomalous dispersion is the focusing system (solitons possible), normal
/// the defocusing one.
enum class Dispersion { Anomalous, Normal };

inline const char* to_string(Dispersion d) {
  return d == Dispersion::Anomalous ? "anomalous" : "normal";
}

using Monodromy = std::array<Complex, 4>;  // S11, S12, S21, S22

struct ScatterOptions {
  double xi0 = -10.0;
  double dxi = 0.02;
  std::size_t xi_count = 1001;
  bool find_eigenvalues = true;
  /// Search box for eigenvalues; zero picks a bound from max |q|.
  double search_xi = 0.0;
  double search_eta_min = 1e-3;
  double search_eta_max = 0.0;
  /// Extrapolate the transfer-matrix result from dt and dt/2.
  bool richardson = true;
  double newton_tol = 1e-13;
};

/// Piecewise-constant transfer-matrix scattering of
///   v' = [[-i zeta, q], [-sigma conj(q), i zeta]] v
/// over cells of width dt centred on the samples. Returns
/// S = E(t1)^{-1} prod U E(t0), E(t) = diag(e^{-i zeta t}, e^{i zeta t}).
class ZsScatterer {
 public:
  ZsScatterer(std::vector<Complex> samples, double t_first, double dt, Dispersion disp)
      : q_(std::move(samples)), t_first_(t_first), dt_(dt),
        sigma_(disp == Dispersion::Anomalous ? 1.0 : -1.0) {
    if (q_.empty() || !(dt > 0.0)) throw InvalidArgument("scatterer needs samples and dt > 0");
  }

  double sigma() const { return sigma_; }

  Monodromy monodromy(Complex zeta) const {
    Complex s11 = 1.0, s12 = 0.0, s21 = 0.0, s22 = 1.0;
    for (const Complex& q : q_) {
      const Complex k = std::sqrt(-zeta * zeta - sigma_ * std::norm(q));
      const Complex ch = std::cosh(k * dt_);
      const Complex sh = std::abs(k) > 1e-14 ? std::sinh(k * dt_) / k : Complex{dt_};
      const Complex u11 = ch - kI * zeta * sh, u22 = ch + kI * zeta * sh;
      const Complex u12 = sh * q, u21 = -sigma_ * std::conj(q) * sh;
      const Complex n11 = u11 * s11 + u12 * s21, n12 = u11 * s12 + u12 * s22;
      const Complex n21 = u21 * s11 + u22 * s21, n22 = u21 * s12 + u22 * s22;
      s11 = n11;
      s12 = n12;
      s21 = n21;
      s22 = n22;
    }
    const double t0 = t_first_ - 0.5 * dt_;
    const double t1 = t_first_ + (static_cast<double>(q_.size()) - 0.5) * dt_;
    s11 *= std::exp(kI * zeta * (t1 - t0));
    s22 *= std::exp(-kI * zeta * (t1 - t0));
    s12 *= std::exp(kI * zeta * (t1 + t0));
    s21 *= std::exp(-kI * zeta * (t1 + t0));
    return {s11, s12, s21, s22};
  }

  /// At an eigenvalue the left Jost solution phi ~ (e^{-i zeta t}, 0) is b
  /// times the right one psi ~ (0, e^{i zeta t}). Each solution is accurate
  /// only until it has passed through its decay, so phi / psi is constant on
  /// a single stretch; b is read where that ratio is flattest.
  Complex bound_state_ratio(Complex zeta) const {
    const std::size_t n = q_.size();
    const double t0 = t_first_ - 0.5 * dt_;
    const double t1 = t_first_ + (static_cast<double>(n) - 0.5) * dt_;
    std::vector<std::array<Complex, 2>> phi(n + 1), psi(n + 1);
    phi[0] = {std::exp(-kI * zeta * t0), 0.0};
    for (std::size_t j = 0; j < n; ++j) phi[j + 1] = apply(q_[j], zeta, dt_, phi[j]);
    psi[n] = {0.0, std::exp(kI * zeta * t1)};
    for (std::size_t j = n; j > 0; --j) psi[j - 1] = apply(q_[j - 1], zeta, -dt_, psi[j]);

    std::vector<Complex> r(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const auto& f = phi[j];
      const auto& g = psi[j];
      r[j] = std::abs(g[0]) > std::abs(g[1]) ? f[0] / g[0] : f[1] / g[1];
    }
    const auto w = static_cast<std::size_t>(
        std::max(1.0, std::round(0.5 / (std::max(zeta.imag(), 1e-3) * dt_))));
    if (n < 2 * w + 1) throw InvalidArgument("signal too short for the bound-state ratio");
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = n / 2;
    for (std::size_t j = w; j + w <= n; ++j) {
      const double d = std::abs(r[j + w] - r[j - w]) / std::abs(r[j]);
      if (d < best) {
        best = d;
        at = j;
      }
    }
    return r[at];
  }

 private:
  std::array<Complex, 2> apply(Complex q, Complex zeta, double dt,
                               const std::array<Complex, 2>& v) const {
    const Complex k = std::sqrt(-zeta * zeta - sigma_ * std::norm(q));
    const Complex ch = std::cosh(k * dt);
    const Complex sh = std::abs(k) > 1e-14 ? std::sinh(k * dt) / k : Complex{dt};
    return {(ch - kI * zeta * sh) * v[0] + sh * q * v[1],
            -sigma_ * std::conj(q) * sh * v[0] + (ch + kI * zeta * sh) * v[1]};
  }

  std::vector<Complex> q_;
  double t_first_;
  double dt_;
  double sigma_;
};

namespace detail {

inline double winding_segment(const std::function<Complex(Complex)>& a, Complex z0, Complex z1,
                              Complex a0, Complex a1, int depth) {
  const double d = std::arg(a1 / a0);
  if (std::abs(d) < 0.5 || depth > 30) return d;
  const Complex zm = 0.5 * (z0 + z1);
  const Complex am = a(zm);
  return winding_segment(a, z0, zm, a0, am, depth + 1) + winding_segment(a, zm, z1, am, a1, depth + 1);
}

// Number of zeros of a inside the rectangle [x0, x1] x [y0, y1].
inline int zero_count(const std::function<Complex(Complex)>& a, double x0, double x1, double y0,
                      double y1) {
  const std::array<Complex, 5> c{Complex{x0, y0}, Complex{x1, y0}, Complex{x1, y1},
                                 Complex{x0, y1}, Complex{x0, y0}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    constexpr int kPieces = 16;
    Complex zp = c[e], ap = a(zp);
    for (int i = 1; i <= kPieces; ++i) {
      const Complex zn = c[e] + (c[e + 1] - c[e]) * (static_cast<double>(i) / kPieces);
      const Complex an = a(zn);
      total += winding_segment(a, zp, zn, ap, an, 0);
      zp = zn;
      ap = an;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace detail

/// Complex zeros of a(zeta) in a rectangle of the upper half-plane: the
/// rectangle is split until each piece holds one zero by the argument
/// principle, then Newton polishes it. `count_fn` (a cheaper approximation
/// of a, same zeros) drives the counting when given.
inline std::vector<Complex> find_zeros(const std::function<Complex(Complex)>& a, double x0, double x1,
                                       double y0, double y1, double tol = 1e-13,
                                       std::function<Complex(Complex)> count_fn = {}) {
  if (!count_fn) count_fn = a;
  std::vector<Complex> out;
  auto newton = [&](Complex z) {
    const double step = 1e-6 * std::max(1.0, std::abs(z));
    for (int it = 0; it < 100; ++it) {
      const Complex f = a(z);
      const Complex df = (a(z + step) - a(z - step)) / (2.0 * step);
      const Complex dz = f / df;
      z -= dz;
      if (std::abs(dz) < tol * std::max(1.0, std::abs(z))) break;
    }
    return z;
  };
  std::function<void(double, double, double, double, int, int)> rec =
      [&](double ax, double bx, double ay, double by, int n, int depth) {
        if (n <= 0) return;
        if (n == 1) {
          const Complex z = newton(Complex{0.5 * (ax + bx), 0.5 * (ay + by)});
          const double mx = 1e-6 * (bx - ax), my = 1e-6 * (by - ay);
          if (z.real() >= ax - mx && z.real() <= bx + mx && z.imag() >= ay - my &&
              z.imag() <= by + my) {
            out.push_back(z);
            return;
          }
          // Newton escaped the box: shrink it first
        }
        if (depth > 40)
          throw Error("eigenvalue search did not separate " + std::to_string(n) + " zeros in [" +
                      std::to_string(ax) + ", " + std::to_string(bx) + "] x [" +
                      std::to_string(ay) + ", " + std::to_string(by) + "]");
        // split off-centre so that a zero on the cut line is unlikely
        if (bx - ax >= by - ay) {
          const double m = ax + 0.5123 * (bx - ax);
          const int nl = detail::zero_count(count_fn, ax, m, ay, by);
          rec(ax, m, ay, by, nl, depth + 1);
          rec(m, bx, ay, by, n - nl, depth + 1);
        } else {
          const double m = ay + 0.5123 * (by - ay);
          const int nl = detail::zero_count(count_fn, ax, bx, ay, m);
          rec(ax, bx, ay, m, nl, depth + 1);
          rec(ax, bx, m, by, n - nl, depth + 1);
        }
      };
  rec(x0, x1, y0, y1, detail::zero_count(count_fn, x0, x1, y0, y1), 0);
  std::sort(out.begin(), out.end(), [](Complex u, Complex v) { return u.imag() > v.imag(); });
  return out;
}

/// Left and right spectral data of q sampled on [ta, tb] with step dt. With
/// Richardson extrapolation the transfer matrix is also computed at dt/2,
/// which needs the signal as a function.
inline SpectralPair forward_scatter_pair(const std::function<Complex(double)>& q, double ta,
                                         double tb, double dt, Dispersion disp,
                                         const ScatterOptions& opt = {}) {
  if (!(tb > ta) || !(dt > 0.0)) throw InvalidArgument("bad scattering interval");
  if (std::abs(q(ta)) > 1e-8 || std::abs(q(tb)) > 1e-8)
    throw InvalidArgument("signal does not decay at the ends of the interval");

  auto sample = [&](double step) {
    const auto n = static_cast<std::size_t>(std::llround((tb - ta) / step));
    std::vector<Complex> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = q(ta + (static_cast<double>(j) + 0.5) * step);
    return ZsScatterer(std::move(v), ta + 0.5 * step, step, disp);
  };
  const ZsScatterer coarse = sample(dt);
  const ZsScatterer fine = opt.richardson ? sample(0.5 * dt) : coarse;
  auto S = [&](Complex zeta) -> Monodromy {
    if (!opt.richardson) return coarse.monodromy(zeta);
    const Monodromy c = coarse.monodromy(zeta), f = fine.monodromy(zeta);
    Monodromy r;
    for (int i = 0; i < 4; ++i) r[i] = (4.0 * f[i] - c[i]) / 3.0;
    return r;
  };

  double qmax = 0.0;
  for (double t = ta; t <= tb; t += dt) qmax = std::max(qmax, std::abs(q(t)));

  SpectralData l, r;
  l.side = Side::Left;
  r.side = Side::Right;
  ContinuousSpectrum cl, cr;
  cl.xi0 = cr.xi0 = opt.xi0;
  cl.dxi = cr.dxi = opt.dxi;
  cl.values.resize(opt.xi_count);
  cr.values.resize(opt.xi_count);
  for (std::size_t k = 0; k < opt.xi_count; ++k) {
    const Monodromy m = S(Complex{cl.xi(k), 0.0});
    cl.values[k] = -m[1] / m[0];
    cr.values[k] = -m[2] / m[0];
  }
  l.continuous = std::move(cl);
  r.continuous = std::move(cr);

  if (disp == Dispersion::Anomalous && opt.find_eigenvalues) {
    auto a = [&](Complex z) { return S(z)[0]; };
    auto a_coarse = [&](Complex z) { return coarse.monodromy(z)[0]; };
    const double X = opt.search_xi > 0.0 ? opt.search_xi : 2.0 * qmax + 1.0;
    const double Y = opt.search_eta_max > 0.0 ? opt.search_eta_max : qmax + 1.0;
    for (Complex z : find_zeros(a, -X, X, opt.search_eta_min, Y, opt.newton_tol, a_coarse)) {
      const double step = 1e-5 * std::max(1.0, std::abs(z));
      const Complex ap = (a(z + step) - a(z - step)) / (2.0 * step);
      Complex b = coarse.bound_state_ratio(z);
      if (opt.richardson) b = (4.0 * fine.bound_state_ratio(z) - b) / 3.0;
      // l_n = 1 / (b_n a'(zeta_n)),  r_n = -b_n / a'(zeta_n)
      l.discrete.push_back({z, 1.0 / (b * ap)});
      r.discrete.push_back({z, -b / ap});
    }
  }
  // the focusing sign holds even when no eigenvalue is found
  l.sign_mode = r.sign_mode =
      disp == Dispersion::Anomalous ? SignMode::WithDiscrete : SignMode::ContinuousOnly;
  return {std::move(l), std::move(r)};
}

/// One side of forward_scatter_pair.
inline SpectralData forward_scatter(const std::function<Complex(double)>& q, double ta, double tb,
                                    double dt, Dispersion disp, Side side,
                                    const ScatterOptions& opt = {}) {
  return forward_scatter_pair(q, ta, tb, dt, disp, opt).get(side);
}

/// Scattering of a sampled signal, one cell per sample, no extrapolation.
inline SpectralData forward_scatter(const RecoveredSignal& s, Dispersion disp, Side side,
                                    ScatterOptions opt = {}) {
  if (s.size() < 2) throw InvalidArgument("signal too short to scatter");
  if (std::abs(s.q.front()) > 1e-8 || std::abs(s.q.back()) > 1e-8)
    throw InvalidArgument("signal does not decay at the ends of the grid");
  const TimeGrid g = s.grid;
  const std::vector<Complex> v = s.q;
  auto f = [&](double t) {
    return v[g.nearest(t)];
  };
  opt.richardson = false;
  return forward_scatter(f, g.t0 - 0.5 * g.tau, g.back() + 0.5 * g.tau, g.tau, disp, side, opt);
}

// ---------------------------------------------------------------------------
// Dense solve

struct DenseSystem {
  Eigen::MatrixXcd A;
  Eigen::VectorXcd b;
};

/// Materializes [[I, -/+ h T^H], [h T, I]] and the right-hand side.
inline DenseSystem dense_system(const GlmeSystem& sys) {
  if (sys.M > 512) throw InvalidArgument("dense solve limited to M <= 512");
  const auto M = static_cast<Eigen::Index>(sys.M);
  const double s = sign_factor(sys.sign);
  DenseSystem d{Eigen::MatrixXcd::Identity(2 * M, 2 * M), Eigen::VectorXcd::Zero(2 * M)};
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      d.A(i, M + j) = s * sys.h * std::conj(sys.generator(static_cast<std::ptrdiff_t>(j - i)));
      d.A(M + i, j) = sys.h * sys.generator(static_cast<std::ptrdiff_t>(i - j));
    }
    d.b(M + i) = sys.rhs[static_cast<std::size_t>(i)];
  }
  return d;
}

/// LU with partial pivoting of the dense system. Test oracle only.
inline GlmeSolution dense_solve(const GlmeSystem& sys) {
  const DenseSystem d = dense_system(sys);
  const auto M = static_cast<Eigen::Index>(sys.M);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d.A);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
    throw Error("dense GLME matrix is singular");
  const Eigen::VectorXcd x = lu.solve(d.b);
  GlmeSolution out;
  for (Eigen::Index i = 0; i < M; ++i) {
    out.x1.push_back(x(i));
    out.y2.push_back(x(M + i));
  }
  out.q_at_t = potential_from_y2(sys.side, sys.sign, out.y2.back());
  return out;
}

/// ||A x - b|| / ||b|| of a solution in the dense system.
inline double dense_residual(const GlmeSystem& sys, const GlmeSolution& sol) {
  const DenseSystem d = dense_system(sys);
  const auto M = static_cast<Eigen::Index>(sys.M);
  Eigen::VectorXcd x(2 * M);
  for (Eigen::Index i = 0; i < M; ++i) {
    x(i) = sol.x1[static_cast<std::size_t>(i)];
    x(M + i) = sol.y2[static_cast<std::size_t>(i)];
  }
  const double nb = d.b.norm();
  return (d.A * x - d.b).norm() / (nb > 0.0 ? nb : 1.0);
}

}  // namespace gtib
