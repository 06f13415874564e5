#pragma once

// Discretized Gelfand-Levitan-Marchenko equations and their block-Toeplitz
// solution by a block Levinson recursion.
//
// For the left equations at recovery point t with window P = M h the unknowns
// x1_k = X1(k h, t), y2_k = Y2(k h, t), k = 1..M satisfy
//
//   x1 + s h T^H y2 = 0,      h T x1 + y2 = F,
//   T_ij = Omega(c + (i - j) h),  F_m = Omega(c + m h),  c = 2 t - P,
//
// with s = -1 when discrete spectrum is present and s = +1 otherwise, and
// q(t) = -2 y2_M. Interleaving (x1_k, y2_k) gives a block-Toeplitz matrix
// with 2x2 blocks
//
//   B_d = [[delta_d0, s h conj(g_{-d})], [h g_d, delta_d0]],  g_k = Omega(c + k h).
//
// Growing the system by one block with c held fixed moves the recovery point
// by h/2 and extends the window by h; that is exactly one Levinson step. A
// march therefore never re-solves: it continues the recursion.
//
// The right equations map onto the same form through t -> -t with the
// kernel Omega_r(-z); the recovered value is then q(t) = -2 s conj(y2_M).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtib/common.hpp"
#include "gtib/spectral.hpp"

namespace gtib {

/// 2x2 complex block [[a, b], [c, d]].
struct Block {
  Complex a, b, c, d;

  static Block identity() { return {1.0, 0.0, 0.0, 1.0}; }

  friend Block operator*(const Block& x, const Block& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Block operator+(const Block& x, const Block& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Block operator-(const Block& x, const Block& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  Block& operator+=(const Block& y) {
    a += y.a; b += y.b; c += y.c; d += y.d;
    return *this;
  }

  Complex det() const { return a * d - b * c; }

  Block inverse() const {
    const Complex D = det();
    return {d / D, -b / D, -c / D, a / D};
  }

  /// Singular values (min, max).
  std::pair<double, double> singular_values() const {
    const double f2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    const double dt = std::abs(det());
    const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * dt * dt));
    const double smax = std::sqrt(0.5 * (f2 + disc));
    const double smin = smax > 0.0 ? dt / smax : 0.0;
    return {smin, smax};
  }
};

struct Vec2 {
  Complex x1, y2;
};

inline Vec2 operator*(const Block& m, const Vec2& v) {
  return {m.a * v.x1 + m.b * v.y2, m.c * v.x1 + m.d * v.y2};
}

inline double sign_factor(SignMode m) { return m == SignMode::WithDiscrete ? -1.0 : 1.0; }

struct LevinsonOptions {
  /// Abort when a 2x2 pivot has smallest singular value below
  /// pivot_factor * eps * max(1, h * running generator max).
  double pivot_factor = 1e3;
  /// With discrete spectrum the system matrix is I + (skew-Hermitian), so
  /// every block of its inverse has norm <= 1. The recursion is declared
  /// unstable once a computed inverse block exceeds 1 + contraction_slack.
  double contraction_slack = 1e-6;
  bool check_contraction = true;
  /// Kernel growth monitor (discrete spectrum only): a soliton term of the
  /// kernel seen from distance d past its center has grown by e^{2 eta d}
  /// relative to the soliton amplitude, so the recursion stops once the
  /// largest generator exceeds e^{2 growth_zone} times the largest |q| seen.
  /// Zero disables the monitor.
  double growth_zone = 6.0;
  /// Stop at divergence-flagged kernel entries. Disabled only for the
  /// deliberately uncut baseline.
  bool honor_divergence_flags = true;
};

/// Supplies generator entries g_k; may throw CutRequired or RangeError.
using GeneratorFeed = std::function<Complex(std::ptrdiff_t)>;

/// Block Levinson recursion for the interleaved GLME system. `size()` blocks
/// have been processed; `advance()` grows the system by one block and costs
/// O(size()) arithmetic.
class BlockLevinson {
 public:
  BlockLevinson(SignMode sign, double h, GeneratorFeed feed, LevinsonOptions opts = {})
      : sign_(sign), s_(sign_factor(sign)), h_(h), feed_(std::move(feed)), opts_(opts) {
    if (!(h > 0.0)) throw InvalidArgument("grid step must be positive");
  }

  std::size_t size() const { return x_.size(); }
  SignMode sign() const { return sign_; }
  double h() const { return h_; }

  /// Solution blocks (x1_k, y2_k), k = 1..size().
  const std::vector<Vec2>& solution() const { return x_; }

  /// Last y2 component; the potential follows from it.
  Complex last_y2() const { return x_.back().y2; }

  /// Generator g_k for |k| < size() plus g_{size()} (right-hand side).
  Complex generator(std::ptrdiff_t k) const {
    return k >= 0 ? gpos_.at(static_cast<std::size_t>(k)) : gneg_.at(static_cast<std::size_t>(-k));
  }
  /// Number of distinct generator entries fetched from the feed so far.
  std::size_t generators_fetched() const { return fetched_; }

  double generator_max() const { return gmax_; }
  /// Largest |q| recovered at any size so far.
  double potential_max() const { return qmax_; }
  const LevinsonOptions& options() const { return opts_; }

  /// Spectral norm of the first block column of the inverse after the last
  /// step (tracked with discrete spectrum only).
  double column_norm() const { return last_column_norm_; }

  void advance() {
    const std::size_t n = size();
    if (n == 0) {
      const Complex g0 = fetch(0);
      const Complex g1 = fetch(1);
      const Block b0 = block(0, g0, g0);
      check_pivot(b0, 0);
      const Block inv = b0.inverse();
      commit_generator(0, g0);
      push_positive(g1);
      f_.push_back(inv);
      x_.push_back(inv * Vec2{0.0, g1});
      qmax_ = 2.0 * std::abs(x_.back().y2);
      return;
    }

    // New generator entries: g_{-n} (matrix) and g_{n+1} (right-hand side).
    const Complex gneg = fetch(-static_cast<std::ptrdiff_t>(n));
    const Complex gnext = fetch(static_cast<std::ptrdiff_t>(n) + 1);
    check_growth(n);

    // E_f = sum_j B_{n-j} F[j];  r = y_n - sum_j B_{n-j} X[j]
    Block ef{0.0, 0.0, 0.0, 0.0};
    Vec2 acc{0.0, 0.0};
    const Complex up_n = s_ * h_ * std::conj(gneg);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = n - j;
      const Complex up = d == n ? up_n : up_[d];
      const Complex lo = lo_[d];
      const Block& f = f_[j];
      ef.a += up * f.c;
      ef.b += up * f.d;
      ef.c += lo * f.a;
      ef.d += lo * f.b;
      acc.x1 += up * x_[j].y2;
      acc.y2 += lo * x_[j].x1;
    }
    const Vec2 r{-acc.x1, gnext - acc.y2};
    const Block eb = mirror(conj(ef));

    const Block I = Block::identity();
    const Block pa = I - eb * ef;
    const Block pd = I - ef * eb;
    check_pivot(pa, n);
    check_pivot(pd, n);
    const Block alpha = pa.inverse();
    const Block beta = Block{0.0, 0.0, 0.0, 0.0} - ef * alpha;
    // s beta, so that mirror(conj(F)) beta needs no sign products
    const Block sbeta{s_ * beta.a, s_ * beta.b, s_ * beta.c, s_ * beta.d};

    // F'[j] = F[j] alpha + G[j-1] beta, with G[i] = mirror(conj(F[n-1-i])).
    std::vector<Block>& fn = scratch_;
    fn.resize(n + 1);
    double g11 = 0.0, g22 = 0.0;
    Complex g12 = 0.0;
    auto tail = [&](const Block& m) {  // mirror(conj(m)) * beta
      const Complex a = std::conj(m.a), b = std::conj(m.b), c = std::conj(m.c), d = std::conj(m.d);
      return Block{d * beta.a + c * sbeta.c, d * beta.b + c * sbeta.d,
                   b * sbeta.a + a * beta.c, b * sbeta.b + a * beta.d};
    };
    for (std::size_t j = 0; j <= n; ++j) {
      Block v = j < n ? f_[j] * alpha : Block{0.0, 0.0, 0.0, 0.0};
      if (j >= 1) v += tail(f_[n - j]);
      fn[j] = v;
      g11 += std::norm(v.a) + std::norm(v.c);
      g22 += std::norm(v.b) + std::norm(v.d);
      g12 += std::conj(v.a) * v.b + std::conj(v.c) * v.d;
    }
    if (opts_.check_contraction && sign_ == SignMode::WithDiscrete) {
      // largest eigenvalue of the Gram matrix of the first block column
      const double tr = 0.5 * (g11 + g22);
      const double lam = tr + std::sqrt(0.25 * (g11 - g22) * (g11 - g22) + std::norm(g12));
      last_column_norm_ = std::sqrt(lam);
      if (lam > (1.0 + opts_.contraction_slack) * (1.0 + opts_.contraction_slack))
        throw InstabilityError("block Levinson lost contraction at step " + std::to_string(n), n);
    }
    // X'[j] = X[j] + G'[j] r, with G'[j] = mirror(conj(F'[n-j])).
    x_.push_back(Vec2{0.0, 0.0});
    for (std::size_t j = 0; j <= n; ++j) {
      const Vec2 u = mirror(conj(fn[n - j])) * r;
      x_[j].x1 += u.x1;
      x_[j].y2 += u.y2;
    }
    f_.swap(fn);
    commit_generator(-static_cast<std::ptrdiff_t>(n), gneg);
    push_positive(gnext);
    qmax_ = std::max(qmax_, 2.0 * std::abs(x_.back().y2));
  }

 private:
  static Block conj(const Block& m) {
    return {std::conj(m.a), std::conj(m.b), std::conj(m.c), std::conj(m.d)};
  }

  // Q^{-1} M Q for the exchange Q that maps B_{-d} onto conj(B_d).
  Block mirror(const Block& m) const { return {m.d, s_ * m.c, s_ * m.b, m.a}; }

  Block block(std::ptrdiff_t d, Complex gd, Complex gmd) const {
    const Complex diag = d == 0 ? Complex{1.0} : Complex{0.0};
    return {diag, s_ * h_ * std::conj(gmd), h_ * gd, diag};
  }

  Complex fetch(std::ptrdiff_t k) {
    const Complex v = feed_(k);
    ++fetched_;
    gmax_ = std::max(gmax_, std::abs(v));
    return v;
  }

  void commit_generator(std::ptrdiff_t k, Complex v) {
    if (k == 0) push_positive(v);
    gneg_.push_back(v);
    up_.push_back(s_ * h_ * std::conj(v));
  }

  void push_positive(Complex v) {
    gpos_.push_back(v);
    lo_.push_back(h_ * v);
  }

  void check_growth(std::size_t step) const {
    if (sign_ != SignMode::WithDiscrete || !(opts_.growth_zone > 0.0) || !(qmax_ > 0.0)) return;
    if (gmax_ > std::exp(2.0 * opts_.growth_zone) * qmax_)
      throw InstabilityError("kernel left the stability zone at step " + std::to_string(step), step);
  }

  void check_pivot(const Block& p, std::size_t step) const {
    const double scale = std::max(1.0, h_ * gmax_);
    const double tol = opts_.pivot_factor * std::numeric_limits<double>::epsilon() * scale;
    const double smin = p.singular_values().first;
    if (!(smin >= tol))
      throw InstabilityError("near-singular block pivot at step " + std::to_string(step), step);
  }

  SignMode sign_;
  double s_;
  double h_;
  GeneratorFeed feed_;
  LevinsonOptions opts_;
  std::vector<Complex> gpos_;  // g_0, g_1, ..., g_{n}
  std::vector<Complex> gneg_;  // g_0, g_{-1}, ..., g_{-(n-1)}
  std::vector<Complex> up_;    // s h conj(g_{-d}), matching gneg_
  std::vector<Complex> lo_;    // h g_d, matching gpos_
  std::vector<Block> f_;       // forward vector, R_n F = [I 0 ... 0]^T
  std::vector<Block> scratch_;
  std::vector<Vec2> x_;
  std::size_t fetched_ = 0;
  double gmax_ = 0.0;
  double last_column_norm_ = 0.0;
  double qmax_ = 0.0;
};

// ---------------------------------------------------------------------------
// Systems at a fixed recovery point

struct GlmeSystem {
  Side side = Side::Left;
  double t = 0.0;
  double P = 0.0;
  std::size_t M = 0;
  double h = 0.0;
  SignMode sign = SignMode::WithDiscrete;
  /// g_k for k = -(M-1)..(M-1), stored at index k + M - 1.
  std::vector<Complex> generators;
  /// F_m for m = 1..M.
  std::vector<Complex> rhs;
  /// Source table; needed to enlarge the window.
  std::shared_ptr<const KernelTable> kernel;

  Complex generator(std::ptrdiff_t k) const {
    return generators.at(static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(M) - 1));
  }

  /// Kernel argument of g_k in the table's own z coordinate.
  double argument(std::ptrdiff_t k) const {
    const double kh = static_cast<double>(k) * h;
    return side == Side::Left ? 2.0 * t - P + kh : 2.0 * t + P - kh;
  }
};

struct GlmeSolution {
  std::vector<Complex> x1;
  std::vector<Complex> y2;
  Complex q_at_t;
};

/// Potential from the last y2 entry of the left-form system.
inline Complex potential_from_y2(Side side, SignMode sign, Complex y2_last) {
  return side == Side::Left ? -2.0 * y2_last : -2.0 * sign_factor(sign) * std::conj(y2_last);
}

/// Builds the system at recovery point t with window P split into M steps.
/// Every argument is an exact table lookup.
inline GlmeSystem assemble(std::shared_ptr<const KernelTable> kernel, double t, double P,
                           std::size_t M, SignMode sign, bool honor_flags = true) {
  if (!kernel) throw InvalidArgument("assemble needs a kernel table");
  if (M < 1) throw InvalidArgument("system needs at least one step");
  if (!(P > 0.0)) throw InvalidArgument("window length must be positive");
  GlmeSystem sys;
  sys.side = kernel->side();
  sys.t = t;
  sys.P = P;
  sys.M = M;
  sys.sign = sign;
  sys.kernel = kernel;
  if (std::abs(P / static_cast<double>(M) - kernel->dz()) > 1e-9 * kernel->dz())
    throw RangeError("grid step does not match the kernel table step");
  sys.h = kernel->dz();

  const auto Mi = static_cast<std::ptrdiff_t>(M);
  auto lookup = [&](std::ptrdiff_t k) {
    const std::ptrdiff_t idx = kernel->index_of(sys.argument(k));
    if (honor_flags && kernel->divergent(idx))
      throw CutRequired("divergent kernel entry at z = " + std::to_string(kernel->z(idx)), idx);
    return (*kernel)[idx];
  };
  sys.generators.reserve(2 * M - 1);
  for (std::ptrdiff_t k = -(Mi - 1); k <= Mi - 1; ++k) sys.generators.push_back(lookup(k));
  sys.rhs.reserve(M);
  for (std::ptrdiff_t m = 1; m <= Mi; ++m)
    sys.rhs.push_back(m < Mi ? sys.generator(m) : lookup(m));
  return sys;
}

/// Generator feed over a system's stored entries (g_M is the last rhs entry).
inline GeneratorFeed system_feed(const GlmeSystem& sys) {
  return [&sys](std::ptrdiff_t k) -> Complex {
    const auto Mi = static_cast<std::ptrdiff_t>(sys.M);
    if (k == Mi) return sys.rhs.back();
    if (k <= -Mi || k >= Mi) throw RangeError("generator index outside the system");
    return sys.generator(k);
  };
}

/// Solves the system by running the block recursion from one block up to M.
inline GlmeSolution solve(const GlmeSystem& sys, LevinsonOptions opts = {}) {
  BlockLevinson lev(sys.sign, sys.h, system_feed(sys), opts);
  for (std::size_t n = 0; n < sys.M; ++n) lev.advance();
  GlmeSolution sol;
  sol.x1.reserve(sys.M);
  sol.y2.reserve(sys.M);
  for (const auto& v : lev.solution()) {
    sol.x1.push_back(v.x1);
    sol.y2.push_back(v.y2);
  }
  sol.q_at_t = potential_from_y2(sys.side, sys.sign, sol.y2.back());
  return sol;
}

/// Same recovery point t with the window enlarged by `extra` steps; the march
/// then starts `extra` half-steps earlier (left) or later (right).
inline GlmeSystem extend_start(const GlmeSystem& sys, std::size_t extra) {
  if (extra == 0) return sys;
  return assemble(sys.kernel, sys.t, sys.P + static_cast<double>(extra) * sys.h, sys.M + extra,
                  sys.sign);
}

// ---------------------------------------------------------------------------
// Marching

enum class MarchDirection { RightwardLeftGlme, LeftwardRightGlme };

inline MarchDirection direction_for(Side side) {
  return side == Side::Left ? MarchDirection::RightwardLeftGlme
                            : MarchDirection::LeftwardRightGlme;
}

struct MarchSample {
  double t;
  Complex q;
};

enum class MarchStop { Completed, CutBoundary, Instability, KernelRange };

inline const char* to_string(MarchStop s) {
  switch (s) {
    case MarchStop::Completed: return "completed";
    case MarchStop::CutBoundary: return "cut_boundary";
    case MarchStop::Instability: return "instability";
    case MarchStop::KernelRange: return "kernel_range";
  }
  return "?";
}

struct MarchResult {
  std::vector<MarchSample> samples;
  MarchStop stop = MarchStop::Completed;
  std::size_t failed_step = 0;
  std::string message;
};

/// Recursion state of one march. Not shareable; may be moved between threads.
class MarchState {
 public:
  /// State with a single block, recovery point `t_first`.
  MarchState(std::shared_ptr<const KernelTable> kernel, SignMode sign, double t_first,
             LevinsonOptions opts = {})
      : kernel_(std::move(kernel)),
        t_first_(t_first),
        lev_(sign, require(kernel_)->dz(), feed(opts.honor_divergence_flags), opts) {
    lev_.advance();
  }

  /// State positioned at the system's recovery point after solving it.
  static MarchState from_system(const GlmeSystem& sys, LevinsonOptions opts = {}) {
    const double tau = 0.5 * sys.h;
    const double back = static_cast<double>(sys.M - 1) * tau;
    const double t_first = sys.side == Side::Left ? sys.t - back : sys.t + back;
    MarchState st(sys.kernel, sys.sign, t_first, opts);
    for (std::size_t n = 1; n < sys.M; ++n) st.lev_.advance();
    return st;
  }

  MarchDirection direction() const { return direction_for(kernel_->side()); }
  std::size_t step_count() const { return lev_.size() - 1; }
  double tau() const { return 0.5 * kernel_->dz(); }

  double t() const {
    const double off = static_cast<double>(lev_.size() - 1) * tau();
    return kernel_->side() == Side::Left ? t_first_ + off : t_first_ - off;
  }
  Complex q() const { return potential_from_y2(kernel_->side(), lev_.sign(), lev_.last_y2()); }

  const BlockLevinson& recursion() const { return lev_; }

  /// Advances one half-step; throws on cut boundary, range end or instability.
  void advance() { lev_.advance(); }

 private:
  static const std::shared_ptr<const KernelTable>& require(
      const std::shared_ptr<const KernelTable>& k) {
    if (!k) throw InvalidArgument("march needs a kernel table");
    return k;
  }

  GeneratorFeed feed(bool honor_flags) {
    // Left: g_k = Omega_l(c + k h), c = 2 t_first - h.
    // Right: g_k = Omega_r(2 t_first + h - k h).
    const KernelTable* tab = require(kernel_).get();
    const double h = tab->dz();
    const bool left = tab->side() == Side::Left;
    const double z_anchor = left ? 2.0 * t_first_ - h : 2.0 * t_first_ + h;
    const std::ptrdiff_t i0 = tab->index_of(z_anchor);
    const std::ptrdiff_t o = left ? 1 : -1;
    return [tab, i0, o, honor_flags](std::ptrdiff_t k) -> Complex {
      const std::ptrdiff_t idx = i0 + o * k;
      if (!tab->contains(idx)) throw RangeError("march ran past the kernel table");
      if (honor_flags && tab->divergent(idx))
        throw CutRequired("divergent kernel entry at z = " + std::to_string(tab->z(idx)), idx);
      return (*tab)[idx];
    };
  }

  std::shared_ptr<const KernelTable> kernel_;
  double t_first_;
  BlockLevinson lev_;
};

/// Emits the current point and `steps` further half-steps. Stops early, with
/// the samples gathered so far, when a flagged entry, the table end or an
/// unstable pivot is reached.
inline MarchResult march(MarchState& state, std::size_t steps) {
  MarchResult res;
  res.samples.reserve(steps + 1);
  res.samples.push_back({state.t(), state.q()});
  for (std::size_t i = 0; i < steps; ++i) {
    try {
      state.advance();
    } catch (const CutRequired& e) {
      res.stop = MarchStop::CutBoundary;
      res.failed_step = i + 1;
      res.message = e.what();
      return res;
    } catch (const RangeError& e) {
      res.stop = MarchStop::KernelRange;
      res.failed_step = i + 1;
      res.message = e.what();
      return res;
    } catch (const InstabilityError& e) {
      res.stop = MarchStop::Instability;
      res.failed_step = i + 1;
      res.message = e.what();
      return res;
    }
    res.samples.push_back({state.t(), state.q()});
  }
  return res;
}

}  // namespace gtib
