#pragma once

// Spectral data for the Zakharov-Shabat problem and synthesis of the
// Marchenko kernels
//
//   Omega_l(z) = 1/(2 pi) Int l(xi) e^{-i xi z} dxi - i Sum_n l_n e^{-i zeta_n z}
//   Omega_r(z) = 1/(2 pi) Int r(xi) e^{+i xi z} dxi - i Sum_n r_n e^{+i zeta_n z}
//
// The continuous integral is evaluated with the trapezoidal rule on the
// supplied xi grid; its step and extent bound the kernel error.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gtib/common.hpp"

namespace gtib {

struct DiscreteEigenvalue {
  Complex zeta;     // xi + i eta, eta > 0
  Complex norming;  // l_n or r_n depending on the side of the data

  double eta() const { return zeta.imag(); }
  double xi() const { return zeta.real(); }
};

struct ContinuousSpectrum {
  double xi0 = 0.0;
  double dxi = 0.0;
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
  double xi(std::size_t k) const { return xi0 + static_cast<double>(k) * dxi; }
};

struct SpectralData {
  Side side = Side::Left;
  std::optional<ContinuousSpectrum> continuous;
  std::vector<DiscreteEigenvalue> discrete;
  SignMode sign_mode = SignMode::WithDiscrete;

  std::size_t soliton_count() const { return discrete.size(); }

  double max_eta() const {
    double m = 0.0;
    for (const auto& d : discrete) m = std::max(m, d.eta());
    return m;
  }
};

/// Entries whose magnitude exceeds this are flagged as divergent and must be
/// cut before they enter a linear system (1/sqrt(machine epsilon)).
inline const double kDivergenceThreshold =
    1.0 / std::sqrt(std::numeric_limits<double>::epsilon());

/// Throws InvalidArgument when `data` violates the SpectralData invariants.
inline void validate(const SpectralData& data) {
  const bool has_cont = data.continuous.has_value() && !data.continuous->values.empty();
  if (!has_cont && data.discrete.empty())
    throw InvalidArgument("spectral data has neither continuous nor discrete part");
  if (!data.discrete.empty() && data.sign_mode != SignMode::WithDiscrete)
    throw InvalidArgument("discrete eigenvalues require the with_discrete sign mode");
  for (std::size_t n = 0; n < data.discrete.size(); ++n) {
    const auto& d = data.discrete[n];
    if (!(d.eta() > 0.0))
      throw InvalidArgument("eigenvalue " + std::to_string(n) + " is not in the upper half-plane");
    if (d.norming == Complex{0.0, 0.0})
      throw InvalidArgument("eigenvalue " + std::to_string(n) + " has a zero norming constant");
  }
  if (data.continuous) {
    const auto& c = *data.continuous;
    if (!c.values.empty() && !(c.dxi > 0.0))
      throw InvalidArgument("continuous spectrum needs a positive xi step");
  }
}

/// Left and right data of one potential. GTIBL needs the left set, GTIBR
/// the right one.
struct SpectralPair {
  std::optional<SpectralData> left;
  std::optional<SpectralData> right;

  bool has(Side s) const { return s == Side::Left ? left.has_value() : right.has_value(); }
  const SpectralData& get(Side s) const {
    const auto& d = s == Side::Left ? left : right;
    if (!d) throw InvalidArgument(std::string("no ") + to_string(s) + " spectral data supplied");
    return *d;
  }
  /// Either set, left preferred.
  const SpectralData& any() const { return left ? *left : get(Side::Right); }
};

/// Sign mode implied by the presence of discrete eigenvalues.
inline SignMode default_sign_mode(const std::vector<DiscreteEigenvalue>& discrete) {
  return discrete.empty() ? SignMode::ContinuousOnly : SignMode::WithDiscrete;
}

/// Uniformly sampled kernel Omega(z0 + k dz), k = 0..count-1.
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(double z0, double dz, std::vector<Complex> values, Side side = Side::Left)
      : side_(side), z0_(z0), dz_(dz), values_(std::move(values)), divergent_(values_.size(), false) {
    for (std::size_t k = 0; k < values_.size(); ++k)
      divergent_[k] = !std::isfinite(std::abs(values_[k])) ||
                      std::abs(values_[k]) > kDivergenceThreshold;
  }

  Side side() const { return side_; }
  double z0() const { return z0_; }
  double dz() const { return dz_; }
  std::size_t size() const { return values_.size(); }
  double z(std::ptrdiff_t k) const { return z0_ + static_cast<double>(k) * dz_; }

  bool contains(std::ptrdiff_t k) const {
    return k >= 0 && k < static_cast<std::ptrdiff_t>(values_.size());
  }
  bool divergent(std::ptrdiff_t k) const { return divergent_[static_cast<std::size_t>(k)]; }
  Complex operator[](std::ptrdiff_t k) const { return values_[static_cast<std::size_t>(k)]; }

  std::span<const Complex> values() const { return values_; }

  bool any_divergent() const {
    return std::any_of(divergent_.begin(), divergent_.end(), [](bool b) { return b; });
  }

  /// Index of the grid-aligned argument z. Throws RangeError when z is not
  /// on the table grid or outside it.
  std::ptrdiff_t index_of(double z) const {
    const double u = (z - z0_) / dz_;
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-6)
      throw RangeError("kernel argument " + std::to_string(z) + " is not grid-aligned");
    const auto k = static_cast<std::ptrdiff_t>(r);
    if (!contains(k)) throw RangeError("kernel argument " + std::to_string(z) + " outside table");
    return k;
  }

 private:
  Side side_ = Side::Left;
  double z0_ = 0.0;
  double dz_ = 1.0;
  std::vector<Complex> values_;
  std::vector<bool> divergent_;
};

namespace detail {

// +1 for the left kernel (e^{-i zeta z}), -1 for the right one.
inline double kernel_orientation(Side s) { return s == Side::Left ? 1.0 : -1.0; }

inline std::vector<Complex> synthesize(const SpectralData& data, double z0, double dz,
                                       std::size_t count) {
  const double o = kernel_orientation(data.side);
  std::vector<Complex> out(count, Complex{});

  if (data.continuous && !data.continuous->values.empty()) {
    const auto& c = *data.continuous;
    const std::size_t n = c.size();
    for (std::size_t j = 0; j < n; ++j) {
      double w = c.dxi / (2.0 * M_PI);
      if (n > 1 && (j == 0 || j + 1 == n)) w *= 0.5;
      const double xi = c.xi(j);
      // e^{-i o xi (z0 + k dz)} by recurrence in k, re-anchored periodically
      const Complex step = std::polar(1.0, -o * xi * dz);
      Complex phase;
      const Complex weight = w * c.values[j];
      for (std::size_t k = 0; k < count; ++k) {
        if (k % 256 == 0) phase = std::polar(1.0, -o * xi * (z0 + static_cast<double>(k) * dz));
        out[k] += weight * phase;
        phase *= step;
      }
    }
  }

  for (const auto& d : data.discrete) {
    const Complex a = -o * kI * d.zeta;  // exponent rate
    const double log_norm = std::log(std::abs(d.norming));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = z0 + static_cast<double>(k) * dz;
      const Complex e = a * z;
      // guard against overflow: mark as infinite, the table flags it
      if (e.real() + log_norm > 700.0) {
        out[k] = Complex{std::numeric_limits<double>::infinity(), 0.0};
        continue;
      }
      out[k] += -kI * d.norming * std::exp(e);
    }
  }
  return out;
}

}  // namespace detail

/// Omega_l sampled at z0 + k dz. Divergent entries are flagged, not fatal.
inline KernelTable kernel_left(const SpectralData& data, double z0, double dz, std::size_t count) {
  if (data.side != Side::Left) throw InvalidArgument("kernel_left needs left spectral data");
  if (count < 1) throw InvalidArgument("kernel table needs at least one entry");
  if (!(dz > 0.0)) throw InvalidArgument("kernel step must be positive");
  return KernelTable(z0, dz, detail::synthesize(data, z0, dz, count), Side::Left);
}

/// Omega_r sampled at z0 + k dz.
inline KernelTable kernel_right(const SpectralData& data, double z0, double dz, std::size_t count) {
  if (data.side != Side::Right) throw InvalidArgument("kernel_right needs right spectral data");
  if (count < 1) throw InvalidArgument("kernel table needs at least one entry");
  if (!(dz > 0.0)) throw InvalidArgument("kernel step must be positive");
  return KernelTable(z0, dz, detail::synthesize(data, z0, dz, count), Side::Right);
}

inline KernelTable kernel(const SpectralData& data, double z0, double dz, std::size_t count) {
  return data.side == Side::Left ? kernel_left(data, z0, dz, count)
                                 : kernel_right(data, z0, dz, count);
}

/// Keeps only the eigenvalues listed in `active` (0-based); the continuous
/// part and the remaining norming constants are untouched.
inline SpectralData restrict_solitons(const SpectralData& data,
                                      const std::vector<std::size_t>& active) {
  std::set<std::size_t> keep(active.begin(), active.end());
  for (auto i : keep)
    if (i >= data.discrete.size())
      throw InvalidArgument("active soliton index " + std::to_string(i) + " out of range");
  const bool has_cont = data.continuous.has_value() && !data.continuous->values.empty();
  if (keep.empty() && !has_cont) throw InvalidArgument("nothing left to recover after restriction");

  SpectralData out;
  out.side = data.side;
  out.continuous = data.continuous;
  out.sign_mode = data.sign_mode;
  for (auto i : keep) out.discrete.push_back(data.discrete[i]);
  return out;
}

/// Blaschke factor (zeta - zeta_j) / (zeta - conj(zeta_j)).
inline Complex blaschke(Complex zeta, Complex zeta_j) {
  return (zeta - zeta_j) / (zeta - std::conj(zeta_j));
}

/// Removes the solitons in `removed` as a cut: the eigenvalues disappear and
/// every remaining coefficient is multiplied by the squared Blaschke factor
/// of each removed eigenvalue. For left data this yields the data of the
/// potential that remains right of the removed solitons; for right data, the
/// one left of them. Removed solitons must lie on the far side of the kept
/// ones for that reading to hold.
inline SpectralData cut_solitons(const SpectralData& data, const std::vector<std::size_t>& removed) {
  std::set<std::size_t> gone(removed.begin(), removed.end());
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < data.discrete.size(); ++i)
    if (!gone.count(i)) active.push_back(i);
  SpectralData out = restrict_solitons(data, active);
  if (gone.empty()) return out;

  for (auto& d : out.discrete)
    for (auto j : gone) {
      const Complex b = blaschke(d.zeta, data.discrete[j].zeta);
      d.norming *= b * b;
    }
  if (out.continuous) {
    auto& c = *out.continuous;
    for (std::size_t k = 0; k < c.size(); ++k)
      for (auto j : gone) {
        const Complex b = blaschke(Complex{c.xi(k), 0.0}, data.discrete[j].zeta);
        c.values[k] *= b * b;
      }
  }
  return out;
}

}  // namespace gtib
