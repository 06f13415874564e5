#include <gtest/gtest.h>

#include <cmath>

#include "gtib/oracles.hpp"
#include "gtib/spectral.hpp"

using namespace gtib;

namespace {

SpectralData one_eigenvalue(Side side, Complex zeta, Complex norming) {
  SpectralData d;
  d.side = side;
  d.discrete.push_back({zeta, norming});
  return d;
}

}  // namespace

TEST(Kernel, SingleEigenvalueAtOrigin) {
  // -i l e^{-i zeta 0} with l = i gives 1
  const auto l = kernel_left(one_eigenvalue(Side::Left, {0, 1}, {0, 1}), 0.0, 1.0, 1);
  EXPECT_NEAR(std::abs(l[0] - Complex{1.0, 0.0}), 0.0, 1e-15);
  const auto r = kernel_right(one_eigenvalue(Side::Right, {0, 1}, {0, 1}), 0.0, 1.0, 1);
  EXPECT_NEAR(std::abs(r[0] - Complex{1.0, 0.0}), 0.0, 1e-15);
}

TEST(Kernel, DiscreteGrowthDirection) {
  // left kernel grows with z, right kernel with -z
  const auto l = kernel_left(one_eigenvalue(Side::Left, {0.3, 1}, {0, 1}), 0.0, 0.5, 5);
  for (std::size_t k = 0; k < 5; ++k)
    EXPECT_NEAR(std::abs(l[k]), std::exp(0.5 * static_cast<double>(k)), 1e-13);
  const auto r = kernel_right(one_eigenvalue(Side::Right, {0.3, 1}, {0, 1}), -2.0, 0.5, 5);
  for (std::size_t k = 0; k < 5; ++k)
    EXPECT_NEAR(std::abs(r[k]), std::exp(2.0 - 0.5 * static_cast<double>(k)), 1e-13);
}

TEST(Kernel, EmptyContinuousIsZero) {
  SpectralData d;
  d.side = Side::Left;
  d.sign_mode = SignMode::ContinuousOnly;
  d.continuous = ContinuousSpectrum{-1.0, 0.5, std::vector<Complex>(5, Complex{})};
  const auto k = kernel_left(d, -3.0, 0.25, 20);
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_EQ(k[i], Complex{});
}

TEST(Kernel, Linearity) {
  SpectralData a = one_eigenvalue(Side::Left, {0.2, 0.7}, {0.3, -1.1});
  SpectralData b = one_eigenvalue(Side::Left, {-0.4, 1.3}, {2.0, 0.5});
  a.continuous = ContinuousSpectrum{-2.0, 0.1, {}};
  for (int i = 0; i <= 40; ++i) a.continuous->values.push_back({std::cos(i * 0.3), 0.1 * i});
  SpectralData ab = a;
  ab.discrete.push_back(b.discrete[0]);
  const auto ka = kernel_left(a, -1.0, 0.1, 30), kb = kernel_left(b, -1.0, 0.1, 30),
             kab = kernel_left(ab, -1.0, 0.1, 30);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(std::abs(kab[i] - ka[i] - kb[i]), 0.0, 1e-13);
}

TEST(Kernel, RealSymmetricSpectrumGivesRealKernel) {
  // l(-xi) = conj(l(xi)) makes the Fourier integral real
  SpectralData d;
  d.side = Side::Left;
  d.sign_mode = SignMode::ContinuousOnly;
  d.continuous = ContinuousSpectrum{-4.0, 0.05, {}};
  for (int i = 0; i <= 160; ++i) {
    const double xi = -4.0 + 0.05 * i;
    d.continuous->values.push_back({std::exp(-xi * xi), 0.3 * xi * std::exp(-xi * xi)});
  }
  const auto k = kernel_left(d, -5.0, 0.1, 101);
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(k[i].imag(), 0.0, 1e-14);
}

TEST(Kernel, GaussianTransform) {
  // 1/(2 pi) Int e^{-xi^2} e^{-i xi z} dxi = e^{-z^2/4} / (2 sqrt(pi))
  SpectralData d;
  d.side = Side::Left;
  d.sign_mode = SignMode::ContinuousOnly;
  d.continuous = ContinuousSpectrum{-8.0, 0.01, {}};
  for (int i = 0; i <= 1600; ++i) {
    const double xi = -8.0 + 0.01 * i;
    d.continuous->values.push_back(std::exp(-xi * xi));
  }
  const auto k = kernel_left(d, -4.0, 0.25, 33);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double z = k.z(static_cast<std::ptrdiff_t>(i));
    EXPECT_NEAR(std::abs(k[i] - std::exp(-z * z / 4.0) / (2.0 * std::sqrt(M_PI))), 0.0, 1e-13);
  }
}

TEST(Kernel, OverflowIsFlagged) {
  const auto l = kernel_left(one_eigenvalue(Side::Left, {0, 1}, {0, 1}), -100.0, 10.0, 21);
  EXPECT_TRUE(l.any_divergent());
  EXPECT_FALSE(l.divergent(0));
  EXPECT_TRUE(l.divergent(20));
  EXPECT_THROW(l.index_of(0.5), RangeError);
  EXPECT_THROW(l.index_of(1000.0), RangeError);
  EXPECT_EQ(l.index_of(0.0), 10);
}

TEST(Validate, Invariants) {
  SpectralData d;
  EXPECT_THROW(validate(d), InvalidArgument);
  d = one_eigenvalue(Side::Left, {0.0, -1.0}, {1.0, 0.0});
  EXPECT_THROW(validate(d), InvalidArgument);
  d = one_eigenvalue(Side::Left, {0.0, 1.0}, {0.0, 0.0});
  EXPECT_THROW(validate(d), InvalidArgument);
  d = one_eigenvalue(Side::Left, {0.0, 1.0}, {1.0, 0.0});
  d.sign_mode = SignMode::ContinuousOnly;
  EXPECT_THROW(validate(d), InvalidArgument);
  d.sign_mode = SignMode::WithDiscrete;
  EXPECT_NO_THROW(validate(d));
}

TEST(Restrict, KeepsListedSolitons) {
  const SpectralData d = soliton_data({{1.0, 0.0, 0.0, 0.0}, {0.5, 1.0, 0.0, 2.0}, {2.0, -1.0, 0.0, 0.0}});
  const SpectralData r = restrict_solitons(d, {2, 0});
  ASSERT_EQ(r.discrete.size(), 2u);
  EXPECT_EQ(r.discrete[0].zeta, d.discrete[0].zeta);
  EXPECT_EQ(r.discrete[1].norming, d.discrete[2].norming);
  EXPECT_THROW(restrict_solitons(d, {3}), InvalidArgument);
  EXPECT_THROW(restrict_solitons(d, {}), InvalidArgument);
}

TEST(Cut, BlaschkeDressing) {
  const SpectralData d = soliton_data({{1.0, 0.2, 0.0, -20.0}, {0.8, -0.4, 0.3, 10.0}});
  const SpectralData c = cut_solitons(d, {0});
  ASSERT_EQ(c.discrete.size(), 1u);
  const Complex b = blaschke(d.discrete[1].zeta, d.discrete[0].zeta);
  EXPECT_NEAR(std::abs(c.discrete[0].norming - d.discrete[1].norming * b * b), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(blaschke({3.0, 0.0}, {0.5, 1.0})), 1.0, 1e-15);
}

TEST(Cut, RemainingSolitonAfterFarOneIsRemoved) {
  // two well separated solitons; after the left one is cut the left data
  // describe the right soliton alone
  const std::vector<SolitonParams> ps{{1.0, 0.5, 0.1, -16.0}, {1.2, -0.3, 0.7, 16.0}};
  const SpectralData d = soliton_data(ps);
  const SpectralData c = cut_solitons(d, {0});
  const TimeGrid g = TimeGrid::centered(12.0, 240);
  const RecoveredSignal both = darboux_multisoliton(d.discrete, TimeGrid{6.0, g.tau, g.count});
  const RecoveredSignal right = darboux_multisoliton(c.discrete, TimeGrid{6.0, g.tau, g.count});
  for (std::size_t j = 0; j < g.count; ++j) EXPECT_NEAR(std::abs(both.q[j] - right.q[j]), 0.0, 1e-6);
}
