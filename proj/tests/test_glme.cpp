#include <gtest/gtest.h>

#include <random>

#include "gtib/glme.hpp"
#include "gtib/oracles.hpp"

using namespace gtib;

namespace {

std::shared_ptr<KernelTable> random_table(std::size_t n, double h, std::uint64_t seed,
                                          Side side = Side::Left) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Complex> v(n);
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return std::make_shared<KernelTable>(0.0, h, v, side);
}

LevinsonOptions unguarded() {
  LevinsonOptions o;
  o.check_contraction = false;
  o.growth_zone = 0.0;
  return o;
}

}  // namespace

TEST(Glme, SingleBlockClosedForm) {
  // x1 + s h conj(g0) y2 = 0, h g0 x1 + y2 = g1
  for (SignMode sm : {SignMode::WithDiscrete, SignMode::ContinuousOnly}) {
    const double h = 0.1, s = sign_factor(sm);
    const Complex g0{0.7, -0.2}, g1{-0.3, 0.9};
    auto tab = std::make_shared<KernelTable>(0.0, h, std::vector<Complex>{g0, g1});
    const GlmeSolution sol = solve(assemble(tab, 0.5 * h, h, 1, sm));
    const Complex y2 = g1 / (1.0 - s * h * h * std::norm(g0));
    EXPECT_NEAR(std::abs(sol.y2[0] - y2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sol.x1[0] + s * h * std::conj(g0) * y2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sol.q_at_t + 2.0 * y2), 0.0, 1e-15);
  }
}

TEST(Glme, ZeroKernelGivesZero) {
  auto tab = std::make_shared<KernelTable>(0.0, 0.1, std::vector<Complex>(40, Complex{}));
  const GlmeSolution sol = solve(assemble(tab, 1.0, 1.0, 10, SignMode::WithDiscrete));
  for (auto v : sol.y2) EXPECT_EQ(v, Complex{});
  EXPECT_EQ(sol.q_at_t, Complex{});
}

TEST(Glme, MatchesDenseSolve) {
  for (std::size_t M : {1u, 2u, 5u, 17u, 32u})
    for (SignMode sm : {SignMode::WithDiscrete, SignMode::ContinuousOnly}) {
      const double h = 0.5 / static_cast<double>(M);
      auto tab = random_table(2 * M, h, 7 * M + (sm == SignMode::WithDiscrete));
      const double P = static_cast<double>(M) * h;
      const GlmeSystem sys = assemble(tab, 0.5 * (P + static_cast<double>(M - 1) * h), P, M, sm);
      const GlmeSolution a = solve(sys, unguarded()), b = dense_solve(sys);
      EXPECT_LT(dense_residual(sys, a), 1e-13);
      for (std::size_t k = 0; k < M; ++k) {
        EXPECT_NEAR(std::abs(a.x1[k] - b.x1[k]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(a.y2[k] - b.y2[k]), 0.0, 1e-12);
      }
    }
}

TEST(Glme, LeftRightDuality) {
  // Omega_r(z) = Omega_l(-z) turns the right system at t into the left one
  // at -t; the potentials are related by q_r = s conj(y2) mapping.
  const double h = 0.05;
  const std::size_t n = 80;
  auto left = random_table(n, h, 3);
  std::vector<Complex> mirrored(left->values().rbegin(), left->values().rend());
  auto right = std::make_shared<KernelTable>(-left->z(n - 1), h, mirrored, Side::Right);
  const std::size_t M = 20;
  const double P = static_cast<double>(M) * h;
  const double t = 0.5 * (P + 25 * h);
  const GlmeSolution a = solve(assemble(left, t, P, M, SignMode::ContinuousOnly), unguarded());
  const GlmeSolution b = solve(assemble(right, -t, P, M, SignMode::ContinuousOnly), unguarded());
  for (std::size_t k = 0; k < M; ++k) EXPECT_NEAR(std::abs(a.y2[k] - b.y2[k]), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(b.q_at_t + 2.0 * std::conj(a.y2.back())), 0.0, 1e-13);
}

TEST(March, AgreesWithFreshSolves) {
  const SolitonParams p{1.0, 0.5, 0.8, 0.0};
  const double h = 0.05, t_first = -4.0;
  const std::size_t n = 160;
  auto kern = std::make_shared<KernelTable>(
      kernel_left(soliton_data({p}), 2.0 * t_first - h - static_cast<double>(n) * h, h, 2 * n + 4));
  MarchState st(kern, SignMode::WithDiscrete, t_first);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) st.advance();
    if (k % 16 != 3) continue;
    const GlmeSystem sys = assemble(kern, st.t(), static_cast<double>(k + 1) * h, k + 1,
                                    SignMode::WithDiscrete);
    EXPECT_NEAR(std::abs(st.q() - solve(sys).q_at_t), 0.0, 1e-12) << "k=" << k;
    EXPECT_NEAR(std::abs(st.q() - dense_solve(sys).q_at_t), 0.0, 1e-10) << "k=" << k;
  }
}

TEST(March, FetchesTwoGeneratorsPerStep) {
  auto tab = random_table(400, 0.01, 11);
  MarchState st(tab, SignMode::ContinuousOnly, 1.0, unguarded());
  const std::size_t before = st.recursion().generators_fetched();
  for (int i = 0; i < 50; ++i) st.advance();
  EXPECT_EQ(st.recursion().generators_fetched() - before, 100u);
  EXPECT_NEAR(st.t(), 1.0 + 50 * 0.005, 1e-12);
}

TEST(March, RightGlmeMarchesLeftward) {
  const SolitonParams p{1.0, 0.5, 0.8, 0.0};
  const SpectralData r = reflectionless_right(soliton_data({p}));
  const double h = 0.02, t_first = 5.0;
  const std::size_t n = 1000;
  auto kern = std::make_shared<KernelTable>(
      kernel_right(r, 2.0 * t_first + h - static_cast<double>(n + 1) * h, h, 2 * n + 4));
  MarchState st(kern, SignMode::WithDiscrete, t_first);
  EXPECT_EQ(st.direction(), MarchDirection::LeftwardRightGlme);
  double worst = 0.0;
  for (std::size_t k = 0; k < 500; ++k) {
    if (k > 0) st.advance();
    worst = std::max(worst, std::abs(st.q() - exact_soliton(p, st.t())));
  }
  EXPECT_NEAR(st.t(), 0.01, 1e-12);
  EXPECT_LT(worst, 1e-3);
}

TEST(March, StopsAtTableEnd) {
  auto tab = random_table(20, 0.1, 5);
  MarchState st(tab, SignMode::ContinuousOnly, 0.5 * (0.1 * 9 + 0.1), unguarded());
  const MarchResult r = march(st, 50);
  EXPECT_EQ(r.stop, MarchStop::KernelRange);
  EXPECT_LT(r.samples.size(), 20u);
}

TEST(March, GrowthMonitorFiresOutsideTheZone) {
  const SolitonParams p{1.0, 0.0, 0.0, 0.0};
  const double h = 0.01, t_first = -8.0;
  const std::size_t n = 3200;
  auto kern = std::make_shared<KernelTable>(
      kernel_left(soliton_data({p}), 2.0 * t_first - h - static_cast<double>(n) * h, h, 2 * n + 4));
  MarchState st(kern, SignMode::WithDiscrete, t_first);
  const MarchResult r = march(st, n);
  EXPECT_EQ(r.stop, MarchStop::Instability);
  EXPECT_GT(r.samples.back().t, 5.0);
  EXPECT_LT(r.samples.back().t, 7.0);
}

TEST(ExtendStart, SameRecoveryPointLongerWindow) {
  const SolitonParams p{1.0, 0.5, 0.8, 0.0};
  const double h = 0.02;
  auto kern = std::make_shared<KernelTable>(kernel_left(soliton_data({p}), -20.0, h, 1500));
  const GlmeSystem a = assemble(kern, -1.0, 1.0, 50, SignMode::WithDiscrete);
  const GlmeSystem b = extend_start(a, 200);
  EXPECT_EQ(b.M, 250u);
  EXPECT_DOUBLE_EQ(b.t, a.t);
  EXPECT_NEAR(b.P, 5.0, 1e-12);
  // the longer window sees the whole soliton tail
  const double short_err = std::abs(solve(a).q_at_t - exact_soliton(p, -1.0));
  const double long_err = std::abs(solve(b).q_at_t - exact_soliton(p, -1.0));
  EXPECT_GT(short_err, 1e-3);
  EXPECT_LT(long_err, 1e-5);
}

TEST(Assemble, RejectsMismatchedStep) {
  auto kern = random_table(100, 0.1, 1);
  EXPECT_THROW(assemble(kern, 3.0, 1.0, 9, SignMode::ContinuousOnly), RangeError);
  EXPECT_THROW(assemble(kern, 3.0, 1.0, 0, SignMode::ContinuousOnly), InvalidArgument);
}

TEST(Solve, SolitonPeakValue) {
  // q(0) = 2 eta e^{-i theta}
  const SolitonParams p{1.0, 0.5, 0.8, 0.0};
  for (double h : {0.02, 0.01}) {
    auto kern = std::make_shared<KernelTable>(kernel_left(soliton_data({p}), -24.0, h,
                                                          static_cast<std::size_t>(26.0 / h)));
    const auto M = static_cast<std::size_t>(std::llround(12.0 / h));
    const Complex q = solve(assemble(kern, 0.0, 12.0, M, SignMode::WithDiscrete)).q_at_t;
    EXPECT_LT(std::abs(q - std::polar(2.0, -0.8)), 2.0 * h * h) << "h=" << h;
  }
}

TEST(Solve, FarLeftOfSolitonIsZero) {
  const SolitonParams p{1.0, 0.5, 0.8, 0.0};
  auto kern = std::make_shared<KernelTable>(kernel_left(soliton_data({p}), -80.0, 0.05, 1000));
  const GlmeSystem sys = assemble(kern, -16.0, 4.0, 80, SignMode::WithDiscrete);
  double rhs = 0.0;
  for (auto v : sys.rhs) rhs = std::max(rhs, std::abs(v));
  EXPECT_LT(rhs, 1e-10);
  EXPECT_LT(std::abs(solve(sys).q_at_t), 1e-10);
}

TEST(ExtendStart, WorstStartAtTheCenter) {
  // start exactly at the soliton center, march one unit rightward
  const SolitonParams p{1.0, 0.5, 0.8, 0.0};
  const double h = 0.02;
  const std::size_t M = 50, steps = 100;
  auto kern = std::make_shared<KernelTable>(kernel_left(soliton_data({p}), -20.0, h, 1400));
  auto zone_rmse = [&](const GlmeSystem& sys) {
    MarchState st = MarchState::from_system(sys);
    double s = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      if (i > 0) st.advance();
      s += std::norm(st.q() - exact_soliton(p, st.t()));
    }
    return std::sqrt(s / static_cast<double>(steps + 1));
  };
  const GlmeSystem plain = assemble(kern, 0.0, static_cast<double>(M) * h, M, SignMode::WithDiscrete);
  EXPECT_EQ(extend_start(plain, 0).M, plain.M);
  EXPECT_LT(zone_rmse(extend_start(plain, M)), zone_rmse(plain));
}
