#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hnls/coupled.hpp"
#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"

using namespace hnls;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> gaussian(std::size_t n, double len, double amp, double width, double centre = 0.0) {
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = -0.5 * len + len * static_cast<double>(i) / static_cast<double>(n) - centre;
    z -= len * std::round(z / len);
    f[i] = amp * std::exp(-z * z / (2.0 * width * width));
  }
  return f;
}

ComplexField blob(const GridPtr& g, double amp, double x0 = 0.0) {
  return ComplexField::sample(g, [&](const auto& x) {
    const double r2 = (x[0] - x0) * (x[0] - x0) + x[1] * x[1];
    return cplx(amp * std::exp(-r2), 0.3 * amp * x[1] * std::exp(-r2));
  });
}

// |c| = 1, cubic, on a square box.
StructuredWave unit_speed_wave(double len, std::size_t n, double amp = 1.0) {
  return StructuredWave::plane(PlaneWaveSpec{gaussian(n, len, amp, 1.0), len, {1.0}, 1.0, 2.0, 1e-3});
}

// |c| = 2, quintic, len_y = len_x / 2.
StructuredWave fast_wave(double len, std::size_t n) {
  return StructuredWave::plane(PlaneWaveSpec{gaussian(n, len, 1.0, 1.5), len, {2.0}, 1.0, 4.0, 1e-3});
}

StructuredWave standing_wave(const GridPtr& g, double amp = 1.0) {
  const auto tg = transverse_grid(*g);
  auto f0 = ComplexField::sample(tg, [&](const auto& y) { return cplx(amp * std::exp(-y[0] * y[0] / 2.0), 0.0); });
  return StructuredWave::standing(StandingWaveSpec{f0, 2.0 * kPi / g->length(0), 1.0, 4.0, 1e-3});
}

ComplexField run_decomposed(const ComplexField& v0, const StructuredWave& w, double t_end, double dt,
                            double* h1_max = nullptr) {
  auto s = DecomposedState::make(v0, w);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    step_decomposed(s, dt);
    if (h1_max) *h1_max = std::max(*h1_max, h1_norm(s.v));
  }
  EXPECT_EQ(s.status, RunStatus::Running);
  return s.v;
}

ComplexField run_perturbation(const ComplexField& v0, const StructuredWave& w, double t_end, double dt) {
  PerturbationState s{v0, w, 0.0, RunStatus::Running};
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k < steps; ++k) step_perturbation(s, dt);
  EXPECT_EQ(s.status, RunStatus::Running);
  return s.v;
}

ComplexField run_plain(ComplexField u, double lambda, double sigma, double t_end, double dt) {
  EvolutionProblem p{u.grid, lambda, sigma, std::nullopt};
  StepperState s(std::move(u), dt);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k < steps; ++k) step_strang_in_place(s, p);
  return s.field;
}

}  // namespace

TEST(Decomposed, ZeroPerturbationStaysZero) {
  const auto g1 = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto g2 = make_grid(2, {64, 64}, {32.0, 16.0}, hnls_alpha(2));
  const auto g3 = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const std::vector<std::pair<GridPtr, StructuredWave>> cases = {
      {g1, unit_speed_wave(16.0, 64)}, {g2, fast_wave(32.0, 64)}, {g3, standing_wave(g3)}};
  for (const auto& [g, w] : cases) {
    double h1_max = 0.0;
    const auto v = run_decomposed(ComplexField(g), w, 0.5, 1e-3, &h1_max);
    EXPECT_LT(h1_max, 1e-9);
    EXPECT_LT(l2_norm(v), 1e-10);
  }
}

TEST(Decomposed, ZeroProfileIsPlainEvolution) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto w = StructuredWave::plane(PlaneWaveSpec{std::vector<cplx>(64), 16.0, {1.0}, 1.0, 2.0, 1e-3});
  const auto v0 = blob(g, 0.8);
  const auto v = run_decomposed(v0, w, 0.3, 1e-3);
  EXPECT_LT(relative_l2_error(v, run_plain(v0, 1.0, 2.0, 0.3, 1e-3)), 1e-13);
}

TEST(Decomposed, RejectsIncompatibleGrid) {
  // c len_y / len_x = 1.5
  const auto g = make_grid(2, {64, 64}, {16.0, 12.0}, hnls_alpha(2));
  EXPECT_THROW(DecomposedState::make(ComplexField(g), fast_wave(16.0, 64)), InvalidArgument);
}

TEST(DualPath, UnitSpeedCubic) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto w = unit_speed_wave(16.0, 64);
  const auto v0 = blob(g, 0.1);
  EXPECT_LT(relative_l2_error(run_decomposed(v0, w, 0.2, 1e-3), run_perturbation(v0, w, 0.2, 1e-3)), 1e-5);
}

TEST(DualPath, FastQuinticAndStanding) {
  const auto g = make_grid(2, {64, 64}, {32.0, 16.0}, hnls_alpha(2));
  const auto v0 = blob(g, 0.1, 2.0);
  const auto w = fast_wave(32.0, 64);
  EXPECT_LT(relative_l2_error(run_decomposed(v0, w, 0.2, 1e-3), run_perturbation(v0, w, 0.2, 1e-3)), 1e-5);

  const auto gs = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto vs = blob(gs, 0.1, 2.0);
  const auto ws = standing_wave(gs);
  EXPECT_LT(relative_l2_error(run_decomposed(vs, ws, 0.2, 1e-3), run_perturbation(vs, ws, 0.2, 1e-3)), 1e-5);
}

TEST(DualPath, LinearisedGrowthOverOnePeakPeriod) {
  // One rotation of the peak phase e^{i lambda |f|^sigma t} at amplitude 1.
  const double period = 2.0 * kPi;
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto w = unit_speed_wave(16.0, 64);
  const auto v0 = blob(g, 1e-4);
  const double n0 = l2_norm(v0);
  const double a = l2_norm(run_decomposed(v0, w, period, 1e-3)) / n0;
  const double b = l2_norm(run_perturbation(v0, w, period, 1e-3)) / n0;
  EXPECT_LT(std::abs(a - b), 1e-4 * b);
}

TEST(Perturbation, ZeroWaveMatchesPlainStepper) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto w = StructuredWave::plane(PlaneWaveSpec{std::vector<cplx>(64), 16.0, {1.0}, 1.0, 2.0, 1e-3});
  const auto v0 = blob(g, 0.5);
  const auto v = run_perturbation(v0, w, 0.2, 1e-3);
  EXPECT_LT(relative_l2_error(v, run_plain(v0, 1.0, 2.0, 0.2, 1e-3)), 1e-10);
}

TEST(Perturbation, SecondOrderInTime) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto w = unit_speed_wave(16.0, 64);
  const auto v0 = blob(g, 0.3);
  const double t = 0.4, dt = 0.02;
  const auto ref = run_perturbation(v0, w, t, dt / 16.0);
  const double e1 = relative_l2_error(run_perturbation(v0, w, t, dt), ref);
  const double e2 = relative_l2_error(run_perturbation(v0, w, t, dt / 2.0), ref);
  EXPECT_GE(std::log2(e1 / e2), 2.0) << e1 << " " << e2;
}

TEST(Stability, ZeroEpsIsExactlyZero) {
  const auto g = make_grid(2, {64, 64}, {32.0, 16.0}, hnls_alpha(2));
  const auto reps = stability_run(fast_wave(32.0, 64), blob(g, 1.0, 2.0), {0.0}, StabilityConfig{});
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].h_sup, 0.0);
  EXPECT_EQ(reps[0].status, StabilityStatus::Bounded);
}

TEST(Stability, InRegimePlaneWaveScalesLinearly) {
  const auto g = make_grid(2, {64, 64}, {32.0, 16.0}, hnls_alpha(2));
  StabilityConfig cfg;
  cfg.t_end = 1.0;
  const auto reps = stability_run(fast_wave(32.0, 64), blob(g, 1.0, 2.0), {1e-3, 5e-4, 2.5e-4}, cfg);
  ASSERT_EQ(reps.size(), 3u);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.regime.in_regime);
    EXPECT_TRUE(r.regime.warnings.empty());
    EXPECT_EQ(r.status, StabilityStatus::Bounded);
    EXPECT_NEAR(r.h.front(), r.eps, 1e-12 * r.eps);
    EXPECT_GE(r.growth_ratio, 0.5);
    EXPECT_LE(r.growth_ratio, 10.0);
  }
  for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
    const double ratio = reps[i].h_sup / reps[i + 1].h_sup;
    EXPECT_GE(ratio, 1.6);
    EXPECT_LE(ratio, 2.5);
  }
}

TEST(Stability, StandingWaveScalesLinearly) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  StabilityConfig cfg;
  cfg.t_end = 1.0;
  const auto reps = stability_run(standing_wave(g), blob(g, 1.0, 2.0), {1e-3, 5e-4}, cfg);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.regime.in_regime);
    EXPECT_EQ(r.status, StabilityStatus::Bounded);
    EXPECT_GE(r.growth_ratio, 0.5);
    EXPECT_LE(r.growth_ratio, 10.0);
  }
  const double ratio = reps[0].h_sup / reps[1].h_sup;
  EXPECT_GE(ratio, 1.6);
  EXPECT_LE(ratio, 2.5);
}

TEST(Stability, FocusingSlowWaveBlowsUpAndIsLabelled) {
  // alpha = 3/4, sigma = 4: mass-critical focusing profile with negative
  // energy, collapsing near t = 0.088 on fine grids.
  const double len = 16.0;
  const auto g = make_grid(2, {256, 128}, {len, 2.0 * len}, hnls_alpha(2));
  const auto w = StructuredWave::plane(PlaneWaveSpec{gaussian(256, len, 2.0, std::sqrt(0.5)), len, {0.5}, 1.0, 4.0, 1e-4});
  StabilityConfig cfg;
  cfg.t_end = 0.2;
  cfg.dt = 1e-4;
  const auto reps = stability_run(w, blob(g, 1.0), {1e-3}, cfg);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_FALSE(reps[0].regime.in_regime);
  EXPECT_EQ(reps[0].status, StabilityStatus::BlownUp);
  EXPECT_FALSE(reps[0].detection.empty());
  EXPECT_GT(reps[0].t_detect, 0.05);
  EXPECT_LT(reps[0].t_detect, 0.1);
}

TEST(Stability, RegimeLabelsAndLint) {
  const auto g = make_grid(2, {64, 64}, {32.0, 16.0}, hnls_alpha(2));
  EXPECT_TRUE(check_regime(fast_wave(32.0, 64), *g).in_regime);

  const auto slow = StructuredWave::plane(PlaneWaveSpec{gaussian(64, 32.0, 1.0, 1.5), 32.0, {0.5}, 1.0, 4.0, 1e-3});
  const auto gs = make_grid(2, {64, 64}, {32.0, 64.0}, hnls_alpha(2));
  EXPECT_FALSE(check_regime(slow, *gs).in_regime);

  const auto cubic = StructuredWave::plane(PlaneWaveSpec{gaussian(64, 32.0, 1.0, 1.5), 32.0, {2.0}, 1.0, 2.0, 1e-3});
  EXPECT_FALSE(check_regime(cubic, *g).in_regime);

  const auto flat = StructuredWave::plane(PlaneWaveSpec{std::vector<cplx>(64, cplx(1.0)), 32.0, {2.0}, 1.0, 4.0, 1e-3});
  const auto r = check_regime(flat, *g);
  EXPECT_TRUE(r.in_regime);
  EXPECT_FALSE(r.warnings.empty());

  const auto g2 = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  EXPECT_TRUE(check_regime(standing_wave(g2), *g2).in_regime);
  auto f0 = ComplexField::sample(transverse_grid(*g2), [](const auto& y) { return cplx(std::exp(-y[0] * y[0]), 0.0); });
  EXPECT_FALSE(check_regime(StructuredWave::standing(StandingWaveSpec{f0, 2.0 * kPi / 16.0, -1.0, 4.0, 1e-3}), *g2)
                   .in_regime);
}

TEST(TwoWave, ZeroSecondWaveIsDecomposedPath) {
  const double len = 16.0;
  const auto g = make_grid(2, {64, 64}, {len, len}, hnls_alpha(2));
  const auto w1 = unit_speed_wave(len, 64);
  const auto w2 = StructuredWave::plane(PlaneWaveSpec{std::vector<cplx>(64), len, {3.0}, 1.0, 2.0, 1e-3});
  const auto v0 = blob(g, 0.2);
  const auto series = two_wave_run(w1, w2, v0, 0.2, 1e-3);
  EXPECT_EQ(series.status, RunStatus::Done);
  const auto v = run_decomposed(v0, w1, 0.2, 1e-3);
  EXPECT_LT(l2_norm(series.remainder - v), 1e-10 * std::max(1.0, l2_norm(v)));
}

TEST(TwoWave, SwapSymmetryAndValidation) {
  const double len = 16.0;
  const auto g = make_grid(2, {64, 64}, {len, len}, hnls_alpha(2));
  const auto w1 = unit_speed_wave(len, 64, 0.3);
  const auto w2 = StructuredWave::plane(PlaneWaveSpec{gaussian(64, len, 0.3, 2.0, len / 2), len, {3.0}, 1.0, 2.0, 1e-3});
  const auto v0 = blob(g, 0.1);
  const auto a = two_wave_run(w1, w2, v0, 0.1, 1e-3);
  const auto b = two_wave_run(w2, w1, v0, 0.1, 1e-3);
  EXPECT_LE(l2_norm(a.remainder - b.remainder), 1e-10);

  EXPECT_THROW(two_wave_run(w1, w1, v0, 0.1, 1e-3), InvalidArgument);
  EXPECT_THROW(two_wave_run(w1, standing_wave(g), v0, 0.1, 1e-3), InvalidArgument);
  const auto w3 = StructuredWave::plane(PlaneWaveSpec{gaussian(64, len, 0.3, 2.0), len, {3.0}, 1.0, 4.0, 1e-3});
  EXPECT_THROW(two_wave_run(w1, w3, v0, 0.1, 1e-3), InvalidArgument);
}

TEST(TwoWave, RemainderIsLocalisedAndOfProductSize) {
  // With c = 1 and c = 3 the bands cross at (+-len/4, +-len/4) once f2 is
  // centred half a period away from f1.
  const double len = 64.0;
  const std::size_t n = 128;
  const auto g = make_grid(2, {n, n}, {len, len}, hnls_alpha(2));
  const auto w1 = StructuredWave::plane(PlaneWaveSpec{gaussian(n, len, 0.3, 1.0), len, {1.0}, 1.0, 2.0, 1e-3});
  const auto w2 = StructuredWave::plane(PlaneWaveSpec{gaussian(n, len, 0.3, 3.0, len / 2), len, {3.0}, 1.0, 2.0, 1e-3});
  const auto s = two_wave_run(w1, w2, ComplexField(g), 1.0, 1e-3, 100);
  ASSERT_EQ(s.status, RunStatus::Done);
  EXPECT_LT(s.remainder_h1.front(), 1e-12);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    EXPECT_TRUE(std::isfinite(s.remainder_h1[i]));
    EXPECT_LT(s.remainder_h1[i], 10.0 * s.product_scale);
    EXPECT_LT(s.boundary_fraction[i], 1e-6);
  }
  EXPECT_GT(s.remainder_h1.back(), 0.0);
}
