#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hnls/errors.hpp"
#include "hnls/families.hpp"
#include "hnls/spectral.hpp"
#include "hnls/transforms.hpp"

using namespace hnls;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> bump(std::size_t n, double len, double amp, double width) {
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = -0.5 * len + len * static_cast<double>(i) / static_cast<double>(n);
    f[i] = amp * std::exp(-z * z / (2.0 * width * width)) * std::polar(1.0, 0.3 * z);
  }
  return f;
}

ComplexField evolve(ComplexField u, double lambda, double sigma, double t_end, double dt) {
  EvolutionProblem p{u.grid, lambda, sigma, std::nullopt};
  RunConfig cfg;
  cfg.t_end = t_end;
  cfg.dt0 = dt;
  auto res = run(StepperState(std::move(u), dt), p, cfg);
  EXPECT_EQ(res.state.status, RunStatus::Done);
  return res.state.field;
}

double field_residual(const std::function<ComplexField(double)>& u, double t, double h, const EvolutionProblem& p) {
  return residual_hnls(u(t - h), u(t), u(t + h), p);
}

}  // namespace

TEST(PlaneWave, Validation) {
  const double len = 16.0;
  PlaneWaveSpec s{bump(64, len, 1.0, 1.0), len, {2.0}, 1.0, 2.0, 1e-3};
  EXPECT_NO_THROW(s.validate(*make_grid(2, {64, 32}, {len, len / 2}, hnls_alpha(2))));
  EXPECT_THROW(s.validate(*make_grid(2, {64, 32}, {len, len / 3}, hnls_alpha(2))), InvalidArgument);
  EXPECT_THROW(s.validate(*make_grid(2, {32, 32}, {len, len / 2}, hnls_alpha(2))), InvalidArgument);
  EXPECT_THROW(s.validate(*make_grid(2, {64, 32}, {2 * len, len}, hnls_alpha(2))), InvalidArgument);
  s.c = {2.0, 1.0};
  EXPECT_THROW(s.validate(*make_grid(2, {64, 32}, {len, len / 2}, hnls_alpha(2))), InvalidArgument);
}

TEST(PlaneWave, UnitSpeedModulusInvariance) {
  const double len = 16.0;
  const auto g = make_grid(2, {64, 64}, {len, len}, hnls_alpha(2));
  PlaneWaveSpec s{bump(64, len, 1.3, 1.0), len, {1.0}, 1.0, 2.0, 1e-3};
  const auto u0 = plane_wave_field(s, 0.0, g);
  const double p4 = lp_norm(u0, 4.0);
  for (double t : {0.5, 1.0, 3.0, 10.0}) {
    const auto u = plane_wave_field(s, t, g);
    for (std::size_t i = 0; i < u.size(); ++i) ASSERT_NEAR(std::abs(u.values[i]), std::abs(u0.values[i]), 1e-12);
    EXPECT_NEAR(l2_norm(u) / l2_norm(u0), 1.0, 1e-12);
    EXPECT_NEAR(lp_norm(u, 4.0) / p4, 1.0, 1e-12);
    EXPECT_NEAR(linf_norm(u), linf_norm(u0), 1e-12);
  }
}

TEST(PlaneWave, UnitSpeedLiftMatchesFullEvolution) {
  const double len = 16.0;
  const auto g = make_grid(2, {64, 64}, {len, len}, hnls_alpha(2));
  PlaneWaveSpec s{bump(64, len, 1.3, 1.0), len, {1.0}, 1.0, 2.0, 1e-3};
  const auto full = evolve(plane_wave_field(s, 0.0, g), 1.0, 2.0, 1.0, 1e-3);
  EXPECT_LT(relative_l2_error(full, plane_wave_field(s, 1.0, g)), 1e-6);
}

TEST(PlaneWave, LinearCaseIsFreeProfileEvolution) {
  const double len = 16.0;
  const auto g = make_grid(2, {64, 64}, {len, len / 2}, hnls_alpha(2));
  PlaneWaveSpec s{bump(64, len, 1.0, 1.0), len, {2.0}, 0.0, 2.0, 1e-2};
  const double t = 0.4;
  const auto lifted = plane_wave_field(s, t, g);
  // Free 2-D propagation of the lifted data, and the explicit 1-D propagator with alpha = 1 - |c|^2.
  const auto full = apply_linear_propagator(plane_wave_field(s, 0.0, g), t);
  const auto direct = lift_plane_wave(apply_linear_propagator(s.profile_field(), t), s.c, g);
  EXPECT_LT(relative_l2_error(lifted, full), 1e-10);
  EXPECT_LT(relative_l2_error(lifted, direct), 1e-12);
}

TEST(PlaneWave, FastSpeedResidualAndDecoupling) {
  const double len = 16.0;
  const auto g = make_grid(2, {128, 64}, {len, len / 2}, hnls_alpha(2));
  PlaneWaveSpec s{bump(128, len, 1.0, 1.0), len, {2.0}, 1.0, 2.0, 1e-4};
  const EvolutionProblem p{g, 1.0, 2.0, std::nullopt};
  const double res = field_residual([&](double t) { return plane_wave_field(s, t, g); }, 0.5, 1e-3, p);
  EXPECT_LT(res, 5e-3);
  const auto full = evolve(plane_wave_field(s, 0.0, g), 1.0, 2.0, 0.5, 1e-4);
  EXPECT_LT(relative_l2_error(full, plane_wave_field(s, 0.5, g)), 1e-6);
}

TEST(PlaneWave, FractionalShiftUsesInterpolation) {
  // c h_y / h_x is not an integer here, so rows are filled spectrally.
  const double len = 16.0;
  const auto g = make_grid(2, {64, 128}, {len, len}, hnls_alpha(2));
  PlaneWaveSpec s{bump(64, len, 1.0, 1.0), len, {1.0}, 0.0, 2.0, 1e-3};
  const auto u = plane_wave_field(s, 0.0, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto x = g->point(i);
    double z = x[0] - x[1];
    z -= len * std::floor((z + 0.5 * len) / len);
    const cplx exact = std::exp(-z * z / 2.0) * std::polar(1.0, 0.3 * z);
    ASSERT_LT(std::abs(u.values[i] - exact), 1e-6) << x[0] << " " << x[1];
  }
}

TEST(StandingWave, Validation) {
  const auto g = make_grid(2, {32, 64}, {10.0, 16.0}, hnls_alpha(2));
  const auto tg = transverse_grid(*g);
  StandingWaveSpec s{ComplexField(tg), 2 * kPi / 10.0, 1.0, 2.0, 1e-3};
  EXPECT_NO_THROW(s.validate(*g));
  s.omega = 1.0;
  EXPECT_THROW(s.validate(*g), InvalidArgument);
  s.omega = 0.0;
  s.f0 = ComplexField(make_line_grid(32, 16.0, 1.0));
  EXPECT_THROW(s.validate(*g), InvalidArgument);
}

TEST(StandingWave, ConstantProfileIsConstantFlow) {
  const auto g = make_grid(2, {16, 16}, {8.0, 8.0}, hnls_alpha(2));
  const auto tg = transverse_grid(*g);
  const double amp = 0.9, t = 0.7;
  StandingWaveSpec s{ComplexField::sample(tg, [=](const auto&) { return cplx(amp, 0.0); }), 0.0, 1.0, 2.0, 1e-3};
  const auto u = standing_wave_field(s, t, g);
  const cplx exact = amp * std::polar(1.0, amp * amp * t);
  for (auto z : u.values) ASSERT_LT(std::abs(z - exact), 1e-12);
  const auto full = evolve(ComplexField::sample(g, [=](const auto&) { return cplx(amp, 0.0); }), 1.0, 2.0, t, 1e-3);
  EXPECT_LT(relative_l2_error(full, u), 1e-12);
}

TEST(StandingWave, LinearCaseMatchesFreePropagation) {
  const double lx = 10.0;
  const auto g = make_grid(2, {32, 128}, {lx, 20.0}, hnls_alpha(2));
  const auto tg = transverse_grid(*g);
  const double omega = 2 * kPi * 2 / lx;
  StandingWaveSpec s{ComplexField::sample(tg, [](const auto& y) { return cplx(std::exp(-y[0] * y[0]), 0.0); }),
                     omega, 0.0, 2.0, 1e-3};
  const double t = 0.6;
  const auto u = standing_wave_field(s, t, g);
  const auto full = apply_linear_propagator(standing_wave_field(s, 0.0, g), t);
  EXPECT_LT(relative_l2_error(u, full), 1e-10);
}

TEST(StandingWave, QuinticResidualAndDecoupling) {
  const double lx = 10.0;
  const auto g = make_grid(2, {32, 128}, {lx, 24.0}, hnls_alpha(2));
  const auto tg = transverse_grid(*g);
  StandingWaveSpec s{
      ComplexField::sample(tg, [](const auto& y) { return cplx(0.8 * std::exp(-y[0] * y[0] / 2.0), 0.0); }),
      2 * kPi / lx, 1.0, 4.0, 1e-4};
  const EvolutionProblem p{g, 1.0, 4.0, std::nullopt};
  const double res = field_residual([&](double t) { return standing_wave_field(s, t, g); }, 0.5, 1e-3, p);
  EXPECT_LT(res, 5e-3);
  const auto full = evolve(standing_wave_field(s, 0.0, g), 1.0, 4.0, 0.5, 1e-4);
  EXPECT_LT(relative_l2_error(full, standing_wave_field(s, 0.5, g)), 1e-6);
}

TEST(BoundState, ZeroAndRandomFields) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto zero = bound_state_defect(ComplexField(g), 1.0, 0.0, 1.0);
  EXPECT_TRUE(zero.zero_field);
  EXPECT_EQ(zero.value, 0.0);

  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  const auto noise = ComplexField::sample(g, [&](const auto&) { return cplx(nd(rng), nd(rng)); });
  const auto d = bound_state_defect(noise, 1.0, 0.0, 1.0);
  EXPECT_FALSE(d.zero_field);
  EXPECT_GT(d.value, 0.3);
  EXPECT_LE(d.value, 1.0);
}

TEST(BoundState, LinearHermiteGroundStateIsExact) {
  // For lambda = 0, k = 1, gamma0 = 0 the Gaussian e^{-(x^2+y^2)/2} is an exact bound state.
  const auto g = make_grid(2, {128, 128}, {20.0, 20.0}, hnls_alpha(2));
  const auto a = ComplexField::sample(g, [](const auto& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2), 0.0); });
  EXPECT_LT(bound_state_defect(a, 1.0, 0.0, 0.0).value, 1e-10);
  EXPECT_GT(bound_state_defect(a, 1.0, 0.0, 1.0).value, 1e-2);
}

TEST(BoundState, RefinementLowersDefect) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto a = ComplexField::sample(g, [](const auto& x) { return cplx(0.5 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2), 0.0); });
  // gamma0 = lambda int A^4 / int A^2 is the first-order energy shift of the Gaussian.
  const double gamma0 = 0.125;
  const auto cand = refine_bound_state(a, 1.0, gamma0, 1.0, 500);
  ASSERT_EQ(cand.defect_history.size(), 501u);
  EXPECT_LT(cand.defect_history.back(), 0.5 * cand.defect_history.front());
  for (std::size_t i = 1; i < cand.defect_history.size(); i += 50) EXPECT_LT(cand.defect_history[i], cand.defect_history.front());
  EXPECT_NEAR(l2_norm(cand.field), l2_norm(a), 1e-12);
  EXPECT_NEAR(bound_state_defect(cand.field, 1.0, gamma0, 1.0).value, cand.defect_history.back(), 1e-14);
}

TEST(Semiclassical, InitialTimeIsA0) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto a = ComplexField::sample(g, [](const auto& x) { return cplx(std::exp(-(x[0] * x[0] + 2 * x[1] * x[1]) / 2), 0.0); });
  const auto spec = SemiclassicalSpec::make(a, 1.0, 0.3, 0.0, 1.0);
  const auto psi = semiclassical_field(spec, 0.0, g);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(psi.values[i], a.values[i]);
}

TEST(Semiclassical, DecayForPositiveK) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto a = ComplexField::sample(g, [](const auto& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2), 0.0); });
  const auto spec = SemiclassicalSpec::make(a, 1.0, 0.0, 0.0, 1.0);
  const double l10 = linf_norm(semiclassical_field(spec, 10.0, g));
  const double l100 = linf_norm(semiclassical_field(spec, 100.0, g));
  const double slope = std::log(l100 / l10) / std::log(10.0);
  EXPECT_GT(slope, -1.1);
  EXPECT_LT(slope, -0.9);
  // Exact for a0 = 0: sup is f(t) |A0(0)| = (4 t^2 + 1)^{-1/2}.
  EXPECT_NEAR(l10, 1.0 / std::sqrt(401.0), 1e-10);
}

TEST(Semiclassical, BlowUpForZeroK) {
  const auto g = make_grid(2, {64, 64}, {16.0, 16.0}, hnls_alpha(2));
  const auto a = ComplexField::sample(g, [](const auto& x) { return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2), 0.0); });
  const auto spec = SemiclassicalSpec::make(a, 0.0, 0.0, -1.0, 1.0);
  const double l = linf_norm(semiclassical_field(spec, 0.9, g));
  EXPECT_NEAR(l, 10.0, 1e-6);  // (1 + a0 t)^{-d/2}
  EXPECT_THROW(semiclassical_field(spec, 1.0, g), NumericalError);
  EXPECT_THROW(semiclassical_field(spec, 1.5, g), NumericalError);
  const auto tc = b_crossing_time(-1.0, 0.0, 1e-6, 2.0);
  ASSERT_TRUE(tc.has_value());
  EXPECT_NEAR(*tc, 1.0 - 1e-6, 1e-9);
}

TEST(Semiclassical, NegativeKSingularInFiniteTime) {
  for (double a0 : {-1.0, 0.0, 1.0}) {
    const double times[2] = {0.0, 5.0};
    const auto st = integrate_transform_odes(a0, -1.0, 2, times);
    EXPECT_TRUE(st.truncated) << a0;
    ASSERT_TRUE(st.singular_time.has_value());
    EXPECT_NEAR(*st.singular_time, *closed_form_singular_time(a0, -1.0), 1e-6);
  }
}

TEST(Semiclassical, ResidualTracksDefect) {
  const auto g = make_grid(2, {128, 128}, {16.0, 16.0}, hnls_alpha(2));
  const auto a = ComplexField::sample(g, [](const auto& x) { return cplx(0.5 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2), 0.0); });
  const double gamma0 = 0.125;
  const auto refined = refine_bound_state(a, 1.0, gamma0, 1.0, 500).field;
  const EvolutionProblem p{g, 1.0, 2.0, std::nullopt};
  double defect[2], residual[2];
  int level = 0;
  for (const auto* a0 : {&a, &refined}) {
    const auto spec = SemiclassicalSpec::make(*a0, 1.0, gamma0, 0.0, 1.0);
    defect[level] = spec.defect.value;
    residual[level] = field_residual([&](double t) { return semiclassical_field(spec, t, g); }, 0.3, 1e-3, p);
    ++level;
  }
  ASSERT_LT(defect[1], 0.5 * defect[0]);
  const double ratio = (residual[0] / residual[1]) / (defect[0] / defect[1]);
  EXPECT_GT(ratio, 0.5);
  EXPECT_LT(ratio, 2.0);
}
