#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "hnls/errors.hpp"
#include "hnls/radial.hpp"

using namespace hnls;

namespace {

constexpr double kPi = std::numbers::pi;

RadialProfile gaussian(double amp, double r_max, std::size_t n, int sign = 1, double lambda = 1.0, double eps = 0.0) {
  return RadialProfile::sample(
      eps, r_max, n, [=](double r) { return cplx(amp * std::exp(-r * r), 0.0); }, sign, lambda);
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(RadialProfile, Validation) {
  EXPECT_THROW(gaussian(1.0, 10.0, 3), InvalidArgument);
  RadialProfile p = gaussian(1.0, 10.0, 100);
  p.sign = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = gaussian(1.0, 10.0, 100);
  p.values.back() = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = gaussian(1.0, 10.0, 100, 1, 1.0, 0.5);
  EXPECT_EQ(p.inner_bc(), RadialInnerBc::Dirichlet);
  EXPECT_EQ(p.values.front(), cplx{});
  p.values[3] = cplx(std::nan(""), 0.0);
  EXPECT_THROW(p.validate(), NumericalError);
}

TEST(RadialOperator, ExactOnQuadratic) {
  for (double eps : {0.0, 0.3}) {
    auto p = RadialProfile::sample(eps, 5.0, 200, [](double r) { return cplx(r * r, 0.0); });
    p.values.back() = 0.0;
    const auto l = apply_radial_laplacian(p);
    const std::size_t first = eps > 0.0 ? 2 : 0;
    for (std::size_t i = first; i + 1 < p.intervals(); ++i) EXPECT_NEAR(l[i].real(), 4.0, 1e-9) << i;
  }
}

TEST(RadialOperator, MassQuadrature) {
  // 2 pi int e^{-2 r^2} r dr = pi / 2, second order in h
  const double e1 = std::abs(radial_mass(gaussian(1.0, 10.0, 1000)) - kPi / 2.0);
  const double e2 = std::abs(radial_mass(gaussian(1.0, 10.0, 2000)) - kPi / 2.0);
  EXPECT_LT(e2, 1e-5);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(RadialOperator, EigenmodeEvolution) {
  const double r_max = 10.0;
  const std::size_t n = 200;
  auto p = RadialProfile::sample(0.0, r_max, n, [](double) { return cplx{}; }, 1, 0.0);
  const double h = p.h();

  // Symmetric form D^{1/2} L D^{-1/2} of the discrete operator on nodes 0..n-1.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> w(n);
  w[0] = h * h / 8.0;
  for (std::size_t i = 1; i < n; ++i) w[i] = i * h * h;
  for (std::size_t i = 0; i < n; ++i) {
    // w_i (L phi)_i = flux_{i+1/2} - flux_{i-1/2}, flux = r_{i+1/2} (phi_{i+1} - phi_i) / h
    const double rp = (i + 0.5) * h / h;
    const double rm = i == 0 ? 0.0 : (i - 0.5) * h / h;
    s(i, i) = -(rp + rm) / w[i];
    if (i + 1 < n) s(i, i + 1) = rp / std::sqrt(w[i] * w[i + 1]);
    if (i > 0) s(i, i - 1) = rm / std::sqrt(w[i] * w[i - 1]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  ASSERT_EQ(es.info(), Eigen::Success);
  // The top eigenvalue approximates -(j_{0,1} / R)^2.
  const double mu1 = es.eigenvalues()(n - 1);
  EXPECT_NEAR(mu1, -std::pow(2.404825557695773 / r_max, 2), 1e-4);

  const std::size_t mode = n - 3;
  const double mu = es.eigenvalues()(mode);
  for (std::size_t i = 0; i < n; ++i) p.values[i] = es.eigenvectors()(i, mode) / std::sqrt(w[i]);
  const auto v0 = p.values;

  const double dt = 1e-3;
  const int steps = 1000;
  for (int k = 0; k < steps; ++k) radial_step_in_place(p, dt);

  const cplx beta(0.0, 0.25 * dt * mu);
  const cplx rho = std::pow((1.0 + beta) / (1.0 - beta), 2 * steps);
  double err = 0.0, amp = 0.0;
  cplx proj{};
  for (std::size_t i = 0; i < n; ++i) {
    err = std::max(err, std::abs(p.values[i] - rho * v0[i]));
    amp = std::max(amp, std::abs(v0[i]));
    proj += w[i] * p.values[i] * std::conj(v0[i]);
  }
  EXPECT_LT(err / amp, 1e-8);
  EXPECT_NEAR(std::abs(proj), 1.0, 1e-8);
}

TEST(RadialEvolution, ConstantDataInterior) {
  // Away from the outer wall constant data follows Phi = A exp(i lambda |A|^2 t).
  const double amp = 0.8, t_end = 0.2;
  auto p = RadialProfile::sample(0.0, 40.0, 4000, [=](double r) { return cplx(amp / (1.0 + std::exp(2.0 * (r - 30.0))), 0.0); });
  const auto traj = solve_radial(p, 1e-3, t_end);
  ASSERT_EQ(traj.status, RunStatus::Done);
  const cplx exact = amp * std::polar(1.0, amp * amp * t_end);
  double err = 0.0;
  for (std::size_t i = 0; traj.final_profile.r(i) < 10.0; ++i) err = std::max(err, std::abs(traj.final_profile.values[i] - exact));
  EXPECT_LT(err, 1e-8);
}

TEST(RadialEvolution, MassConservedBothSigns) {
  for (int sign : {1, -1}) {
    const auto p = gaussian(1.5, 25.0, 2500, sign);
    const auto traj = solve_radial(p, 1e-3, 0.5);
    ASSERT_EQ(traj.status, RunStatus::Done);
    const double m0 = traj.samples.front().mass;
    for (const auto& s : traj.samples) EXPECT_NEAR(s.mass / m0, 1.0, 1e-12);
    EXPECT_NEAR(traj.samples.back().t, 0.5, 1e-14);
    EXPECT_GE(traj.samples.size(), 50u);
    EXPECT_NEAR(traj.samples.back().energy / traj.samples.front().energy, 1.0, 1e-3);
    EXPECT_TRUE(traj.outer_mass_ok());
  }
}

TEST(RadialEvolution, ConjugationMatchesDirectScheme) {
  auto p = RadialProfile::sample(
      0.0, 12.0, 1200, [](double r) { return 1.3 * std::exp(-r * r) * std::polar(1.0, 0.3 * r * r); }, -1, 1.0);
  RadialRunConfig cfg;
  cfg.t_end = 0.3;
  const auto conj_path = solve_radial(p, cfg);
  cfg.direct_negative_sign = true;
  const auto direct = solve_radial(p, cfg);
  EXPECT_LT(max_diff(conj_path.final_profile.values, direct.final_profile.values), 1e-10);
}

TEST(RadialEvolution, FocusingBlowsUpDefocusingDoesNot) {
  auto p = gaussian(3.0, 10.0, 2000, 1, 1.0);
  ASSERT_LT(radial_energy(p), 0.0);
  RadialRunConfig cfg;
  cfg.t_end = 1.0;
  cfg.adapt = true;
  cfg.linf_ceiling = 10.0 * radial_linf(p);
  cfg.snapshot_radius = 0.5;
  const auto focus = solve_radial(p, cfg);
  EXPECT_EQ(focus.status, RunStatus::BlownUp);
  // Virial bound on the blow-up time for negative energy.
  double v0 = 0.0;
  {
    const auto w = radial_weights(p);
    for (std::size_t i = 0; i < w.size(); ++i) v0 += 2.0 * kPi * w[i] * p.r(i) * p.r(i) * std::norm(p.values[i]);
  }
  EXPECT_LT(focus.t_detect, std::sqrt(v0 / (-8.0 * radial_energy(p))));

  auto scan = concentration_scan(focus, {0.1, 0.2, 0.4});
  ASSERT_EQ(scan.size(), 3u);
  for (const auto& s : scan) EXPECT_TRUE(s.increasing_last_decade) << s.eps;

  auto d = gaussian(3.0, 10.0, 2000, 1, -1.0);
  const auto defocus = solve_radial(d, cfg);
  EXPECT_EQ(defocus.status, RunStatus::Done);
  for (const auto& s : concentration_scan(defocus, {0.1, 0.2, 0.4})) {
    EXPECT_FALSE(s.increasing_last_decade);
    for (double v : s.value) EXPECT_LE(v, 3.0 + 1e-9);
  }
}

TEST(RadialEvolution, ConcentrationScanZeroAndRange) {
  auto p = gaussian(0.0, 10.0, 500);
  RadialRunConfig cfg;
  cfg.t_end = 0.1;
  cfg.snapshot_radius = 1.0;
  const auto traj = solve_radial(p, cfg);
  for (const auto& s : concentration_scan(traj, {0.1, 0.5})) {
    for (double v : s.value) EXPECT_EQ(v, 0.0);
    EXPECT_FALSE(s.increasing_last_decade);
  }
  EXPECT_THROW(concentration_scan(traj, {2.0}), InvalidArgument);
}

TEST(GroundStateShooting, TownesProfile) {
  const auto gs = shoot_ground_state(2.0, 30.0, {2.0, 2.5}, 1e-3);
  EXPECT_NEAR(gs.q0, 2.2062, 1e-4);
  for (std::size_t i = 1; i < gs.q.size(); ++i) {
    ASSERT_GT(gs.q[i], 0.0);
    ASSERT_LT(gs.q[i], gs.q[i - 1]);
  }
  EXPECT_NEAR(gs.mass(), 11.70, 0.01);
  EXPECT_LT(gs.residual, 1e-8);
  EXPECT_LT(gs.tail_ratio, 1e-8);
  EXPECT_GT(gs.r_match, 5.0);
  EXPECT_NEAR(gs.value_at(0.0), gs.q0, 1e-15);

  const auto wider = shoot_ground_state(2.0, 60.0, {2.0, 2.5}, 1e-3);
  const auto finer = shoot_ground_state(2.0, 30.0, {2.0, 2.5}, 5e-4);
  EXPECT_LT(std::abs(wider.q0 - gs.q0), 1e-8);
  EXPECT_LT(std::abs(finer.q0 - gs.q0), 1e-8);
  EXPECT_LT(std::abs(finer.mass() / gs.mass() - 1.0), 1e-4);
  EXPECT_LT(std::abs(wider.mass() / gs.mass() - 1.0), 1e-4);
}

TEST(GroundStateShooting, RejectsBadBracket) {
  EXPECT_THROW(shoot_ground_state(2.0, 30.0, {0.1, 0.2}), InvalidArgument);
  EXPECT_THROW(shoot_ground_state(2.0, 30.0, {3.0, 4.0}), InvalidArgument);
  EXPECT_THROW(shoot_ground_state(2.0, 30.0, {2.0, 1.0}), InvalidArgument);
}

TEST(ConeLift, HyperbolaPairs) {
  const auto phi = gaussian(1.0, 12.0, 1200, 1);
  const auto psi = gaussian(1.0, 12.0, 1200, -1);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> cdist(0.2, 4.0), tdist(-1.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    const double c = cdist(rng), th1 = tdist(rng), th2 = tdist(rng);
    const double s = std::sqrt(c);
    const double exact = std::exp(-c);
    // D1: (s cosh, s sinh); D2: (s sinh, s cosh).
    const cplx a1 = cone_value(phi, psi, s * std::cosh(th1), s * std::sinh(th1));
    const cplx a2 = cone_value(phi, psi, -s * std::cosh(th2), s * std::sinh(th2));
    const cplx b1 = cone_value(phi, psi, s * std::sinh(th1), s * std::cosh(th1));
    const cplx b2 = cone_value(phi, psi, s * std::sinh(th2), -s * std::cosh(th2));
    EXPECT_LT(std::abs(a1 - a2), 1e-10);
    EXPECT_LT(std::abs(b1 - b2), 1e-10);
    EXPECT_NEAR(a1.real(), exact, 1e-8);
    EXPECT_NEAR(b1.real(), exact, 1e-8);
  }
}

TEST(ConeLift, IndicatorOnFirstRegion) {
  auto one = RadialProfile::sample(0.0, 20.0, 2000, [](double) { return cplx(1.0, 0.0); }, 1);
  auto zero = RadialProfile::sample(0.0, 20.0, 2000, [](double) { return cplx{}; }, -1);
  const auto g = make_grid(2, {32, 32}, {8.0, 8.0}, hnls_alpha(2));
  const auto cone = lift_to_cone(one, zero, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (cone.region[i] == 2) EXPECT_EQ(cone.field.values[i], cplx{});
    if (cone.region[i] == 1) EXPECT_NEAR(cone.field.values[i].real(), 1.0, 1e-12);
  }
}

TEST(ConeLift, RegionsOnGrid) {
  const auto phi = gaussian(1.0, 12.0, 600, 1, 1.0, 0.5);
  auto psi = RadialProfile::sample(0.5, 12.0, 600, [](double r) { return cplx(2.0 * std::exp(-r * r), 0.0); }, -1);
  const auto g = make_grid(2, {32, 32}, {8.0, 8.0}, hnls_alpha(2));
  const auto cone = lift_to_cone(phi, psi, g);
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto x = g->point(i);
    const double q = x[0] * x[0] - x[1] * x[1];
    const int expect = std::abs(q) < 0.25 ? 0 : (q > 0 ? 1 : 2);
    EXPECT_EQ(cone.region[i], expect);
    ++counts[cone.region[i]];
    if (expect == 0) EXPECT_EQ(cone.field.values[i], cplx{});
    if (expect == 2 && q < -0.3) EXPECT_NEAR(cone.field.values[i].real(), 2.0 * std::exp(q), 1e-6);
  }
  EXPECT_GT(counts[0], 0u);
  EXPECT_EQ(counts[1], counts[2]);
  EXPECT_THROW(lift_to_cone(psi, phi, g), InvalidArgument);
}

TEST(ConeTrace, ContinuityAndJumpOfTransformedSoliton) {
  // V = e^{it} Q on D1 and W, the pseudo-conformal image of e^{it} Q with
  // a0 = -1, on D2. Both solve the focusing radial equation. They agree at
  // t = 0 in modulus at the vertex; at t = 1/2 |W(0)| = 2 Q(0).
  const auto gs = shoot_ground_state(2.0, 30.0, {2.0, 2.5}, 1e-3);
  const double r_max = 20.0;
  const std::size_t n = 2000;
  const auto v0 = RadialProfile::sample(0.0, r_max, n, [&](double r) { return cplx(gs.value_at(r), 0.0); }, 1);
  const auto w0 = RadialProfile::sample(
      0.0, r_max, n, [&](double r) { return gs.value_at(r) * std::polar(1.0, 1.0 - r * r / 4.0); }, 1);
  EXPECT_LT(cone_trace_jump(v0, w0), 1e-14);

  const auto v = solve_radial(v0, 1e-3, 0.5);
  const auto w = solve_radial(w0, 1e-3, 0.5);
  ASSERT_EQ(v.status, RunStatus::Done);
  ASSERT_EQ(w.status, RunStatus::Done);
  EXPECT_LT(cone_trace_jump(v, w, 0.0), 1e-14);
  EXPECT_EQ(cone_trace_jump(w, w, 0.5), 0.0);
  const double jump = cone_trace_jump(v, w, 0.5);
  EXPECT_NEAR(jump / gs.q0, 1.0, 0.05);

  // Against the closed form of W at t = 1/2.
  double err = 0.0;
  for (std::size_t i = 0; i <= n && w.final_profile.r(i) < 5.0; ++i) {
    const double r = w.final_profile.r(i);
    const cplx exact = 2.0 * std::polar(1.0, 2.0) * gs.value_at(2.0 * r) * std::polar(1.0, -r * r / 2.0);
    err = std::max(err, std::abs(w.final_profile.values[i] - exact));
  }
  EXPECT_LT(err / (2.0 * gs.q0), 1e-2);
}

TEST(ThetaFunctionals, GaussianMomentsAndFlux) {
  const double beta = 0.7;
  auto p = RadialProfile::sample(0.0, 10.0, 4000, [=](double r) { return std::exp(-r * r) * std::polar(1.0, beta * r * r); });
  const auto rep = theta_functionals(p);
  // int |x|^2 e^{-2 r^2} = pi / 4; Im int 2 x . grad u conj(u) = pi beta
  EXPECT_NEAR(rep.moment, kPi / 4.0, 1e-6);
  EXPECT_NEAR(rep.flux, kPi * beta, 1e-5);
  EXPECT_NEAR(rep.energy, radial_energy(p), 0.0);

  auto ext = RadialProfile::sample(0.5, 10.0, 4000, [](double r) { return cplx(std::exp(-r * r), 0.0); });
  const auto rext = theta_functionals(ext);
  EXPECT_NEAR(rext.flux, 0.0, 1e-14);
  EXPECT_FALSE(rext.flux_condition);
  EXPECT_GT(rext.moment, 0.0);
}
