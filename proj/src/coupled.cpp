#include "hnls/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"
#include "hnls/transforms.hpp"

namespace hnls {

namespace {

// Mass fraction of a field beyond 0.45 len on any axis.
double boundary_fraction(const ComplexField& f) { return mass_outside_center(f, 2.0 * kBoundaryBand); }

EvolutionProblem full_problem(const GridPtr& grid, const StructuredWave& w) {
  EvolutionProblem p;
  p.grid = grid;
  p.lambda = w.lambda();
  p.sigma = w.sigma();
  return p;
}

void coupling(const std::vector<cplx>& v, const std::vector<cplx>& phi, double lambda, double sigma,
              std::vector<cplx>& out) {
  const cplx il(0.0, lambda);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cplx w = v[i] + phi[i];
    out[i] = il * (std::pow(std::abs(w), sigma) * w - std::pow(std::abs(phi[i]), sigma) * phi[i]);
  }
}

double max_gradient(const ComplexField& f) {
  const auto grad = spectral_gradient(f);
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (const auto& g : grad) s += std::norm(g.values[i]);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

// Relative energy of the upper quarter of the spectrum.
double spectral_tail(const ComplexField& f) {
  const auto spec = to_spectrum(f);
  const auto& g = *f.grid;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto idx = g.unflatten(i);
    bool high = false;
    for (std::size_t j = 0; j < g.dim(); ++j) {
      const auto n = static_cast<long>(g.n(j));
      long m = static_cast<long>(idx[j]);
      if (m >= n / 2) m -= n;
      if (std::abs(m) > 3 * n / 8) high = true;
    }
    const double e = std::norm(spec[i]);
    total += e;
    if (high) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

void lint_profile(const ComplexField& f, std::vector<std::string>& warnings) {
  const double peak = linf_norm(f);
  if (peak == 0.0) return;
  if (mass_outside_center(f, 2.0 * kBoundaryBand) > 1e-12)
    warnings.push_back("profile does not decay before the box edge (weighted L2 moment unreliable)");
  if (spectral_tail(f) > 1e-12) warnings.push_back("profile spectrum is not resolved (H^2 smoothness unverified)");
}

}  // namespace

double profile_spectral_tail(const StructuredWave& wave) { return spectral_tail(wave.profile()); }

StructuredWave StructuredWave::plane(PlaneWaveSpec spec) {
  StructuredWave w;
  w.kind_ = WaveKind::Plane;
  w.profile_ = spec.profile_field();
  w.problem_ = EvolutionProblem{w.profile_.grid, spec.lambda, spec.sigma, std::nullopt};
  w.plane_ = std::move(spec);
  return w;
}

StructuredWave StructuredWave::standing(StandingWaveSpec spec) {
  StructuredWave w;
  w.kind_ = WaveKind::Standing;
  w.profile_ = standing_wave_profile(spec, 0.0);
  w.problem_ = EvolutionProblem{w.profile_.grid, -spec.lambda, spec.sigma, std::nullopt};
  w.standing_ = std::move(spec);
  return w;
}

double StructuredWave::lambda() const { return kind_ == WaveKind::Plane ? plane_.lambda : standing_.lambda; }
double StructuredWave::sigma() const { return kind_ == WaveKind::Plane ? plane_.sigma : standing_.sigma; }

void StructuredWave::validate(const Grid& grid) const {
  if (kind_ == WaveKind::Plane) plane_.validate(grid);
  else standing_.validate(grid);
}

ComplexField StructuredWave::lift(const GridPtr& grid) const {
  ComplexField out = kind_ == WaveKind::Plane ? lift_plane_wave(profile_, plane_.c, grid)
                                              : lift_standing_wave(profile_, standing_.omega, t_, grid);
  out.t = t_;
  return out;
}

void StructuredWave::advance(double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("StructuredWave::advance: dt must be positive");
  if (status_ != RunStatus::Running) return;
  // Standing-wave profiles run backwards in their own time.
  StepperState s(profile_, kind_ == WaveKind::Plane ? dt : -dt);
  s.t = profile_.t;
  step_strang_in_place(s, problem_);
  if (s.status != RunStatus::Running) {
    status_ = s.status;
    return;
  }
  profile_ = std::move(s.field);
  t_ += dt;
}

double StructuredWave::linf() const { return linf_norm(profile_); }

double StructuredWave::grad_linf(const GridPtr& grid) const { return max_gradient(lift(grid)); }

DecomposedState DecomposedState::make(const ComplexField& v0, StructuredWave wave) {
  if (!v0.grid) throw InvalidArgument("DecomposedState: v0 needs a grid");
  wave.validate(*v0.grid);
  DecomposedState s;
  s.v = v0;
  s.u = v0 + wave.lift(v0.grid);
  s.wave = std::move(wave);
  s.t = s.wave.t();
  s.u.t = s.v.t = s.t;
  return s;
}

void step_decomposed(DecomposedState& s, double dt) {
  if (s.status != RunStatus::Running) return;
  StepperState full(s.u, dt);
  full.t = s.t;
  step_strang_in_place(full, full_problem(s.u.grid, s.wave));
  s.wave.advance(dt);
  if (full.status != RunStatus::Running || s.wave.status() != RunStatus::Running) {
    s.status = RunStatus::BlownUp;
    return;
  }
  s.u = std::move(full.field);
  s.t += dt;
  s.v = s.u - s.wave.lift(s.u.grid);
  s.u.t = s.v.t = s.t;
}

void step_perturbation(PerturbationState& s, double dt) {
  if (s.status != RunStatus::Running) return;
  const GridPtr& grid = s.v.grid;
  const double lambda = s.wave.lambda();
  const double sigma = s.wave.sigma();

  ComplexField v = apply_linear_propagator(s.v, 0.5 * dt);
  const auto phi0 = s.wave.lift(grid);
  s.wave.advance(0.5 * dt);
  const auto phih = s.wave.lift(grid);
  s.wave.advance(0.5 * dt);
  const auto phi1 = s.wave.lift(grid);
  if (s.wave.status() != RunStatus::Running) {
    s.status = RunStatus::BlownUp;
    return;
  }

  const std::size_t n = v.size();
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
  coupling(v.values, phi0.values, lambda, sigma, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v.values[i] + 0.5 * dt * k1[i];
  coupling(tmp, phih.values, lambda, sigma, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v.values[i] + 0.5 * dt * k2[i];
  coupling(tmp, phih.values, lambda, sigma, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v.values[i] + dt * k3[i];
  coupling(tmp, phi1.values, lambda, sigma, k4);
  for (std::size_t i = 0; i < n; ++i) v.values[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  v = apply_linear_propagator(v, 0.5 * dt);
  if (!v.all_finite()) {
    s.status = RunStatus::BlownUp;
    return;
  }
  s.t += dt;
  v.t = s.t;
  s.v = std::move(v);
}

const char* to_string(StabilityStatus s) {
  switch (s) {
    case StabilityStatus::Bounded: return "Bounded";
    case StabilityStatus::Grew: return "Grew";
    case StabilityStatus::BlownUp: return "BlownUp";
  }
  return "?";
}

RegimeCheck check_regime(const StructuredWave& wave, const Grid& grid) {
  RegimeCheck r;
  const std::size_t d = grid.dim();
  const double lambda = wave.lambda();
  const double sigma = wave.sigma();
  if (wave.kind() == WaveKind::Plane) {
    const double c = std::sqrt(wave.plane_spec().c_norm2());
    r.in_regime = d == 2 && sigma == 4.0 && (c - 1.0) * lambda > 0.0;
    r.label = r.in_regime ? "plane wave, d=2, sigma=4, (|c|-1) lambda > 0"
                          : "plane wave outside the certified regime (d=2, sigma=4, (|c|-1) lambda > 0)";
  } else {
    r.in_regime = lambda > 0.0 && ((d == 2 && sigma == 4.0) || (d == 3 && sigma == 2.0));
    r.label = r.in_regime ? "standing wave, lambda > 0, (d, sigma) in {(2, 4), (3, 2)}"
                          : "standing wave outside the certified regime (lambda > 0, (d, sigma) in {(2, 4), (3, 2)})";
    if (r.in_regime && d == 3) r.warnings.push_back("d=3 also needs a small H^3 profile; not checked");
  }
  lint_profile(wave.profile(), r.warnings);
  return r;
}

std::vector<StabilityReport> stability_run(const StructuredWave& wave, const ComplexField& v0_shape,
                                           const std::vector<double>& eps_list, const StabilityConfig& config) {
  if (!v0_shape.grid) throw InvalidArgument("stability_run: v0 shape needs a grid");
  if (!(config.dt > 0.0) || !(config.t_end > 0.0) || config.sample_stride == 0)
    throw InvalidArgument("stability_run: need dt > 0, t_end > 0 and a positive sample stride");
  wave.validate(*v0_shape.grid);
  const double shape_norm = h1_norm(v0_shape);
  const GridPtr& grid = v0_shape.grid;
  const RegimeCheck regime = check_regime(wave, *grid);
  const auto steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));

  std::vector<StabilityReport> out;
  for (double eps : eps_list) {
    if (!(eps >= 0.0)) throw InvalidArgument("stability_run: eps must be non-negative");
    StabilityReport rep;
    rep.eps = eps;
    rep.regime = regime;
    if (!(config.resolution_tail > 0.0)) throw InvalidArgument("stability_run: resolution_tail must be positive");
    if (eps == 0.0) {
      // v = 0 solves the perturbation equation exactly.
      rep.t = {0.0, config.t_end};
      rep.h = {0.0, 0.0};
      out.push_back(std::move(rep));
      continue;
    }
    if (!(shape_norm > 0.0)) throw InvalidArgument("stability_run: v0 shape has zero H^1 norm");
    ComplexField v0 = (eps / shape_norm) * v0_shape;
    auto s = DecomposedState::make(v0, wave);
    const double ceiling = 1e6 * std::max(linf_norm(s.u), 1.0);

    auto record = [&] {
      const double h = h1_norm(s.v);
      rep.t.push_back(s.t);
      rep.h.push_back(h);
      rep.h_sup = std::max(rep.h_sup, h);
      rep.wave_linf.push_back(s.wave.linf());
      rep.wave_grad_linf.push_back(s.wave.grad_linf(grid));
    };
    record();
    for (std::size_t k = 1; k <= steps; ++k) {
      step_decomposed(s, k == steps ? config.t_end - s.t : config.dt);
      if (s.status != RunStatus::Running) rep.detection = "non-finite values";
      else if (linf_norm(s.u) > ceiling) rep.detection = "amplitude ceiling";
      if (!rep.detection.empty()) {
        rep.status = StabilityStatus::BlownUp;
        rep.t_detect = s.t;
        break;
      }
      if (k % config.sample_stride == 0 || k == steps) {
        record();
        if (spectral_tail(s.wave.profile()) > config.resolution_tail) {
          rep.detection = "profile concentrated below the grid scale";
          rep.status = StabilityStatus::BlownUp;
          rep.t_detect = s.t;
          break;
        }
      }
    }
    rep.growth_ratio = rep.h_sup / eps;
    if (rep.status != StabilityStatus::BlownUp && rep.growth_ratio > config.growth_limit)
      rep.status = StabilityStatus::Grew;
    out.push_back(std::move(rep));
  }
  return out;
}

TwoWaveSeries two_wave_run(StructuredWave w1, StructuredWave w2, const ComplexField& v0, double t_end, double dt,
                           std::size_t sample_stride) {
  if (!v0.grid || v0.grid->dim() != 2) throw InvalidArgument("two_wave_run: needs a two-dimensional grid");
  if (w1.kind() != WaveKind::Plane || w2.kind() != WaveKind::Plane)
    throw InvalidArgument("two_wave_run: both waves must be plane waves");
  if (w1.plane_spec().c == w2.plane_spec().c) throw InvalidArgument("two_wave_run: speeds must differ");
  if (w1.lambda() != w2.lambda() || w1.sigma() != w2.sigma())
    throw InvalidArgument("two_wave_run: both waves must share lambda and sigma");
  if (!(w1.sigma() >= 1.0)) throw InvalidArgument("two_wave_run: sigma must be at least 1");
  if (!(dt > 0.0) || !(t_end > 0.0) || sample_stride == 0) throw InvalidArgument("two_wave_run: bad time stepping");
  w1.validate(*v0.grid);
  w2.validate(*v0.grid);
  const GridPtr& grid = v0.grid;

  TwoWaveSeries out;
  out.product_scale = h1_norm(w1.profile()) * h1_norm(w2.profile());
  StepperState full(v0 + w1.lift(grid) + w2.lift(grid), dt);
  const EvolutionProblem p = full_problem(grid, w1);

  auto record = [&] {
    out.remainder = full.field - w1.lift(grid) - w2.lift(grid);
    out.remainder.t = full.t;
    out.t.push_back(full.t);
    out.remainder_h1.push_back(h1_norm(out.remainder));
    // A remainder at rounding level has no meaningful spatial distribution.
    const bool noise = l2_norm(out.remainder) <= 1e-12 * l2_norm(full.field);
    out.boundary_fraction.push_back(noise ? 0.0 : boundary_fraction(out.remainder));
  };
  record();
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double h = k == steps ? t_end - full.t : dt;
    full.dt = h;
    step_strang_in_place(full, p);
    w1.advance(h);
    w2.advance(h);
    if (full.status != RunStatus::Running || w1.status() != RunStatus::Running || w2.status() != RunStatus::Running) {
      out.status = RunStatus::BlownUp;
      return out;
    }
    if (k % sample_stride == 0 || k == steps) record();
  }
  out.status = RunStatus::Done;
  return out;
}

}  // namespace hnls
