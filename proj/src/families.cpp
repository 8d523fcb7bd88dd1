#include "hnls/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"
#include "hnls/transforms.hpp"

namespace hnls {

namespace {

constexpr double kIntegerTol = 1e-9;

bool near_integer(double v) { return std::abs(v - std::round(v)) <= kIntegerTol * std::max(1.0, std::abs(v)); }

// Transverse part of a flat index, used to group points with equal y.
std::size_t transverse_key(const Grid& grid, std::size_t flat) {
  const auto idx = grid.unflatten(flat);
  return flat - idx[0] * grid.stride(0);
}

RunResult run_profile(const ComplexField& f0, double lambda, double sigma, double t_end, double dt) {
  EvolutionProblem p;
  p.grid = f0.grid;
  p.lambda = lambda;
  p.sigma = sigma;
  RunConfig cfg;
  cfg.t_end = t_end;
  cfg.dt0 = dt;
  cfg.sample_stride = std::numeric_limits<std::size_t>::max();
  return run(StepperState(f0, t_end >= f0.t ? dt : -dt), p, cfg);
}

}  // namespace

double PlaneWaveSpec::c_norm2() const {
  double s = 0.0;
  for (double v : c) s += v * v;
  return s;
}

bool PlaneWaveSpec::unit_speed() const { return std::abs(c_norm2() - 1.0) <= 1e-12; }

ComplexField PlaneWaveSpec::profile_field(double t) const {
  if (f0.size() < 2 || !(period > 0.0)) throw InvalidArgument("PlaneWaveSpec: need a profile and a positive period");
  return ComplexField(make_line_grid(f0.size(), period, profile_alpha()), f0, t);
}

void PlaneWaveSpec::validate(const Grid& grid) const {
  if (grid.dim() < 2) throw InvalidArgument("PlaneWaveSpec: grid must have at least two axes");
  if (c.size() != grid.dim() - 1) throw InvalidArgument("PlaneWaveSpec: need one speed per transverse axis");
  if (!(sigma > 0.0) || !(dt > 0.0)) throw InvalidArgument("PlaneWaveSpec: sigma and dt must be positive");
  if (f0.size() != grid.n(0)) throw InvalidArgument("PlaneWaveSpec: profile size must equal n_x");
  if (std::abs(period - grid.length(0)) > 1e-12 * grid.length(0))
    throw InvalidArgument("PlaneWaveSpec: period must equal len_x");
  for (std::size_t j = 1; j < grid.dim(); ++j) {
    if (!near_integer(c[j - 1] * grid.length(j) / grid.length(0)))
      throw InvalidArgument("PlaneWaveSpec: c_j len_y / len_x must be an integer");
  }
  for (auto z : f0) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalError("PlaneWaveSpec: non-finite profile");
  }
}

ComplexField plane_wave_profile(const PlaneWaveSpec& spec, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("plane_wave_profile: t must be non-negative");
  ComplexField f = spec.profile_field();
  if (spec.unit_speed()) {
    for (auto& z : f.values) z *= std::polar(1.0, spec.lambda * std::pow(std::abs(z), spec.sigma) * t);
    f.t = t;
    return f;
  }
  auto res = run_profile(f, spec.lambda, spec.sigma, t, spec.dt);
  if (res.state.status != RunStatus::Done) throw NumericalError("plane_wave_profile: profile evolution blew up");
  return std::move(res.state.field);
}

ComplexField lift_plane_wave(const ComplexField& profile, std::span<const double> c, const GridPtr& grid) {
  if (!grid || grid->dim() < 2 || c.size() != grid->dim() - 1)
    throw InvalidArgument("lift_plane_wave: grid and speed do not match");
  const auto& pg = *profile.grid;
  if (pg.dim() != 1 || pg.n(0) != grid->n(0) || std::abs(pg.length(0) - grid->length(0)) > 1e-12 * grid->length(0))
    throw InvalidArgument("lift_plane_wave: profile grid must match the x axis");
  const std::size_t n = pg.n(0);
  const double h = pg.spacing(0);

  ComplexField out(grid, profile.t);
  std::unordered_map<std::size_t, std::vector<cplx>> rows;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const std::size_t key = transverse_key(*grid, i);
    auto it = rows.find(key);
    if (it == rows.end()) {
      const auto x = grid->point(i);
      double delta = 0.0;
      for (std::size_t j = 1; j < grid->dim(); ++j) delta += c[j - 1] * x[j];
      const double s = delta / h;
      std::vector<cplx> row(n);
      if (std::abs(s - std::round(s)) <= kIntegerTol) {
        const auto m = static_cast<long long>(std::llround(s));
        const auto nn = static_cast<long long>(n);
        for (std::size_t q = 0; q < n; ++q) row[q] = profile.values[static_cast<std::size_t>(((static_cast<long long>(q) - m) % nn + nn) % nn)];
      } else {
        const double shift[1] = {delta};
        row = spectral_shift(profile, shift).values;
      }
      it = rows.emplace(key, std::move(row)).first;
    }
    out.values[i] = it->second[grid->unflatten(i)[0]];
  }
  return out;
}

ComplexField plane_wave_field(const PlaneWaveSpec& spec, double t, const GridPtr& grid) {
  if (!grid) throw InvalidArgument("plane_wave_field: grid is required");
  spec.validate(*grid);
  if (spec.unit_speed()) {
    ComplexField u = lift_plane_wave(spec.profile_field(), spec.c, grid);
    for (auto& z : u.values) z *= std::polar(1.0, spec.lambda * std::pow(std::abs(z), spec.sigma) * t);
    u.t = t;
    return u;
  }
  return lift_plane_wave(plane_wave_profile(spec, t), spec.c, grid);
}

GridPtr transverse_grid(const Grid& grid) {
  if (grid.dim() < 2) throw InvalidArgument("transverse_grid: need at least two axes");
  std::vector<std::size_t> n;
  std::vector<double> len, alpha;
  for (std::size_t j = 1; j < grid.dim(); ++j) {
    n.push_back(grid.n(j));
    len.push_back(grid.length(j));
    alpha.push_back(1.0);
  }
  return make_grid_any(n, len, alpha);
}

void StandingWaveSpec::validate(const Grid& grid) const {
  if (!f0.grid) throw InvalidArgument("StandingWaveSpec: profile grid is required");
  if (grid.dim() < 2 || f0.grid->dim() != grid.dim() - 1)
    throw InvalidArgument("StandingWaveSpec: profile must live on the transverse axes");
  for (std::size_t j = 1; j < grid.dim(); ++j) {
    if (f0.grid->n(j - 1) != grid.n(j) || std::abs(f0.grid->length(j - 1) - grid.length(j)) > 1e-12 * grid.length(j))
      throw InvalidArgument("StandingWaveSpec: transverse axes do not match the grid");
  }
  if (!near_integer(omega * grid.length(0) / (2.0 * std::numbers::pi)))
    throw InvalidArgument("StandingWaveSpec: omega must be a harmonic 2 pi m / len_x");
  if (!(sigma > 0.0) || !(dt > 0.0)) throw InvalidArgument("StandingWaveSpec: sigma and dt must be positive");
  require_finite(f0, "StandingWaveSpec");
}

ComplexField standing_wave_profile(const StandingWaveSpec& spec, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("standing_wave_profile: t must be non-negative");
  // Transverse equation with alpha = +1 and the nonlinearity sign flipped, run backwards.
  ComplexField f0(make_grid_any(std::vector<std::size_t>(spec.f0.grid->shape().begin(), spec.f0.grid->shape().end()),
                                std::vector<double>(spec.f0.grid->lengths().begin(), spec.f0.grid->lengths().end()),
                                std::vector<double>(spec.f0.grid->dim(), 1.0)),
                  spec.f0.values, 0.0);
  if (t == 0.0) return f0;
  auto res = run_profile(f0, -spec.lambda, spec.sigma, -t, spec.dt);
  if (res.state.status != RunStatus::Done) throw NumericalError("standing_wave_profile: profile evolution blew up");
  return std::move(res.state.field);
}

ComplexField lift_standing_wave(const ComplexField& g, double omega, double t, const GridPtr& grid) {
  if (!grid || grid->dim() < 2 || !g.grid || g.grid->dim() != grid->dim() - 1)
    throw InvalidArgument("lift_standing_wave: profile must live on the transverse axes");
  ComplexField out(grid, t);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto idx = grid->unflatten(i);
    std::size_t flat = 0;
    for (std::size_t j = 1; j < grid->dim(); ++j) flat += idx[j] * g.grid->stride(j - 1);
    const double x = grid->coords(0)[idx[0]];
    out.values[i] = std::polar(1.0, omega * x - omega * omega * t) * g.values[flat];
  }
  return out;
}

ComplexField standing_wave_field(const StandingWaveSpec& spec, double t, const GridPtr& grid) {
  if (!grid) throw InvalidArgument("standing_wave_field: grid is required");
  spec.validate(*grid);
  return lift_standing_wave(standing_wave_profile(spec, t), spec.omega, t, grid);
}

namespace {

struct BoundStateTerms {
  ComplexField box;
  std::vector<cplx> nonlinear;
  std::vector<cplx> potential;
  std::vector<cplx> residual;
};

BoundStateTerms bound_state_terms(const ComplexField& a, const std::vector<double>& v, double lambda, double sigma) {
  BoundStateTerms t{apply_signature_operator(a), {}, {}, {}};
  const std::size_t n = a.size();
  t.nonlinear.resize(n);
  t.potential.resize(n);
  t.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nonlinear[i] = lambda * std::pow(std::abs(a.values[i]), sigma) * a.values[i];
    t.potential[i] = v[i] * a.values[i];
    t.residual[i] = t.box.values[i] + t.nonlinear[i] - t.potential[i];
  }
  return t;
}

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return std::sqrt(s);
}

BoundStateDefect defect_of(const BoundStateTerms& t) {
  const double den = norm2(t.box.values) + norm2(t.nonlinear) + norm2(t.potential);
  if (den == 0.0) return {0.0, true};
  return {norm2(t.residual) / den, false};
}

double bound_state_sigma(const Grid& g) { return 4.0 / static_cast<double>(g.dim()); }

}  // namespace

BoundStateDefect bound_state_defect(const ComplexField& a0, double k, double gamma0, double lambda) {
  if (!a0.grid) throw InvalidArgument("bound_state_defect: grid is required");
  require_finite(a0, "bound_state_defect");
  const auto v = harmonic_potential(*a0.grid, k, gamma0);
  return defect_of(bound_state_terms(a0, v, lambda, bound_state_sigma(*a0.grid)));
}

BoundStateCandidate refine_bound_state(const ComplexField& start, double k, double gamma0, double lambda,
                                       std::size_t iterations) {
  if (!start.grid) throw InvalidArgument("refine_bound_state: grid is required");
  require_finite(start, "refine_bound_state");
  const auto& grid = *start.grid;
  const double sigma = bound_state_sigma(grid);
  const auto v = harmonic_potential(grid, k, gamma0);
  const double mass = l2_norm(start);

  BoundStateCandidate out{start, {}};
  auto terms = bound_state_terms(out.field, v, lambda, sigma);
  out.defect_history.push_back(defect_of(terms).value);
  if (mass == 0.0) {
    out.defect_history.resize(iterations + 1, 0.0);
    return out;
  }

  const auto xi2 = grid.laplacian_symbol();
  double tau = 0.1;
  double objective = norm2(terms.residual);
  for (std::size_t it = 0; it < iterations; ++it) {
    // Gradient of ||R||^2 / 2 in the real inner product, then a smoothing preconditioner.
    const ComplexField r(start.grid, terms.residual, 0.0);
    ComplexField grad = apply_signature_operator(r);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const cplx a = out.field.values[i];
      const double m = std::abs(a);
      const double c1 = lambda * (0.5 * sigma + 1.0) * std::pow(m, sigma);
      const cplx c2 = m > 0.0 ? lambda * 0.5 * sigma * std::pow(m, sigma - 2.0) * a * a : cplx{};
      grad.values[i] += (c1 - v[i]) * r.values[i] + c2 * std::conj(r.values[i]);
    }
    auto spec = to_spectrum(grad);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] /= (1.0 + xi2[i]) * (1.0 + xi2[i]);
    grad = from_spectrum(start.grid, std::move(spec), 0.0);

    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      ComplexField trial = out.field;
      for (std::size_t i = 0; i < trial.size(); ++i) trial.values[i] -= tau * grad.values[i];
      const double nrm = l2_norm(trial);
      if (!(nrm > 0.0)) {
        tau *= 0.5;
        continue;
      }
      for (auto& z : trial.values) z *= mass / nrm;
      auto trial_terms = bound_state_terms(trial, v, lambda, sigma);
      const double obj = norm2(trial_terms.residual);
      if (obj < objective) {
        out.field = std::move(trial);
        terms = std::move(trial_terms);
        objective = obj;
        accepted = true;
        tau *= 1.2;
      } else {
        tau *= 0.5;
      }
    }
    out.defect_history.push_back(defect_of(terms).value);
  }
  return out;
}

SemiclassicalSpec SemiclassicalSpec::make(ComplexField a0_field, double k, double gamma0, double a0, double lambda) {
  SemiclassicalSpec s;
  s.defect = bound_state_defect(a0_field, k, gamma0, lambda);
  s.a0_field = std::move(a0_field);
  s.k = k;
  s.gamma0 = gamma0;
  s.a0 = a0;
  s.lambda = lambda;
  return s;
}

StationaryTrajectory::StationaryTrajectory(ComplexField profile, double gamma0)
    : GridTrajectory(profile.grid), profile_(std::move(profile)), gamma0_(gamma0) {}

double StationaryTrajectory::t_max() const { return std::numeric_limits<double>::max(); }

ComplexField StationaryTrajectory::field_at(double s) const {
  require_time(s);
  ComplexField out = profile_;
  const cplx phase = std::polar(1.0, gamma0_ * s);
  for (auto& z : out.values) z *= phase;
  out.t = s;
  return out;
}

ComplexField semiclassical_field(const SemiclassicalSpec& spec, double t, const GridPtr& grid) {
  if (!spec.a0_field.grid || !grid) throw InvalidArgument("semiclassical_field: grids are required");
  if (!(t >= 0.0)) throw InvalidArgument("semiclassical_field: t must be non-negative");
  const StationaryTrajectory base(spec.a0_field, spec.gamma0);
  const double times[2] = {0.0, t};
  const auto state = integrate_transform_odes(spec.a0, spec.k, grid->dim(), t > 0.0 ? std::span<const double>(times, 2)
                                                                                  : std::span<const double>(times, 1));
  if (state.truncated) throw NumericalError("semiclassical_field: t is at or beyond the singular time");
  return apply_pct(base, state, t, grid);
}

}  // namespace hnls
