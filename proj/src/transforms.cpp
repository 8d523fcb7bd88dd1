#include "hnls/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"

namespace hnls {

namespace {

// State of the first-order system: a, a', log b, g.
struct OdeY {
  double a;
  double ap;
  double lb;
  double g;
};

constexpr double kMaxOdeStep = 1e-3;
constexpr double kStepScale = 0.005;

OdeY rhs(const OdeY& y) { return {y.ap, -6.0 * y.a * y.ap - 4.0 * y.a * y.a * y.a, y.a, std::exp(-2.0 * y.lb)}; }

OdeY axpy(const OdeY& y, double h, const OdeY& k) { return {y.a + h * k.a, y.ap + h * k.ap, y.lb + h * k.lb, y.g + h * k.g}; }

OdeY rk4(const OdeY& y, double h) {
  const OdeY k1 = rhs(y);
  const OdeY k2 = rhs(axpy(y, 0.5 * h, k1));
  const OdeY k3 = rhs(axpy(y, 0.5 * h, k2));
  const OdeY k4 = rhs(axpy(y, h, k3));
  return {y.a + h / 6.0 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a), y.ap + h / 6.0 * (k1.ap + 2 * k2.ap + 2 * k3.ap + k4.ap),
          y.lb + h / 6.0 * (k1.lb + 2 * k2.lb + 2 * k3.lb + k4.lb), y.g + h / 6.0 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g)};
}

// RK4 step followed by projection of a' onto a' + a^2 = 4k b^-4. Without it
// the k = 0 trajectory (a double root of b^2) can drift past the pole.
OdeY advance(const OdeY& y, double h, double k) {
  OdeY n = rk4(y, h);
  n.ap = 4.0 * k * std::exp(-4.0 * n.lb) - n.a * n.a;
  return n;
}

double natural_step(const OdeY& y) {
  const double rate = std::max({std::abs(y.a), std::sqrt(std::abs(y.ap)), 1e-300});
  return std::min(kMaxOdeStep, kStepScale / rate);
}

bool finite(const OdeY& y) { return std::isfinite(y.a) && std::isfinite(y.ap) && std::isfinite(y.lb) && std::isfinite(y.g); }

bool singular(const OdeY& y) { return !finite(y) || std::exp(y.lb) < kSingularB; }

OdeY initial(double a0, double k) { return {a0, 4.0 * k - a0 * a0, 0.0, 0.0}; }

TransformCoefficients to_coefficients(double t, const OdeY& y, std::size_t d) {
  TransformCoefficients c;
  c.t = t;
  c.a = y.a;
  c.ap = y.ap;
  c.b = std::exp(y.lb);
  c.f = std::exp(-0.5 * static_cast<double>(d) * y.lb);
  c.g = y.g;
  return c;
}

double quadratic_form(const std::array<double, kMaxDim>& x, std::size_t d) {
  double q = x[0] * x[0];
  for (std::size_t j = 1; j < d; ++j) q -= x[j] * x[j];
  return q;
}

ComplexField pct_evaluate(const TrajectorySampler& u, const TransformCoefficients& co, const GridPtr& target, double c) {
  ComplexField w = u.scaled(co.g, target, c / co.b);
  const std::size_t d = target->dim();
  for (std::size_t i = 0; i < target->size(); ++i) {
    auto x = target->point(i);
    for (std::size_t j = 0; j < d; ++j) x[j] *= c;
    w.values[i] *= co.f * std::polar(1.0, 0.25 * co.a * quadratic_form(x, d));
  }
  w.t = co.t;
  return w;
}

double rel(double lhs, double rhs) { return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}); }

}  // namespace

TransformCoefficients TransformState::at(std::size_t i) const {
  TransformCoefficients c;
  c.t = t.at(i);
  c.a = a[i];
  c.ap = ap[i];
  c.b = b[i];
  c.f = f[i];
  c.g = g[i];
  return c;
}

TransformState integrate_transform_odes(double a0, double k, std::size_t d, std::span<const double> t_grid) {
  if (d == 0 || d > kMaxDim) throw InvalidArgument("integrate_transform_odes: d must be 1..3");
  if (!std::isfinite(a0) || !std::isfinite(k)) throw InvalidArgument("integrate_transform_odes: a0 and k must be finite");
  if (t_grid.empty() || t_grid.front() != 0.0) throw InvalidArgument("integrate_transform_odes: t_grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("integrate_transform_odes: t_grid must increase strictly");
  }
  TransformState s;
  s.a0 = a0;
  s.k = k;
  s.d = d;
  auto store = [&](double t, const OdeY& y) {
    const auto c = to_coefficients(t, y, d);
    s.t.push_back(t);
    s.a.push_back(c.a);
    s.ap.push_back(c.ap);
    s.b.push_back(c.b);
    s.f.push_back(c.f);
    s.g.push_back(c.g);
  };

  OdeY y = initial(a0, k);
  double t = 0.0;
  store(t, y);
  for (std::size_t i = 1; i < t_grid.size() && !s.truncated; ++i) {
    const double target = t_grid[i];
    while (t < target) {
      const double h = std::min(natural_step(y), target - t);
      const OdeY next = advance(y, h, k);
      if (singular(next)) {
        s.truncated = true;
        const OdeY& last = finite(next) ? next : y;
        const double tl = finite(next) ? t + h : t;
        s.singular_time = last.ap != 0.0 ? tl + last.a / last.ap : tl;
        break;
      }
      y = next;
      t = (h == target - t) ? target : t + h;
    }
    if (!s.truncated) store(target, y);
  }
  return s;
}

TransformCoefficients transform_coefficients(double a0, double k, std::size_t d, double t) {
  if (t == 0.0) return to_coefficients(0.0, initial(a0, k), d);
  if (!(t > 0.0)) throw InvalidArgument("transform_coefficients: t must be non-negative");
  const double grid[2] = {0.0, t};
  const auto s = integrate_transform_odes(a0, k, d, grid);
  if (s.truncated) throw NumericalError("transform_coefficients: b vanishes before the requested time");
  return s.at(1);
}

double closed_form_b(double a0, double k, double t) {
  const double q = (1.0 + a0 * t) * (1.0 + a0 * t) + 4.0 * k * t * t;
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

double closed_form_a(double a0, double k, double t) {
  const double A = a0 * a0 + 4.0 * k;
  return (A * t + a0) / (A * t * t + 2.0 * a0 * t + 1.0);
}

double closed_form_g(double a0, double k, double t) {
  // Q = A t^2 + 2 a0 t + 1 has A Q = (A t + a0)^2 + 4k.
  const double A = a0 * a0 + 4.0 * k;
  if (k > 0.0) {
    const double s = 2.0 * std::sqrt(k);
    return (std::atan((A * t + a0) / s) - std::atan(a0 / s)) / s;
  }
  if (k == 0.0) return t / (1.0 + a0 * t);
  if (A == 0.0) return std::log1p(2.0 * a0 * t) / (2.0 * a0);
  const double s = 2.0 * std::sqrt(-k);
  const double x = A * t + a0;
  return (std::log(std::abs((x - s) / (x + s))) - std::log(std::abs((a0 - s) / (a0 + s)))) / (2.0 * s);
}

std::optional<double> closed_form_singular_time(double a0, double k) {
  // (a0^2 + 4k) t^2 + 2 a0 t + 1 = 0
  const double A = a0 * a0 + 4.0 * k;
  const double B = 2.0 * a0;
  std::optional<double> best;
  auto consider = [&](double r) {
    if (r > 0.0 && (!best || r < *best)) best = r;
  };
  if (A == 0.0) {
    if (B != 0.0) consider(-1.0 / B);
    return best;
  }
  const double disc = B * B - 4.0 * A;
  if (disc < 0.0) return best;
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
  if (q != 0.0) {
    consider(q / A);
    consider(1.0 / q);
  }
  return best;
}

double sqrt_rule_singular_time(double a0, double k) {
  const double A = a0 * a0 + 4.0 * k;
  const double c2 = A != 0.0 ? a0 / A : 0.0;
  return std::sqrt(4.0 * std::abs(k)) - c2;
}

std::optional<double> b_crossing_time(double a0, double k, double level, double t_max) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("b_crossing_time: level must lie in (0, 1)");
  const double log_level = std::log(level);
  OdeY y = initial(a0, k);
  double t = 0.0;
  while (t < t_max) {
    const double h = std::min(natural_step(y), t_max - t);
    const OdeY next = advance(y, h, k);
    if (!finite(next) || next.lb <= log_level) {
      double lo = 0.0;
      double hi = h;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const OdeY ym = advance(y, mid, k);
        if (finite(ym) && ym.lb > log_level) lo = mid;
        else hi = mid;
      }
      return t + 0.5 * (lo + hi);
    }
    y = next;
    t += h;
  }
  return std::nullopt;
}

double ConstraintResiduals::max() const { return std::max({i, ii, iii, iv, v, vi, fb}); }

ConstraintResiduals constraint_residuals(const TransformState& s) {
  const std::size_t n = s.size();
  if (n < 5) throw InvalidArgument("constraint_residuals: at least 5 samples are required");
  const double h = s.t[1] - s.t[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((s.t[i] - s.t[i - 1]) - h) > 1e-9 * h) throw InvalidArgument("constraint_residuals: time grid must be uniform");
  }
  auto deriv = [&](const std::vector<double>& y, std::size_t i) {
    return (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
  };
  const double half_d = 0.5 * static_cast<double>(s.d);
  ConstraintResiduals r;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    r.i = std::max(r.i, rel(deriv(s.f, i), -half_d * s.a[i] * s.f[i]));
    r.ii = std::max(r.ii, rel(deriv(s.b, i), s.a[i] * s.b[i]));
    r.iv = std::max(r.iv, rel(deriv(s.g, i), 1.0 / (s.b[i] * s.b[i])));
    r.v = std::max(r.v, rel(deriv(s.a, i) + s.a[i] * s.a[i], 4.0 * s.k / std::pow(s.b[i], 4)));
  }
  r.iii = std::abs(s.b[0] - 1.0) + std::abs(s.f[0] - 1.0) + std::abs(s.a[0] - s.a0) +
          std::abs(s.ap[0] - (4.0 * s.k - s.a0 * s.a0));
  r.vi = std::abs(s.g[0]);
  for (std::size_t i = 0; i < n; ++i) r.fb = std::max(r.fb, std::abs(s.f[i] * std::pow(s.b[i], half_d) - 1.0));
  return r;
}

ComplexField apply_pct(const TrajectorySampler& u, const TransformState& state, double t, const GridPtr& grid) {
  if (!grid) throw InvalidArgument("apply_pct: grid is required");
  if (grid->dim() != state.d) throw InvalidArgument("apply_pct: grid dimension differs from the transform's d");
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(state.t.begin(), state.t.end(), t - tol);
  TransformCoefficients co;
  if (it != state.t.end() && std::abs(*it - t) <= tol) {
    co = state.at(static_cast<std::size_t>(it - state.t.begin()));
  } else {
    co = transform_coefficients(state.a0, state.k, state.d, t);
  }
  return pct_evaluate(u, co, grid, 1.0);
}

PctTrajectory::PctTrajectory(SamplerPtr base, double a0, double k, double t_max)
    : base_(std::move(base)), a0_(a0), k_(k), t_max_(t_max) {
  if (!base_) throw InvalidArgument("PctTrajectory: base sampler is required");
  if (!(t_max >= 0.0)) throw InvalidArgument("PctTrajectory: t_max must be non-negative");
  if (base_->t_min() > 0.0) throw InvalidArgument("PctTrajectory: base sampler must cover s = 0");
  TransformCoefficients co;
  try {
    co = transform_coefficients(a0, k, base_->dim(), t_max);
  } catch (const NumericalError&) {
    throw InvalidArgument("PctTrajectory: transform is singular before t_max");
  }
  if (co.g > base_->t_max()) throw InvalidArgument("PctTrajectory: g(t_max) exceeds the base trajectory");
}

ComplexField PctTrajectory::scaled(double t, const GridPtr& target, double c) const {
  require_time(t);
  const auto co = transform_coefficients(a0_, k_, base_->dim(), std::clamp(t, 0.0, t_max_));
  auto out = pct_evaluate(*base_, co, target, c);
  out.t = t;
  return out;
}

double mass_outside_center(const ComplexField& u, double fraction) {
  const Grid& g = *u.grid;
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rho = std::norm(u.values[i]);
    total += rho;
    const auto x = g.point(i);
    for (std::size_t j = 0; j < g.dim(); ++j) {
      if (std::abs(x[j]) > 0.5 * fraction * g.length(j)) {
        outside += rho;
        break;
      }
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

double symmetry_source_time(double t, const SymmetryParams& p) {
  switch (p.kind) {
    case SymmetryKind::Translation:
      return t - p.t0;
    case SymmetryKind::Dilation:
      return p.scale * p.scale * t;
    default:
      return t;
  }
}

ComplexField apply_symmetry(const ComplexField& u, const SymmetryParams& p) {
  require_finite(u, "apply_symmetry");
  const Grid& g = *u.grid;
  const std::size_t d = g.dim();
  switch (p.kind) {
    case SymmetryKind::Translation: {
      auto out = spectral_shift(u, std::span<const double>(p.shift.data(), d));
      out.t = u.t + p.t0;
      return out;
    }
    case SymmetryKind::Gauge:
      return std::polar(1.0, p.theta) * u;
    case SymmetryKind::Galilean: {
      std::array<double, kMaxDim> shift{};
      double phase_t = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (p.velocity[j] == 0.0) continue;
        if (g.alpha(j) == 0.0) throw InvalidArgument("apply_symmetry: Galilean boost along an axis with alpha = 0");
        shift[j] = p.velocity[j] * u.t;
        phase_t += p.velocity[j] * p.velocity[j] / (4.0 * g.alpha(j));
      }
      auto out = spectral_shift(u, std::span<const double>(shift.data(), d));
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto x = g.point(i);
        double ph = -phase_t * u.t;
        for (std::size_t j = 0; j < d; ++j) {
          if (p.velocity[j] != 0.0) ph += p.velocity[j] * x[j] / (2.0 * g.alpha(j));
        }
        out.values[i] *= std::polar(1.0, ph);
      }
      return out;
    }
    case SymmetryKind::Dilation: {
      if (!(p.scale > 0.0)) throw InvalidArgument("apply_symmetry: dilation scale must be positive");
      if (!(p.sigma > 0.0)) throw InvalidArgument("apply_symmetry: sigma must be positive");
      std::vector<double> scale(d, p.scale);
      auto out = resample_scaled(u, scale);
      const double amp = std::pow(p.scale, 2.0 / p.sigma);
      for (std::size_t i = 0; i < out.size(); ++i) {
        auto x = g.point(i);
        for (std::size_t j = 0; j < d; ++j) x[j] *= p.scale;
        out.values[i] = inside_box(g, x) ? amp * out.values[i] : cplx(0.0);
      }
      out.t = u.t / (p.scale * p.scale);
      return out;
    }
    case SymmetryKind::HyperbolicRotation: {
      if (d != 2) throw InvalidArgument("apply_symmetry: hyperbolic rotation requires d = 2");
      if (mass_outside_center(u, 0.4) > 1e-8) {
        throw InvalidArgument("apply_symmetry: hyperbolic rotation needs data confined to the central 40% of the box");
      }
      const double ch = std::cosh(p.rapidity);
      const double sh = std::sinh(p.rapidity);
      std::vector<std::array<double, kMaxDim>> pts(u.size());
      std::vector<bool> inside(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = g.point(i);
        pts[i] = {x[0] * ch + x[1] * sh, x[0] * sh + x[1] * ch, 0.0};
        inside[i] = inside_box(g, pts[i]);
      }
      auto vals = interpolate_at(u, pts);
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!inside[i]) vals[i] = 0.0;
      }
      return ComplexField(u.grid, std::move(vals), u.t);
    }
  }
  throw InvalidArgument("apply_symmetry: unknown symmetry kind");
}

SymmetryTrajectory::SymmetryTrajectory(std::shared_ptr<const GridTrajectory> base, SymmetryParams params)
    : GridTrajectory(base ? base->grid() : nullptr), base_(std::move(base)), params_(params) {}

double SymmetryTrajectory::t_min() const {
  switch (params_.kind) {
    case SymmetryKind::Translation:
      return base_->t_min() + params_.t0;
    case SymmetryKind::Dilation:
      return base_->t_min() / (params_.scale * params_.scale);
    default:
      return base_->t_min();
  }
}

double SymmetryTrajectory::t_max() const {
  switch (params_.kind) {
    case SymmetryKind::Translation:
      return base_->t_max() + params_.t0;
    case SymmetryKind::Dilation:
      return base_->t_max() / (params_.scale * params_.scale);
    default:
      return base_->t_max();
  }
}

ComplexField SymmetryTrajectory::field_at(double t) const {
  require_time(t);
  const double s = std::clamp(symmetry_source_time(t, params_), base_->t_min(), base_->t_max());
  auto out = apply_symmetry(base_->field_at(s), params_);
  out.t = t;
  return out;
}

}  // namespace hnls
