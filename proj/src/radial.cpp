#include "hnls/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hnls/errors.hpp"

namespace hnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tridiagonal form of the flux-form operator on the active nodes.
struct RadialOperator {
  std::size_t first = 0;  // first unknown node
  std::size_t last = 0;   // last unknown node (n - 1)
  std::vector<double> lo, di, up;

  explicit RadialOperator(const RadialProfile& p) {
    const std::size_t n = p.intervals();
    const double h = p.h();
    first = p.inner_bc() == RadialInnerBc::Regularity ? 0 : 1;
    last = n - 1;
    lo.assign(n + 1, 0.0);
    di.assign(n + 1, 0.0);
    up.assign(n + 1, 0.0);
    for (std::size_t i = first; i <= last; ++i) {
      if (i == 0) {
        up[0] = 4.0 / (h * h);
        di[0] = -up[0];
        continue;
      }
      const double ri = p.r(i);
      lo[i] = (ri - 0.5 * h) / (h * h * ri);
      up[i] = (ri + 0.5 * h) / (h * h * ri);
      di[i] = -(lo[i] + up[i]);
    }
  }

  std::vector<cplx> apply(const std::vector<cplx>& v) const {
    std::vector<cplx> out(v.size(), cplx{});
    for (std::size_t i = first; i <= last; ++i) {
      cplx s = di[i] * v[i] + up[i] * v[i + 1];
      if (i > 0) s += lo[i] * v[i - 1];
      out[i] = s;
    }
    return out;
  }

  // (I - i beta L) x = (I + i beta L) v, in place, by the Thomas algorithm.
  void crank_nicolson(std::vector<cplx>& v, double beta) const {
    const cplx ib{0.0, beta};
    const std::vector<cplx> lv = apply(v);
    const std::size_t m = last - first + 1;
    std::vector<cplx> c(m), d(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = first + k;
      const cplx a = -ib * lo[i];
      const cplx b = 1.0 - ib * di[i];
      const cplx cu = -ib * up[i];
      const cplx rhs = v[i] + ib * lv[i];
      if (k == 0) {
        c[k] = cu / b;
        d[k] = rhs / b;
      } else {
        const cplx denom = b - a * c[k - 1];
        c[k] = cu / denom;
        d[k] = (rhs - a * d[k - 1]) / denom;
      }
    }
    for (std::size_t k = m; k-- > 0;) {
      const std::size_t i = first + k;
      v[i] = k + 1 < m ? d[k] - c[k] * v[i + 1] : d[k];
    }
  }
};

void nonlinear_phase(std::vector<cplx>& v, double lambda, double sigma, double dt) {
  if (lambda == 0.0) return;
  for (auto& z : v) z *= std::polar(1.0, lambda * std::pow(std::abs(z), sigma) * dt);
}

void strang(const RadialOperator& op, std::vector<cplx>& v, int sign, double lambda, double sigma, double dt) {
  op.crank_nicolson(v, 0.25 * sign * dt);
  nonlinear_phase(v, lambda, sigma, dt);
  op.crank_nicolson(v, 0.25 * sign * dt);
}

// One Strang step of the profile, honouring the sign = -1 conjugation route.
void step_values(const RadialOperator& op, RadialProfile& p, double dt, bool direct) {
  if (p.sign == 1 || direct) {
    strang(op, p.values, p.sign, p.lambda, p.sigma, dt);
  } else {
    for (auto& z : p.values) z = std::conj(z);
    strang(op, p.values, 1, -p.lambda, p.sigma, dt);
    for (auto& z : p.values) z = std::conj(z);
  }
  p.t += dt;
}

bool all_finite(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// Cubic Lagrange weights for x in [0, 1] on nodes -1, 0, 1, 2.
std::array<double, 4> cubic_weights(double x) {
  return {-x * (x - 1.0) * (x - 2.0) / 6.0, (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
          -(x + 1.0) * x * (x - 2.0) / 2.0, (x + 1.0) * x * (x - 1.0) / 6.0};
}

// Modulus at the inner end from the four innermost unknowns.
double inner_trace(const std::vector<cplx>& v, RadialInnerBc bc) {
  if (bc == RadialInnerBc::Regularity) {
    if (v.empty()) throw InvalidArgument("cone_trace_jump: empty profile");
    return std::abs(v[0]);
  }
  if (v.size() < 5) throw InvalidArgument("cone_trace_jump: need at least five nodes");
  return 4.0 * std::abs(v[1]) - 6.0 * std::abs(v[2]) + 4.0 * std::abs(v[3]) - std::abs(v[4]);
}

}  // namespace

void RadialProfile::validate() const {
  if (!(eps >= 0.0) || !(r_max > eps)) throw InvalidArgument("RadialProfile: need 0 <= eps < r_max");
  if (sign != 1 && sign != -1) throw InvalidArgument("RadialProfile: sign must be +1 or -1");
  if (!(sigma > 0.0)) throw InvalidArgument("RadialProfile: sigma must be positive");
  if (!std::isfinite(lambda)) throw InvalidArgument("RadialProfile: lambda must be finite");
  if (intervals() < 4) throw InvalidArgument("RadialProfile: need at least 4 intervals");
  if (!all_finite(values)) throw NumericalError("RadialProfile: non-finite values");
  if (values.back() != cplx{}) throw InvalidArgument("RadialProfile: outer Dirichlet value must be zero");
  if (inner_bc() == RadialInnerBc::Dirichlet && values.front() != cplx{})
    throw InvalidArgument("RadialProfile: inner Dirichlet value must be zero");
}

RadialProfile RadialProfile::sample(double eps, double r_max, std::size_t intervals,
                                    const std::function<cplx(double)>& f, int sign, double lambda, double sigma) {
  RadialProfile p;
  p.eps = eps;
  p.r_max = r_max;
  p.sign = sign;
  p.lambda = lambda;
  p.sigma = sigma;
  if (intervals < 4) throw InvalidArgument("RadialProfile::sample: need at least 4 intervals");
  p.values.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) p.values[i] = f(p.r(i));
  p.values.back() = cplx{};
  if (eps > 0.0) p.values.front() = cplx{};
  p.validate();
  return p;
}

std::vector<double> radial_weights(const RadialProfile& p) {
  const std::size_t n = p.intervals();
  const double h = p.h();
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) w[i] = p.r(i) * h;
  if (p.inner_bc() == RadialInnerBc::Regularity) w[0] = h * h / 8.0;
  return w;
}

double radial_mass(const RadialProfile& p) {
  const auto w = radial_weights(p);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(p.values[i]);
  return kTwoPi * s;
}

double radial_energy(const RadialProfile& p) {
  const std::size_t n = p.intervals();
  const double h = p.h();
  double kin = 0.0;
  for (std::size_t i = 0; i < n; ++i) kin += (p.r(i) + 0.5 * h) * std::norm(p.values[i + 1] - p.values[i]) / h;
  const auto w = radial_weights(p);
  double pot = 0.0;
  for (std::size_t i = 0; i <= n; ++i) pot += w[i] * std::pow(std::abs(p.values[i]), p.sigma + 2.0);
  return kTwoPi * (0.5 * p.sign * kin - p.lambda / (p.sigma + 2.0) * pot);
}

double radial_linf(const RadialProfile& p) {
  double m = 0.0;
  for (auto z : p.values) m = std::max(m, std::abs(z));
  return m;
}

double radial_outer_fraction(const RadialProfile& p) {
  const auto w = radial_weights(p);
  double total = 0.0, outer = 0.0;
  const double half = 0.5 * p.r_max;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double m = w[i] * std::norm(p.values[i]);
    total += m;
    if (p.r(i) > half) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

std::vector<cplx> apply_radial_laplacian(const RadialProfile& p) {
  p.validate();
  return RadialOperator(p).apply(p.values);
}

bool RadialTrajectory::outer_mass_ok(double tol) const {
  return std::all_of(samples.begin(), samples.end(), [tol](const RadialSample& s) { return s.outer_fraction <= tol; });
}

std::size_t RadialTrajectory::index_at(double time) const {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - time) <= 1e-12 * std::max(1.0, std::abs(time))) return i;
  }
  throw InvalidArgument("RadialTrajectory: no snapshot at t = " + std::to_string(time));
}

void radial_step_in_place(RadialProfile& p, double dt, bool direct_negative_sign) {
  p.validate();
  step_values(RadialOperator(p), p, dt, direct_negative_sign);
}

RadialTrajectory solve_radial(const RadialProfile& p0, const RadialRunConfig& config) {
  p0.validate();
  if (!(config.dt0 > 0.0)) throw InvalidArgument("solve_radial: dt0 must be positive");
  if (!(config.t_end >= p0.t)) throw InvalidArgument("solve_radial: t_end must not precede the start time");
  if (config.sample_stride == 0) throw InvalidArgument("solve_radial: sample_stride must be positive");

  RadialTrajectory traj;
  traj.eps = p0.eps;
  traj.h = p0.h();
  traj.inner_bc = p0.inner_bc();

  std::size_t keep = p0.values.size();
  if (config.snapshot_radius) {
    const double nodes = std::floor((*config.snapshot_radius - p0.eps) / p0.h()) + 1.0;
    keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(nodes, 5.0)), 5, p0.values.size());
  }

  RadialProfile p = p0;
  const RadialOperator op(p);
  const double linf0 = radial_linf(p);
  const double ceiling =
      config.linf_ceiling.value_or(linf0 > 0.0 ? 1e6 * linf0 : std::numeric_limits<double>::infinity());
  const double dt_floor = config.dt_floor.value_or(config.dt0 * 1e-8);
  const double tiny = 1e-12 * std::max(1.0, std::abs(config.t_end));

  auto record = [&] {
    if (!traj.t.empty() && !(p.t > traj.t.back())) return;
    traj.samples.push_back({p.t, radial_mass(p), radial_energy(p), radial_linf(p), radial_outer_fraction(p)});
    traj.t.push_back(p.t);
    traj.values.emplace_back(p.values.begin(), p.values.begin() + static_cast<std::ptrdiff_t>(keep));
  };
  auto adapted = [&](double linf) { return config.adapt ? config.dt0 / (1.0 + std::pow(linf, p.sigma)) : config.dt0; };

  RunStatus status = RunStatus::Running;
  double dt = adapted(linf0);
  double linf_prev = linf0;
  std::size_t since = 0;
  record();
  while (status == RunStatus::Running) {
    const double remaining = config.t_end - p.t;
    if (remaining <= tiny) {
      status = RunStatus::Done;
      break;
    }
    const bool last = dt >= remaining;
    step_values(op, p, last ? remaining : dt, config.direct_negative_sign);
    if (last) p.t = config.t_end;
    if (!all_finite(p.values)) {
      status = RunStatus::BlownUp;
      traj.t_detect = p.t;
      break;
    }
    const double linf = radial_linf(p);
    if (linf > ceiling) {
      status = RunStatus::BlownUp;
      traj.t_detect = p.t;
      break;
    }
    if (++since >= config.sample_stride) {
      since = 0;
      record();
      if (config.adapt) {
        dt = adapted(linf);
        if (dt < dt_floor && linf > linf_prev) {
          status = RunStatus::BlownUp;
          traj.t_detect = p.t;
          break;
        }
        linf_prev = linf;
      }
    }
  }
  if (all_finite(p.values)) record();
  traj.status = status;
  traj.final_profile = std::move(p);
  return traj;
}

RadialTrajectory solve_radial(const RadialProfile& p, double dt, double t_end) {
  RadialRunConfig config;
  config.dt0 = dt;
  config.t_end = t_end;
  return solve_radial(p, config);
}

cplx radial_value(const RadialProfile& p, double r) {
  if (r < p.eps || r > p.r_max) return {};
  const std::size_t n = p.intervals();
  const double h = p.h();
  const double s = (r - p.eps) / h;
  const bool even = p.inner_bc() == RadialInnerBc::Regularity;
  // Stencil start j0 so that the nodes j0..j0+3 bracket s.
  long j0 = static_cast<long>(std::floor(s)) - 1;
  const long lo_limit = even ? -1 : 0;
  j0 = std::clamp<long>(j0, lo_limit, static_cast<long>(n) - 3);
  const auto w = cubic_weights(s - static_cast<double>(j0 + 1));
  cplx out{};
  for (int k = 0; k < 4; ++k) {
    const long j = j0 + k;
    out += w[static_cast<std::size_t>(k)] * p.values[static_cast<std::size_t>(std::abs(j))];
  }
  return out;
}

cplx cone_value(const RadialProfile& phi, const RadialProfile& psi, double x, double y) {
  const double q = x * x - y * y;
  const double eps = std::max(phi.eps, psi.eps);
  if (std::abs(q) < eps * eps || q == 0.0) return {};
  return q > 0.0 ? radial_value(phi, std::sqrt(q)) : radial_value(psi, std::sqrt(-q));
}

ConeField lift_to_cone(const RadialProfile& phi, const RadialProfile& psi, const GridPtr& grid) {
  phi.validate();
  psi.validate();
  if (!grid || grid->dim() != 2) throw InvalidArgument("lift_to_cone: need a two-dimensional grid");
  if (phi.sign != 1 || psi.sign != -1) throw InvalidArgument("lift_to_cone: expected sign +1 on D1 and -1 on D2");
  ConeField out;
  out.eps = std::max(phi.eps, psi.eps);
  out.field = ComplexField(grid, phi.t);
  out.region.assign(grid->size(), 0);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto x = grid->point(i);
    const double q = x[0] * x[0] - x[1] * x[1];
    if (std::abs(q) < out.eps * out.eps || q == 0.0) continue;
    out.region[i] = q > 0.0 ? 1 : 2;
    out.field.values[i] = cone_value(phi, psi, x[0], x[1]);
  }
  return out;
}

double cone_trace_jump(const RadialProfile& phi, const RadialProfile& psi) {
  return std::abs(inner_trace(phi.values, phi.inner_bc()) - inner_trace(psi.values, psi.inner_bc()));
}

double cone_trace_jump(const RadialTrajectory& phi, const RadialTrajectory& psi, double t) {
  const auto& a = phi.values.at(phi.index_at(t));
  const auto& b = psi.values.at(psi.index_at(t));
  return std::abs(inner_trace(a, phi.inner_bc) - inner_trace(b, psi.inner_bc));
}

// Ground state.

namespace {

struct ShotState {
  double q, dq;
};

ShotState rhs(double r, const ShotState& s, double sigma) {
  return {s.dq, s.q - std::pow(std::abs(s.q), sigma) * s.q - s.dq / r};
}

ShotState rk4(double r, const ShotState& s, double h, double sigma) {
  const auto k1 = rhs(r, s, sigma);
  const auto k2 = rhs(r + 0.5 * h, {s.q + 0.5 * h * k1.q, s.dq + 0.5 * h * k1.dq}, sigma);
  const auto k3 = rhs(r + 0.5 * h, {s.q + 0.5 * h * k2.q, s.dq + 0.5 * h * k2.dq}, sigma);
  const auto k4 = rhs(r + h, {s.q + h * k3.q, s.dq + h * k3.dq}, sigma);
  return {s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
          s.dq + h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq)};
}

// Taylor start Q = q + c r^2 + e r^4 at r = dr.
ShotState series_start(double q0, double dr, double sigma) {
  const double f = q0 - std::pow(q0, sigma + 1.0);
  const double fp = 1.0 - (sigma + 1.0) * std::pow(q0, sigma);
  const double c = f / 4.0;
  const double e = fp * c / 16.0;
  return {q0 + c * dr * dr + e * std::pow(dr, 4), 2.0 * c * dr + 4.0 * e * std::pow(dr, 3)};
}

// +1 on overshoot (Q crosses zero), -1 on undershoot (Q turns upward).
int classify(double q0, double sigma, double r_max, double dr) {
  ShotState s = series_start(q0, dr, sigma);
  const auto steps = static_cast<std::size_t>(std::llround(r_max / dr));
  for (std::size_t i = 1; i < steps; ++i) {
    if (s.q < 0.0) return 1;
    if (s.dq > 0.0) return -1;
    s = rk4(static_cast<double>(i) * dr, s, dr, sigma);
  }
  return s.q < 0.0 ? 1 : -1;
}

}  // namespace

double GroundState::mass() const {
  double s = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    s += 0.5 * dr * (q[i - 1] * q[i - 1] * r[i - 1] + q[i] * q[i] * r[i]);
  }
  return kTwoPi * s;
}

double GroundState::value_at(double radius) const {
  radius = std::abs(radius);
  if (r.size() < 4) throw InvalidArgument("GroundState: empty profile");
  if (radius >= r_max()) {
    return q.back() * std::cyl_bessel_k(0.0, radius) / std::cyl_bessel_k(0.0, r_max());
  }
  const double s = radius / dr;
  const long n = static_cast<long>(r.size()) - 1;
  const long j0 = std::clamp<long>(static_cast<long>(std::floor(s)) - 1, -1, n - 3);
  const auto w = cubic_weights(s - static_cast<double>(j0 + 1));
  double out = 0.0;
  for (int k = 0; k < 4; ++k) out += w[static_cast<std::size_t>(k)] * q[static_cast<std::size_t>(std::abs(j0 + k))];
  return out;
}

GroundState shoot_ground_state(double sigma, double r_max, std::pair<double, double> bracket, double dr) {
  if (!(sigma > 0.0)) throw InvalidArgument("shoot_ground_state: sigma must be positive");
  if (!(dr > 0.0) || !(r_max > 20.0 * dr)) throw InvalidArgument("shoot_ground_state: need r_max >> dr > 0");
  double lo = bracket.first, hi = bracket.second;
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidArgument("shoot_ground_state: need 0 < lo < hi");
  if (classify(lo, sigma, r_max, dr) != -1 || classify(hi, sigma, r_max, dr) != 1) {
    throw InvalidArgument("shoot_ground_state: bracket does not separate undershoot from overshoot");
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (classify(mid, sigma, r_max, dr) == 1 ? hi : lo) = mid;
  }

  GroundState gs;
  gs.sigma = sigma;
  gs.q0 = 0.5 * (lo + hi);
  gs.dr = dr;
  const auto steps = static_cast<std::size_t>(std::llround(r_max / dr));
  gs.r.resize(steps + 1);
  gs.q.resize(steps + 1);
  gs.dq.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) gs.r[i] = static_cast<double>(i) * dr;
  gs.q[0] = gs.q0;
  gs.dq[0] = 0.0;

  // Integrate until Q is small, then continue with the linear K0 tail.
  const double small = 1e-4 * gs.q0;
  ShotState s = series_start(gs.q0, dr, sigma);
  std::size_t match = steps;
  for (std::size_t i = 1; i <= steps; ++i) {
    gs.q[i] = s.q;
    gs.dq[i] = s.dq;
    if (s.q < small) {
      match = i;
      break;
    }
    if (i < steps) s = rk4(gs.r[i], s, dr, sigma);
  }
  gs.r_match = gs.r[match];
  if (match < steps) {
    const double qm = gs.q[match];
    const double k0m = std::cyl_bessel_k(0.0, gs.r_match);
    for (std::size_t i = match + 1; i <= steps; ++i) {
      gs.q[i] = qm * std::cyl_bessel_k(0.0, gs.r[i]) / k0m;
      gs.dq[i] = -qm * std::cyl_bessel_k(1.0, gs.r[i]) / k0m;
    }
  }
  gs.tail_ratio = gs.q.back() / gs.q0;

  // Fourth-order differences of Q against the equation, away from the origin,
  // the outer end and the junction with the tail.
  double res = 0.0;
  for (std::size_t i = 5; i + 3 <= steps; ++i) {
    if (i + 3 >= match && i <= match + 3) continue;
    const double d2 = (-gs.q[i - 2] + 16.0 * gs.q[i - 1] - 30.0 * gs.q[i] + 16.0 * gs.q[i + 1] - gs.q[i + 2]) /
                      (12.0 * dr * dr);
    const double d1 = (gs.q[i - 2] - 8.0 * gs.q[i - 1] + 8.0 * gs.q[i + 1] - gs.q[i + 2]) / (12.0 * dr);
    const double qi = gs.q[i];
    res = std::max(res, std::abs(d2 + d1 / gs.r[i] - qi + std::pow(std::abs(qi), sigma) * qi));
  }
  gs.residual = res;
  return gs;
}

std::vector<ConcentrationSeries> concentration_scan(const RadialTrajectory& traj, const std::vector<double>& eps_list) {
  std::vector<ConcentrationSeries> out;
  if (traj.values.empty()) return out;
  const double stored = traj.eps + static_cast<double>(traj.values.front().size() - 1) * traj.h;
  for (double e : eps_list) {
    if (!(e > traj.eps) || e > stored + 1e-12) {
      throw InvalidArgument("concentration_scan: radius outside the stored snapshot range");
    }
    ConcentrationSeries s;
    s.eps = e;
    s.t = traj.t;
    for (const auto& v : traj.values) {
      double m = 0.0;
      for (std::size_t i = 0; i < v.size() && traj.eps + static_cast<double>(i) * traj.h < e; ++i) {
        m = std::max(m, std::abs(v[i]));
      }
      s.value.push_back(m);
    }
    const std::size_t n = s.value.size();
    const std::size_t window = std::max<std::size_t>(3, n / 10);
    if (n >= window) {
      bool inc = true;
      for (std::size_t i = n - window + 1; i < n; ++i) inc = inc && s.value[i] > s.value[i - 1];
      s.increasing_last_decade = inc;
    }
    out.push_back(std::move(s));
  }
  return out;
}

ThetaReport theta_functionals(const RadialProfile& p) {
  p.validate();
  const auto w = radial_weights(p);
  const double h = p.h();
  const double e2 = p.eps * p.eps;
  const bool exterior = p.eps > 0.0;
  ThetaReport rep;
  rep.energy = radial_energy(p);
  double moment = 0.0, flux = 0.0;
  for (std::size_t i = 1; i + 1 < p.values.size(); ++i) {
    const double r = p.r(i);
    const double theta = exterior ? 0.5 * r * r - e2 * std::log(r) : r * r;
    const double grad = exterior ? r - e2 / r : 2.0 * r;
    const cplx dphi = (p.values[i + 1] - p.values[i - 1]) / (2.0 * h);
    moment += w[i] * theta * std::norm(p.values[i]);
    flux += w[i] * grad * std::imag(dphi * std::conj(p.values[i]));
  }
  rep.moment = kTwoPi * moment;
  rep.flux = kTwoPi * flux;
  const double c = exterior ? 8.0 : 4.0;
  rep.negative_energy = rep.energy < 0.0;
  rep.flux_condition = rep.flux > 0.0 && rep.flux * rep.flux >= c * rep.energy * rep.moment;
  return rep;
}

}  // namespace hnls
