#include "hnls/observables.hpp"

#include <algorithm>
#include <cmath>

#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"

namespace hnls {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Sum_k |u_k|^2 xi_j^p over the spectrum, scaled to an integral.
struct SpectralMoments {
  std::array<double, 3> grad2{};  // int |d_j u|^2
  std::array<double, 3> mom{};    // Im int conj(u) d_j u
};

SpectralMoments spectral_moments(const ComplexField& field) {
  const Grid& g = *field.grid;
  const auto spec = to_spectrum(field);
  SpectralMoments m;
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const double p = std::norm(spec[flat]);
    if (p == 0.0) continue;
    const auto idx = g.unflatten(flat);
    for (std::size_t j = 0; j < g.dim(); ++j) {
      const double k = g.wavenumbers(j)[idx[j]];
      m.grad2[j] += k * k * p;
      if (idx[j] != g.n(j) / 2) m.mom[j] += k * p;
    }
  }
  const double scale = g.cell_volume() / static_cast<double>(spec.size());
  for (std::size_t j = 0; j < 3; ++j) {
    m.grad2[j] *= scale;
    m.mom[j] *= scale;
  }
  return m;
}

}  // namespace

void ObservableSeries::push(const ObservableSample& s) {
  if (!samples.empty() && !(s.t > samples.back().t)) {
    throw InvalidArgument("ObservableSeries: sample times must increase strictly");
  }
  samples.push_back(s);
}

double energy(const ComplexField& field, double lambda, double sigma) {
  require_finite(field, "energy");
  const Grid& g = *field.grid;
  const auto m = spectral_moments(field);
  double kinetic = 0.0;
  for (std::size_t j = 0; j < g.dim(); ++j) kinetic += 0.5 * g.alpha(j) * m.grad2[j];
  double pot = 0.0;
  for (const auto& v : field.values) pot += std::pow(std::abs(v), sigma + 2.0);
  pot *= g.cell_volume();
  return kinetic - lambda / (sigma + 2.0) * pot;
}

ObservableSample sample(const ComplexField& field, double lambda, double sigma) {
  require_finite(field, "sample");
  const Grid& g = *field.grid;
  const std::size_t d = g.dim();
  const double dv = g.cell_volume();
  ObservableSample s;
  s.t = field.t;

  const auto m = spectral_moments(field);
  double kinetic = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    kinetic += 0.5 * g.alpha(j) * m.grad2[j];
    s.momentum[j] = m.mom[j];
  }

  const auto grad = spectral_gradient(field);
  double mass = 0.0;
  double lsig = 0.0;
  double boundary = 0.0;
  double rate_abs = 0.0;
  double rate_signed = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const cplx u = field.values[i];
    const double rho = std::norm(u);
    const auto x = g.point(i);
    mass += rho;
    lsig += std::pow(std::sqrt(rho), sigma + 2.0);
    s.linf = std::max(s.linf, std::sqrt(rho));
    bool edge = false;
    for (std::size_t j = 0; j < d; ++j) {
      s.com[j] += x[j] * rho;
      s.virial_v += sgn(g.alpha(j)) * x[j] * x[j] * rho;
      const double flux = std::imag(std::conj(u) * grad[j].values[i]) * x[j];
      rate_abs += std::abs(g.alpha(j)) * flux;
      rate_signed += (j == 0 ? 1.0 : -1.0) * flux;
      if (std::abs(x[j]) > kBoundaryBand * g.length(j)) edge = true;
    }
    if (edge) boundary += rho;
  }
  s.mass = mass * dv;
  s.lsigma2 = lsig * dv;
  for (std::size_t j = 0; j < d; ++j) s.com[j] *= dv;
  s.virial_v *= dv;
  s.virial_rate = 4.0 * rate_abs * dv;
  s.virial_rate_signed = 4.0 * rate_signed * dv;
  s.energy = kinetic - lambda / (sigma + 2.0) * s.lsigma2;
  const double dd = static_cast<double>(d);
  s.virial_rhs = 16.0 * s.energy + 4.0 * lambda * ((2.0 * dd + 4.0) / (sigma + 2.0) - dd) * s.lsigma2;
  s.boundary_fraction = mass > 0.0 ? boundary / mass : 0.0;
  s.moments_reliable = s.boundary_fraction <= kBoundaryMassTolerance;
  return s;
}

ConservationReport verify_conservation(const ObservableSeries& series, const ConservationTolerances& tol) {
  const auto& xs = series.samples;
  if (xs.size() < 3) throw InvalidArgument("verify_conservation: at least 3 samples are required");
  const std::size_t d = series.alpha.empty() ? 3 : series.alpha.size();
  ConservationReport r;
  r.samples = xs.size();

  const auto& s0 = xs.front();
  double p0 = 0.0;
  for (std::size_t j = 0; j < d; ++j) p0 = std::max(p0, std::abs(s0.momentum[j]));
  const double mom_scale = std::max(p0, s0.mass);
  for (const auto& s : xs) {
    if (s0.mass > 0.0) r.mass_drift = std::max(r.mass_drift, std::abs(s.mass - s0.mass) / s0.mass);
    const double de = std::abs(s.energy - s0.energy);
    r.energy_drift = std::max(r.energy_drift, s0.energy != 0.0 ? de / std::abs(s0.energy) : de);
    for (std::size_t j = 0; j < d; ++j) {
      const double dp = std::abs(s.momentum[j] - s0.momentum[j]);
      r.momentum_drift = std::max(r.momentum_drift, mom_scale > 0.0 ? dp / mom_scale : dp);
    }
    r.moments_reliable = r.moments_reliable && s.moments_reliable;
  }
  r.momentum0 = s0.momentum;

  // Least-squares line through com_j(t).
  const auto n = static_cast<double>(xs.size());
  double st = 0.0;
  double stt = 0.0;
  for (const auto& s : xs) {
    st += s.t;
    stt += s.t * s.t;
  }
  const double denom = n * stt - st * st;
  for (std::size_t j = 0; j < d; ++j) {
    double sc = 0.0;
    double stc = 0.0;
    double cmin = xs.front().com[j];
    double cmax = cmin;
    for (const auto& s : xs) {
      sc += s.com[j];
      stc += s.t * s.com[j];
      cmin = std::min(cmin, s.com[j]);
      cmax = std::max(cmax, s.com[j]);
    }
    const double slope = (n * stc - st * sc) / denom;
    const double intercept = (sc - slope * st) / n;
    double res = 0.0;
    for (const auto& s : xs) res = std::max(res, std::abs(s.com[j] - (intercept + slope * s.t)));
    r.com_slope[j] = slope;
    r.com_intercept[j] = intercept;
    r.com_excursion[j] = cmax - cmin;
    r.com_fit_residual[j] = r.com_excursion[j] > 0.0 ? res / r.com_excursion[j] : res;
    const double pj = s0.momentum[j];
    if (slope != 0.0 && pj != 0.0) r.com_sign_vs_momentum[j] = (slope > 0.0) == (pj > 0.0) ? 1 : -1;
  }

  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const auto& a = xs[i - 1];
    const auto& b = xs[i];
    const auto& c = xs[i + 1];
    const double h1 = b.t - a.t;
    const double h2 = c.t - b.t;
    // Three-point derivatives on a possibly nonuniform stencil.
    const double dv = (-h2 / (h1 * (h1 + h2))) * a.virial_v + ((h2 - h1) / (h1 * h2)) * b.virial_v +
                      (h1 / (h2 * (h1 + h2))) * c.virial_v;
    const double d2v = 2.0 * (a.virial_v / (h1 * (h1 + h2)) - b.virial_v / (h1 * h2) + c.virial_v / (h2 * (h1 + h2)));
    r.virial_rate_residual = std::max(r.virial_rate_residual, std::abs(dv - b.virial_rate));
    r.virial_rate_signed_residual = std::max(r.virial_rate_signed_residual, std::abs(dv - b.virial_rate_signed));
    r.virial_rate_scale = std::max({r.virial_rate_scale, std::abs(dv), std::abs(b.virial_rate), std::abs(b.virial_rate_signed)});
    r.virial_accel_residual = std::max(r.virial_accel_residual, std::abs(d2v - b.virial_rhs));
  }
  r.virial_accel_scale = std::abs(16.0 * s0.energy);

  r.mass_ok = r.mass_drift < tol.mass;
  r.energy_ok = r.energy_drift < tol.energy;
  r.momentum_ok = r.momentum_drift < tol.momentum;
  r.com_ok = true;
  for (std::size_t j = 0; j < d; ++j) r.com_ok = r.com_ok && r.com_fit_residual[j] < tol.com_fit;
  const bool rate_ok = r.virial_rate_scale == 0.0 || r.virial_rate_residual < tol.virial * r.virial_rate_scale;
  const bool accel_ok = r.virial_accel_scale == 0.0 ? r.virial_accel_residual == 0.0
                                                    : r.virial_accel_residual < tol.virial * r.virial_accel_scale;
  r.virial_ok = rate_ok && accel_ok;
  return r;
}

}  // namespace hnls
