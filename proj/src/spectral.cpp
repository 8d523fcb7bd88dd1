#include "hnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "hnls/errors.hpp"

namespace hnls {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanCache {
  std::mutex mutex;
  std::map<std::vector<std::size_t>, std::unique_ptr<FourierTransform>> plans;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// Per-axis weights used when evaluating a trigonometric interpolant off-grid.
// The Nyquist coefficient is split evenly between +n/2 and -n/2.
std::vector<cplx> axis_basis(const Grid& grid, std::size_t axis, double x) {
  const std::size_t n = grid.n(axis);
  const double len = grid.length(axis);
  const double x0 = grid.coords(axis)[0];
  std::vector<cplx> e(n);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const auto m = static_cast<std::ptrdiff_t>(k) < half ? static_cast<std::ptrdiff_t>(k)
                                                         : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(m) * (x - x0) / len;
    if (m == -half) {
      e[k] = cplx(std::cos(phase), 0.0);
    } else {
      e[k] = std::polar(1.0, phase);
    }
  }
  return e;
}

}  // namespace

FourierTransform::FourierTransform(std::span<const std::size_t> shape) {
  std::vector<int> dims(shape.begin(), shape.end());
  size_ = 1;
  for (auto s : shape) size_ *= s;
  std::vector<cplx> scratch(size_);
  const int rank = static_cast<int>(dims.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_plan_ = fftw_plan_dft(rank, dims.data(), as_fftw(scratch.data()), as_fftw(scratch.data()),
                                FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft(rank, dims.data(), as_fftw(scratch.data()), as_fftw(scratch.data()),
                                 FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) throw Error("FFTW plan creation failed");
}

FourierTransform::~FourierTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

const FourierTransform& FourierTransform::for_grid(const Grid& grid) {
  auto& cache = plan_cache();
  std::vector<std::size_t> key(grid.shape().begin(), grid.shape().end());
  std::lock_guard<std::mutex> lock(cache.mutex);
  auto it = cache.plans.find(key);
  if (it == cache.plans.end()) {
    it = cache.plans.emplace(key, std::unique_ptr<FourierTransform>(new FourierTransform(key))).first;
  }
  return *it->second;
}

void FourierTransform::forward(std::span<cplx> data) const {
  if (data.size() != size_) throw InvalidArgument("FFT size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

void FourierTransform::backward(std::span<cplx> data) const {
  if (data.size() != size_) throw InvalidArgument("FFT size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()), as_fftw(data.data()));
  const double inv = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v *= inv;
}

std::vector<cplx> to_spectrum(const ComplexField& field) {
  std::vector<cplx> spec = field.values;
  FourierTransform::for_grid(*field.grid).forward(spec);
  return spec;
}

ComplexField from_spectrum(const GridPtr& grid, std::vector<cplx> spectrum, double t) {
  FourierTransform::for_grid(*grid).backward(spectrum);
  return ComplexField(grid, std::move(spectrum), t);
}

ComplexField spectral_derivative(const ComplexField& field, std::size_t axis, int order) {
  const Grid& g = *field.grid;
  if (axis >= g.dim()) throw InvalidArgument("spectral_derivative: axis out of range");
  if (order != 1 && order != 2) throw InvalidArgument("spectral_derivative: order must be 1 or 2");
  auto spec = to_spectrum(field);
  const auto xi = g.wavenumbers(axis);
  const std::size_t nyquist = g.n(axis) / 2;
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const std::size_t k = (flat / g.stride(axis)) % g.n(axis);
    if (order == 1) {
      spec[flat] *= (k == nyquist) ? cplx{0.0, 0.0} : cplx{0.0, xi[k]};
    } else {
      spec[flat] *= -xi[k] * xi[k];
    }
  }
  return from_spectrum(field.grid, std::move(spec), field.t);
}

std::vector<ComplexField> spectral_gradient(const ComplexField& field) {
  std::vector<ComplexField> out;
  out.reserve(field.grid->dim());
  for (std::size_t j = 0; j < field.grid->dim(); ++j) out.push_back(spectral_derivative(field, j, 1));
  return out;
}

ComplexField apply_signature_operator(const ComplexField& field) {
  auto spec = to_spectrum(field);
  const auto sym = field.grid->symbol();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= -sym[i];
  return from_spectrum(field.grid, std::move(spec), field.t);
}

void propagate_in_place(ComplexField& field, double dt) {
  if (dt == 0.0) return;
  const auto& fft = FourierTransform::for_grid(*field.grid);
  fft.forward(field.values);
  const auto sym = field.grid->symbol();
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    field.values[i] *= std::polar(1.0, -dt * sym[i]);
  }
  fft.backward(field.values);
}

ComplexField apply_linear_propagator(const ComplexField& field, double dt) {
  ComplexField out = field;
  propagate_in_place(out, dt);
  out.t = field.t + dt;
  return out;
}

double NormBundle::lp_at(double p) const {
  auto it = lp.find(p);
  if (it == lp.end()) throw InvalidArgument("NormBundle: L^p norm was not requested");
  return it->second;
}

double integrate(const Grid& grid, std::span<const double> density) {
  double s = 0.0;
  for (double v : density) s += v;
  return s * grid.cell_volume();
}

double l2_norm(const ComplexField& field) {
  double s = 0.0;
  for (const auto& v : field.values) s += std::norm(v);
  return std::sqrt(s * field.grid->cell_volume());
}

double h1_norm(const ComplexField& field) {
  // Parseval: sum_k (1 + |xi|^2) |u_k|^2 * dV / N.
  const auto spec = to_spectrum(field);
  const auto xi2 = field.grid->laplacian_symbol();
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) s += (1.0 + xi2[i]) * std::norm(spec[i]);
  return std::sqrt(s * field.grid->cell_volume() / static_cast<double>(spec.size()));
}

double linf_norm(const ComplexField& field) {
  double m = 0.0;
  for (const auto& v : field.values) m = std::max(m, std::abs(v));
  return m;
}

double lp_norm(const ComplexField& field, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  double s = 0.0;
  for (const auto& v : field.values) s += std::pow(std::abs(v), p);
  return std::pow(s * field.grid->cell_volume(), 1.0 / p);
}

NormBundle norms(const ComplexField& field, std::span<const double> ps) {
  require_finite(field, "norms");
  NormBundle b;
  b.l2 = l2_norm(field);
  b.h1 = h1_norm(field);
  b.linf = linf_norm(field);
  for (double p : ps) b.lp[p] = lp_norm(field, p);
  return b;
}

double relative_l2_error(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "relative_l2_error");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
  return std::sqrt(num / den);
}

ComplexField resample_scaled(const ComplexField& field, std::span<const double> scale) {
  return resample_onto(field, field.grid, scale);
}

ComplexField resample_onto(const ComplexField& field, const GridPtr& target, std::span<const double> scale) {
  const Grid& g = *field.grid;
  const std::size_t d = g.dim();
  if (!target || target->dim() != d) throw InvalidArgument("resample_onto: target dimension mismatch");
  if (scale.size() != d) throw InvalidArgument("resample_onto: one scale per axis required");
  // Coefficients of the interpolant: spec / N in FFT order.
  std::vector<cplx> coef = to_spectrum(field);
  const double inv = 1.0 / static_cast<double>(coef.size());
  for (auto& c : coef) c *= inv;

  // Separable evaluation: contract one axis at a time with the basis matrix
  // B_j[target i][mode k] = e_k(x_i * scale_j). Axis j changes length from
  // the source to the target size as it is contracted.
  std::vector<std::size_t> shape(g.shape().begin(), g.shape().end());
  std::vector<cplx> cur = std::move(coef);
  for (std::size_t axis = 0; axis < d; ++axis) {
    const std::size_t n = shape[axis];
    const std::size_t m = target->n(axis);
    std::vector<std::vector<cplx>> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = axis_basis(g, axis, target->coords(axis)[i] * scale[axis]);
    std::size_t outer = 1;
    for (std::size_t j = 0; j < axis; ++j) outer *= shape[j];
    std::size_t inner = 1;
    for (std::size_t j = axis + 1; j < d; ++j) inner *= shape[j];
    std::vector<cplx> next(outer * m * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < m; ++i) {
        const auto& b = basis[i];
        cplx* dst = &next[(o * m + i) * inner];
        for (std::size_t k = 0; k < n; ++k) {
          const cplx w = b[k];
          const cplx* src = &cur[(o * n + k) * inner];
          for (std::size_t q = 0; q < inner; ++q) dst[q] += w * src[q];
        }
      }
    }
    cur = std::move(next);
    shape[axis] = m;
  }
  return ComplexField(target, std::move(cur), field.t);
}

std::vector<cplx> interpolate_at(const ComplexField& field,
                                 std::span<const std::array<double, kMaxDim>> points) {
  const Grid& g = *field.grid;
  const std::size_t d = g.dim();
  std::vector<cplx> coef = to_spectrum(field);
  const double inv = 1.0 / static_cast<double>(coef.size());
  for (auto& c : coef) c *= inv;
  std::vector<cplx> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<std::vector<cplx>> basis(d);
    for (std::size_t j = 0; j < d; ++j) basis[j] = axis_basis(g, j, points[p][j]);
    cplx acc{0.0, 0.0};
    if (d == 1) {
      for (std::size_t k = 0; k < g.n(0); ++k) acc += basis[0][k] * coef[k];
    } else if (d == 2) {
      const std::size_t n1 = g.n(1);
      for (std::size_t k0 = 0; k0 < g.n(0); ++k0) {
        cplx row{0.0, 0.0};
        const cplx* c = &coef[k0 * n1];
        for (std::size_t k1 = 0; k1 < n1; ++k1) row += basis[1][k1] * c[k1];
        acc += basis[0][k0] * row;
      }
    } else {
      const std::size_t n1 = g.n(1);
      const std::size_t n2 = g.n(2);
      for (std::size_t k0 = 0; k0 < g.n(0); ++k0) {
        cplx plane{0.0, 0.0};
        for (std::size_t k1 = 0; k1 < n1; ++k1) {
          cplx row{0.0, 0.0};
          const cplx* c = &coef[(k0 * n1 + k1) * n2];
          for (std::size_t k2 = 0; k2 < n2; ++k2) row += basis[2][k2] * c[k2];
          plane += basis[1][k1] * row;
        }
        acc += basis[0][k0] * plane;
      }
    }
    out[p] = acc;
  }
  return out;
}

ComplexField spectral_shift(const ComplexField& field, std::span<const double> shift) {
  const Grid& g = *field.grid;
  if (shift.size() != g.dim()) throw InvalidArgument("spectral_shift: one component per axis required");
  auto spec = to_spectrum(field);
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const auto idx = g.unflatten(flat);
    double phase = 0.0;
    for (std::size_t j = 0; j < g.dim(); ++j) phase -= g.wavenumbers(j)[idx[j]] * shift[j];
    spec[flat] *= std::polar(1.0, phase);
  }
  return from_spectrum(field.grid, std::move(spec), field.t);
}

}  // namespace hnls
