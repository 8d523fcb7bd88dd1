#pragma once

#include <map>
#include <span>
#include <vector>

#include "hnls/field.hpp"

namespace hnls {

/// In-place multidimensional FFT for a grid shape. Plans are created once per
/// shape with FFTW_ESTIMATE, so results are deterministic across runs.
class FourierTransform {
 public:
  static const FourierTransform& for_grid(const Grid& grid);

  /// Unnormalised forward transform.
  void forward(std::span<cplx> data) const;
  /// Inverse transform including the 1/N normalisation.
  void backward(std::span<cplx> data) const;

  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

 private:
  explicit FourierTransform(std::span<const std::size_t> shape);

  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
  std::size_t size_ = 0;
};

/// Spectrum of a field in FFT order (unnormalised).
std::vector<cplx> to_spectrum(const ComplexField& field);
/// Field from a spectrum in FFT order.
ComplexField from_spectrum(const GridPtr& grid, std::vector<cplx> spectrum, double t);

/// d^order/dx_axis^order by multiplication with (i xi)^order. For odd orders
/// the Nyquist mode is dropped so that real data stays real.
ComplexField spectral_derivative(const ComplexField& field, std::size_t axis, int order);

/// Gradient components, one field per axis.
std::vector<ComplexField> spectral_gradient(const ComplexField& field);

/// sum_j alpha_j d^2/dx_j^2 applied to the field, alpha taken from its grid.
ComplexField apply_signature_operator(const ComplexField& field);

/// Exact flow of i u_t + sum_j alpha_j u_jj = 0 over time dt (dt may be negative).
ComplexField apply_linear_propagator(const ComplexField& field, double dt);
/// Same flow applied in place.
void propagate_in_place(ComplexField& field, double dt);

struct NormBundle {
  double l2 = 0.0;
  double h1 = 0.0;
  double linf = 0.0;
  std::map<double, double> lp;

  double lp_at(double p) const;
};

/// L2, H1 (spectral), L-infinity and the requested L^p norms. Throws
/// NumericalError on non-finite input.
NormBundle norms(const ComplexField& field, std::span<const double> ps = {});

double l2_norm(const ComplexField& field);
double h1_norm(const ComplexField& field);
double linf_norm(const ComplexField& field);
double lp_norm(const ComplexField& field, double p);
/// Box quadrature of a real density sampled on the grid.
double integrate(const Grid& grid, std::span<const double> density);
/// ||a-b||_2 / ||b||_2.
double relative_l2_error(const ComplexField& a, const ComplexField& b);

/// Evaluate the trigonometric interpolant of `field` at the points
/// (x_i * scale_0, y_j * scale_1, ...), i.e. on the grid rescaled per axis.
/// Points outside the box wrap periodically.
ComplexField resample_scaled(const ComplexField& field, std::span<const double> scale);

/// Same evaluation, but at the points of `target` (same dimension, any shape
/// and box): out(x) = field(x * scale) for x on `target`.
ComplexField resample_onto(const ComplexField& field, const GridPtr& target, std::span<const double> scale);

/// Evaluate the trigonometric interpolant at an arbitrary list of points.
std::vector<cplx> interpolate_at(const ComplexField& field,
                                 std::span<const std::array<double, kMaxDim>> points);

/// Translate by an arbitrary vector: out(x) = field(x - shift), via spectral phase.
ComplexField spectral_shift(const ComplexField& field, std::span<const double> shift);

}  // namespace hnls
