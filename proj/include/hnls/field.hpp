#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hnls/grid.hpp"

namespace hnls {

using cplx = std::complex<double>;

/// Complex samples on a grid plus a time stamp.
struct ComplexField {
  GridPtr grid;
  std::vector<cplx> values;
  double t = 0.0;

  ComplexField() = default;
  explicit ComplexField(GridPtr g, double time = 0.0);
  ComplexField(GridPtr g, std::vector<cplx> v, double time = 0.0);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  /// Samples f(x) at every grid point; unused coordinates are 0.
  static ComplexField sample(GridPtr g, const std::function<cplx(const std::array<double, kMaxDim>&)>& f,
                             double time = 0.0);

  bool all_finite() const;
};

/// Throws InvalidArgument unless both fields live on the same grid shape.
void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what);
/// Throws NumericalError on NaN/Inf entries.
void require_finite(const ComplexField& f, const char* what);

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);

}  // namespace hnls
