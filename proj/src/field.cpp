#include "hnls/field.hpp"

#include <cmath>
#include <string>

#include "hnls/errors.hpp"

namespace hnls {

ComplexField::ComplexField(GridPtr g, double time) : grid(std::move(g)), t(time) {
  if (!grid) throw InvalidArgument("field requires a grid");
  values.assign(grid->size(), cplx{0.0, 0.0});
}

ComplexField::ComplexField(GridPtr g, std::vector<cplx> v, double time)
    : grid(std::move(g)), values(std::move(v)), t(time) {
  if (!grid) throw InvalidArgument("field requires a grid");
  if (values.size() != grid->size()) throw InvalidArgument("field size does not match grid");
}

ComplexField ComplexField::sample(GridPtr g,
                                  const std::function<cplx(const std::array<double, kMaxDim>&)>& f,
                                  double time) {
  ComplexField out(std::move(g), time);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = f(out.grid->point(i));
  return out;
}

bool ComplexField::all_finite() const {
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what) {
  if (!a.grid || !b.grid || !a.grid->same_shape(*b.grid)) {
    throw InvalidArgument(std::string(what) + ": fields live on different grids");
  }
}

void require_finite(const ComplexField& f, const char* what) {
  if (!f.all_finite()) throw NumericalError(std::string(what) + ": field contains NaN or Inf");
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "operator+");
  ComplexField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
  return out;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "operator-");
  ComplexField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

ComplexField operator*(cplx s, const ComplexField& a) {
  ComplexField out = a;
  for (auto& v : out.values) v *= s;
  return out;
}

}  // namespace hnls
