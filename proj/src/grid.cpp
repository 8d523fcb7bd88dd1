#include "hnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hnls/errors.hpp"

namespace hnls {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

Grid::Grid(std::vector<std::size_t> n, std::vector<double> len, std::vector<double> alpha)
    : n_(std::move(n)), len_(std::move(len)), alpha_(std::move(alpha)) {
  const std::size_t d = n_.size();
  if (d < 1 || d > kMaxDim) {
    throw InvalidArgument("grid dimension must be 1, 2 or 3");
  }
  if (len_.size() != d || alpha_.size() != d) {
    throw InvalidArgument("grid: n, len and alpha must have the same length");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (n_[j] < 8 || !is_power_of_two(n_[j])) {
      std::ostringstream os;
      os << "grid: n[" << j << "] = " << n_[j] << " must be a power of two and >= 8";
      throw InvalidArgument(os.str());
    }
    if (!(len_[j] > 0.0) || !std::isfinite(len_[j])) {
      std::ostringstream os;
      os << "grid: len[" << j << "] must be positive and finite";
      throw InvalidArgument(os.str());
    }
    if (!std::isfinite(alpha_[j])) {
      throw InvalidArgument("grid: alpha must be finite");
    }
  }

  stride_.assign(d, 1);
  for (std::size_t j = d - 1; j > 0; --j) stride_[j - 1] = stride_[j] * n_[j];
  size_ = stride_[0] * n_[0];

  cell_volume_ = 1.0;
  coords_.resize(d);
  xi_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double h = spacing(j);
    cell_volume_ *= h;
    coords_[j].resize(n_[j]);
    xi_[j].resize(n_[j]);
    const auto nj = static_cast<std::ptrdiff_t>(n_[j]);
    for (std::ptrdiff_t i = 0; i < nj; ++i) {
      coords_[j][i] = -0.5 * len_[j] + static_cast<double>(i) * h;
      const std::ptrdiff_t m = i < nj / 2 ? i : i - nj;
      xi_[j][i] = 2.0 * std::numbers::pi * static_cast<double>(m) / len_[j];
    }
  }

  symbol_.assign(size_, 0.0);
  xi2_.assign(size_, 0.0);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    const auto idx = unflatten(flat);
    double s = 0.0;
    double k2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double k = xi_[j][idx[j]];
      s += alpha_[j] * k * k;
      k2 += k * k;
    }
    symbol_[flat] = s;
    xi2_[flat] = k2;
  }
}

double Grid::box_volume() const {
  double v = 1.0;
  for (double l : len_) v *= l;
  return v;
}

std::array<std::size_t, kMaxDim> Grid::unflatten(std::size_t flat) const {
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t j = 0; j < dim(); ++j) {
    idx[j] = flat / stride_[j];
    flat -= idx[j] * stride_[j];
  }
  return idx;
}

std::array<double, kMaxDim> Grid::point(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::array<double, kMaxDim> x{};
  for (std::size_t j = 0; j < dim(); ++j) x[j] = coords_[j][idx[j]];
  return x;
}

bool Grid::same_shape(const Grid& other) const { return n_ == other.n_ && len_ == other.len_; }

bool Grid::operator==(const Grid& other) const {
  return n_ == other.n_ && len_ == other.len_ && alpha_ == other.alpha_;
}

GridPtr make_grid(std::size_t d, std::vector<std::size_t> n, std::vector<double> len,
                  std::vector<double> alpha) {
  if (d != 2 && d != 3) throw InvalidArgument("grid dimension must be 2 or 3");
  if (n.size() != d) throw InvalidArgument("grid: n must have d entries");
  return std::make_shared<const Grid>(std::move(n), std::move(len), std::move(alpha));
}

GridPtr make_line_grid(std::size_t n, double len, double alpha) {
  return std::make_shared<const Grid>(std::vector<std::size_t>{n}, std::vector<double>{len},
                                      std::vector<double>{alpha});
}

GridPtr make_grid_any(std::vector<std::size_t> n, std::vector<double> len, std::vector<double> alpha) {
  return std::make_shared<const Grid>(std::move(n), std::move(len), std::move(alpha));
}

std::vector<double> hnls_alpha(std::size_t d) {
  std::vector<double> a(d, -1.0);
  if (d > 0) a[0] = 1.0;
  return a;
}

std::vector<double> nls_alpha(std::size_t d) { return std::vector<double>(d, 1.0); }

}  // namespace hnls
