#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hnls {

inline constexpr std::size_t kMaxDim = 3;

/// Periodic rectangular lattice with centered coordinates x_j in [-len_j/2, len_j/2).
///
/// Axis 0 is the x direction, the remaining axes are the y directions. The
/// linear operator carried by the grid is sum_j alpha_j d^2/dx_j^2, so the
/// HNLS signature is alpha = (1, -1, ..., -1). Storage is row-major with the
/// last axis fastest.
class Grid {
 public:
  Grid(std::vector<std::size_t> n, std::vector<double> len, std::vector<double> alpha);

  std::size_t dim() const { return n_.size(); }
  std::size_t size() const { return size_; }
  std::size_t n(std::size_t axis) const { return n_[axis]; }
  double length(std::size_t axis) const { return len_[axis]; }
  double alpha(std::size_t axis) const { return alpha_[axis]; }
  double spacing(std::size_t axis) const { return len_[axis] / static_cast<double>(n_[axis]); }
  std::size_t stride(std::size_t axis) const { return stride_[axis]; }

  std::span<const std::size_t> shape() const { return n_; }
  std::span<const double> lengths() const { return len_; }
  std::span<const double> alphas() const { return alpha_; }

  /// Sample coordinates along an axis, index order.
  std::span<const double> coords(std::size_t axis) const { return coords_[axis]; }
  /// Discrete wavenumbers 2*pi*m/len in FFT order (m = 0..n/2-1, -n/2..-1).
  std::span<const double> wavenumbers(std::size_t axis) const { return xi_[axis]; }
  /// sum_j alpha_j xi_j^2 for every spectral index, FFT order, row-major.
  std::span<const double> symbol() const { return symbol_; }
  /// sum_j xi_j^2 for every spectral index.
  std::span<const double> laplacian_symbol() const { return xi2_; }

  /// Quadrature weight prod_j len_j/n_j.
  double cell_volume() const { return cell_volume_; }
  double box_volume() const;

  /// Multi-index of a flat row-major offset.
  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const;
  /// Coordinates of a flat row-major offset; unused axes are 0.
  std::array<double, kMaxDim> point(std::size_t flat) const;

  bool same_shape(const Grid& other) const;
  bool operator==(const Grid& other) const;

 private:
  std::vector<std::size_t> n_;
  std::vector<double> len_;
  std::vector<double> alpha_;
  std::vector<std::size_t> stride_;
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<double>> xi_;
  std::vector<double> symbol_;
  std::vector<double> xi2_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Experiment-space grid, d in {2, 3}.
GridPtr make_grid(std::size_t d, std::vector<std::size_t> n, std::vector<double> len,
                  std::vector<double> alpha);

/// One-dimensional grid for profile equations (plane-wave and standing-wave profiles, 1-D tests).
GridPtr make_line_grid(std::size_t n, double len, double alpha);

/// Any dimension in 1..3; used internally for transverse standing-wave grids.
GridPtr make_grid_any(std::vector<std::size_t> n, std::vector<double> len, std::vector<double> alpha);

/// Signature presets.
std::vector<double> hnls_alpha(std::size_t d);
std::vector<double> nls_alpha(std::size_t d);

}  // namespace hnls
