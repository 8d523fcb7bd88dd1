#pragma once

#include <cstddef>
#include <vector>

#include "hnls/evolution.hpp"
#include "hnls/field.hpp"
#include "hnls/trajectory.hpp"

namespace hnls {

// Special solution families of the HNLS with alpha = (1, -1, ..., -1).

/// Spatial plane wave u(t, x, y) = f(t, x - c.y). The profile solves
/// i f_t + (1 - |c|^2) f_zz + lambda |f|^sigma f = 0 on a period of length `period`.
struct PlaneWaveSpec {
  std::vector<cplx> f0;   // samples on z_i = -period/2 + i period/n
  double period = 0.0;
  std::vector<double> c;  // one entry per transverse axis
  double lambda = 1.0;
  double sigma = 2.0;
  double dt = 1e-3;       // profile time step when |c| != 1

  double c_norm2() const;
  double profile_alpha() const { return 1.0 - c_norm2(); }
  /// True when |c| = 1 to 1e-12, where the profile flow is a pointwise phase.
  bool unit_speed() const;
  /// Profile as a field on its own 1-D grid.
  ComplexField profile_field(double t = 0.0) const;
  /// Throws InvalidArgument on bad sizes or a grid that does not carry
  /// f(x - c.y) periodically: len_x = period, n_x = f0.size() and
  /// c_j len_{y_j} / len_x integer.
  void validate(const Grid& grid) const;
};

/// Profile at time t >= 0: the explicit phase rotation for |c| = 1, otherwise
/// the split-step solution on the 1-D grid with alpha = 1 - |c|^2.
ComplexField plane_wave_profile(const PlaneWaveSpec& spec, double t);

/// Lift of a profile (on a 1-D grid with n = n_x, len = len_x) to the grid:
/// u(x, y) = f(x - c.y). Rows whose shift is a whole number of samples are
/// filled by index shifts; others by the trigonometric interpolant.
ComplexField lift_plane_wave(const ComplexField& profile, std::span<const double> c, const GridPtr& grid);

/// u(t) = lift of the profile at time t. For |c| = 1 the phase rotation is
/// applied after lifting, so |u(t)| = |u(0)| holds pointwise.
ComplexField plane_wave_field(const PlaneWaveSpec& spec, double t, const GridPtr& grid);

/// Spatial standing wave u(t, x, y) = e^{i omega x} phi(t, y) with
/// phi(t) = e^{-i omega^2 t} f(-t), where f solves
/// i f_s + Delta_y f - lambda |f|^sigma f = 0, f(0) = f0.
struct StandingWaveSpec {
  ComplexField f0;  // on the (d-1)-dimensional transverse grid
  double omega = 0.0;
  double lambda = 1.0;
  double sigma = 2.0;
  double dt = 1e-3;

  /// Throws unless omega len_x / 2pi is an integer and the transverse axes of
  /// `grid` match f0's grid.
  void validate(const Grid& grid) const;
};

/// f(-t): backwards run of the transverse equation from f0.
ComplexField standing_wave_profile(const StandingWaveSpec& spec, double t);

/// e^{i omega x - i omega^2 t} g(y) on the grid, for g on the transverse grid.
ComplexField lift_standing_wave(const ComplexField& g, double omega, double t, const GridPtr& grid);

ComplexField standing_wave_field(const StandingWaveSpec& spec, double t, const GridPtr& grid);

/// Transverse grid of a d >= 2 grid: axes 1..d-1 with alpha = +1.
GridPtr transverse_grid(const Grid& grid);

/// Residual of the bound-state equation
///   box A + lambda |A|^{4/d} A = (k (x^2 - |y|^2) + gamma0) A
/// with the tapered potential, as ||R|| / (||box A|| + ||lambda |A|^{4/d} A|| + ||V A||).
struct BoundStateDefect {
  double value = 0.0;
  bool zero_field = false;
};

BoundStateDefect bound_state_defect(const ComplexField& a0, double k, double gamma0, double lambda);

/// Heuristic candidate: preconditioned gradient descent on ||R||^2 / 2 with the
/// L^2 norm held fixed, step halved whenever the residual would grow. Not a
/// convergent solver; callers must use the measured defect.
struct BoundStateCandidate {
  ComplexField field;
  std::vector<double> defect_history;  // before the first and after every iteration
};

BoundStateCandidate refine_bound_state(const ComplexField& start, double k, double gamma0, double lambda,
                                       std::size_t iterations = 500);

/// psi = T_{a0,k} (e^{i gamma0 s} A0).
struct SemiclassicalSpec {
  ComplexField a0_field;
  double k = 0.0;
  double gamma0 = 0.0;
  double a0 = 0.0;
  double lambda = 1.0;
  BoundStateDefect defect;

  static SemiclassicalSpec make(ComplexField a0_field, double k, double gamma0, double a0, double lambda);
};

/// Time-independent profile times e^{i gamma0 s}.
class StationaryTrajectory : public GridTrajectory {
 public:
  StationaryTrajectory(ComplexField profile, double gamma0);
  double t_min() const override { return 0.0; }
  double t_max() const override;
  ComplexField field_at(double s) const override;

 private:
  ComplexField profile_;
  double gamma0_;
};

/// Throws NumericalError at or beyond the first singular time of b.
ComplexField semiclassical_field(const SemiclassicalSpec& spec, double t, const GridPtr& grid);

}  // namespace hnls
