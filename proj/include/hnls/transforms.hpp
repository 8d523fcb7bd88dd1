#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hnls/field.hpp"
#include "hnls/trajectory.hpp"

namespace hnls {

// Generalized pseudo-conformal transform T_{a0,k}:
//
//   v(t, x, y) = u(g(t), x/b(t), y/b(t)) exp(i a(t) (x^2 - |y|^2) / 4) f(t)
//
// with b' = a b, f = b^{-d/2}, g' = b^{-2}, a' + a^2 = 4k b^{-4}, a(0) = a0,
// b(0) = f(0) = 1, g(0) = 0. v solves the cubic-type HNLS with sigma = 4/d iff
// u solves it with the extra potential term -k (x^2 - |y|^2) u.

/// Value of (a, a', b, f, g) at one time.
struct TransformCoefficients {
  double t = 0.0;
  double a = 0.0;
  double ap = 0.0;
  double b = 1.0;
  double f = 1.0;
  double g = 0.0;
};

/// Threshold below which b is treated as singular.
inline constexpr double kSingularB = 1e-8;

struct TransformState {
  double a0 = 0.0;
  double k = 0.0;
  std::size_t d = 2;
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> ap;  // a'
  std::vector<double> b;
  std::vector<double> f;
  std::vector<double> g;
  /// True when b fell below kSingularB before the last requested time; the
  /// arrays then stop at the last time reached before that.
  bool truncated = false;
  /// Estimated singular time when truncated (from a/a' at the last step).
  std::optional<double> singular_time;

  std::size_t size() const { return t.size(); }
  TransformCoefficients at(std::size_t i) const;
};

/// RK4 on (a, a', log b, g) with a'' = -6 a a' - 4 a^3, a'(0) = 4k - a0^2.
/// Internal steps shrink with 1/|a| near a singularity. `t_grid` must start at
/// 0 and increase strictly.
TransformState integrate_transform_odes(double a0, double k, std::size_t d, std::span<const double> t_grid);

/// Coefficients at a single time; throws NumericalError if t is at or past a singularity.
TransformCoefficients transform_coefficients(double a0, double k, std::size_t d, double t);

/// Candidate b(t) = sqrt((1 + a0 t)^2 + 4 k t^2); 0 where the radicand is not positive.
double closed_form_b(double a0, double k, double t);

/// a = b'/b and g = int_0^t b^-2 for the candidate b above. Valid before the
/// first singular time only.
double closed_form_a(double a0, double k, double t);
double closed_form_g(double a0, double k, double t);

/// First positive zero of (1 + a0 t)^2 + 4 k t^2, if any.
std::optional<double> closed_form_singular_time(double a0, double k);

/// t0 = sqrt(4|k|) - c2 with c2 = a0 / (a0^2 + 4k). Reported for comparison
/// with the detected singular time; it does not locate the singularity.
double sqrt_rule_singular_time(double a0, double k);

/// First time in (0, t_max] at which b(t) drops to `level`, located by
/// bisection inside the RK4 step that crosses it.
std::optional<double> b_crossing_time(double a0, double k, double level, double t_max);

/// Discrete residuals of the defining constraints on a uniform time grid,
/// using 5-point centered differences. Each entry is a max over interior
/// samples of |lhs - rhs| / max(1, |lhs|, |rhs|).
struct ConstraintResiduals {
  double i = 0.0;    // f'/f = -a d/2, as f' + (d/2) a f
  double ii = 0.0;   // b' = a b
  double iii = 0.0;  // |b(0) - 1| + |f(0) - 1| + |a(0) - a0| + |a'(0) - (4k - a0^2)|
  double iv = 0.0;   // g' = b^-2
  double v = 0.0;    // a' + a^2 = 4k b^-4
  double vi = 0.0;   // |g(0)|
  double fb = 0.0;   // max |f b^{d/2} - 1|
  double max() const;
};

ConstraintResiduals constraint_residuals(const TransformState& state);

/// v = T_{a0,k} u at time t on `grid`. The coefficients are taken from
/// `state` when t is one of its sample times, otherwise integrated directly.
/// u is requested from the sampler at s = g(t) on the points x/b(t).
ComplexField apply_pct(const TrajectorySampler& u, const TransformState& state, double t, const GridPtr& grid);

/// Lazily transformed trajectory t -> T_{a0,k} u (t), t in [0, t_max].
class PctTrajectory : public TrajectorySampler {
 public:
  /// Throws InvalidArgument if g(t_max) leaves the range of `base` or b
  /// becomes singular before t_max.
  PctTrajectory(SamplerPtr base, double a0, double k, double t_max);

  std::size_t dim() const override { return base_->dim(); }
  double t_min() const override { return 0.0; }
  double t_max() const override { return t_max_; }
  ComplexField scaled(double t, const GridPtr& target, double c) const override;

 private:
  SamplerPtr base_;
  double a0_;
  double k_;
  double t_max_;
};

// Elementary symmetries of sum_j alpha_j d_j^2 with power nonlinearity.

enum class SymmetryKind { Translation, Gauge, Galilean, Dilation, HyperbolicRotation };

struct SymmetryParams {
  SymmetryKind kind = SymmetryKind::Gauge;
  /// Translation: space shift and time shift t0, v(t, x) = u(t - t0, x - shift).
  std::array<double, kMaxDim> shift{};
  double t0 = 0.0;
  /// Gauge: v = e^{i theta} u.
  double theta = 0.0;
  /// Galilean: velocity per axis. For alpha = (1, -1, ...) and velocity
  /// (a, b) the phase is (a x - b.y)/2 - (a^2 - |b|^2) t / 4.
  std::array<double, kMaxDim> velocity{};
  /// Dilation: v(t, x) = scale^{2/sigma} u(scale^2 t, scale x).
  double scale = 1.0;
  double sigma = 2.0;
  /// Hyperbolic rotation (d = 2 only): v(x, y) = u(x ch + y sh, x sh + y ch).
  double rapidity = 0.0;
};

/// Maps one field of a solution to the corresponding field of the
/// transformed solution, on the same grid. The output time stamp is mapped
/// as well (translation adds t0, dilation divides by scale^2). Points that
/// leave the box evaluate to zero.
ComplexField apply_symmetry(const ComplexField& u, const SymmetryParams& p);

/// The inverse time map: the source time whose field gives the transformed
/// field at time t.
double symmetry_source_time(double t, const SymmetryParams& p);

/// Transformed trajectory built from a stored one.
class SymmetryTrajectory : public GridTrajectory {
 public:
  SymmetryTrajectory(std::shared_ptr<const GridTrajectory> base, SymmetryParams params);

  double t_min() const override;
  double t_max() const override;
  ComplexField field_at(double t) const override;

 private:
  std::shared_ptr<const GridTrajectory> base_;
  SymmetryParams params_;
};

/// Mass fraction outside the central `fraction` of every axis.
double mass_outside_center(const ComplexField& u, double fraction);

}  // namespace hnls
