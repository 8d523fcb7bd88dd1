#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hnls/evolution.hpp"
#include "hnls/field.hpp"

namespace hnls {

// Radial reduction of hyperbolically symmetric solutions: u(t, x, y) =
// Phi(t, sqrt(x^2 - y^2)) turns the HNLS into
//
//   i Phi_t + sign (Phi_rr + Phi_r / r) + lambda |Phi|^sigma Phi = 0,
//
// sign = +1 on {x^2 > y^2} and -1 on {y^2 > x^2}.

enum class RadialInnerBc { Dirichlet, Regularity };

/// Samples on r_i = eps + i h, i = 0..n, h = (r_max - eps) / n. The inner
/// condition is Dirichlet for eps > 0 and Phi'(0) = 0 for eps = 0; the outer
/// one is always Dirichlet at r_max.
struct RadialProfile {
  double eps = 0.0;
  double r_max = 10.0;
  std::vector<cplx> values;
  int sign = 1;
  double lambda = 1.0;
  double sigma = 2.0;
  double t = 0.0;

  std::size_t intervals() const { return values.empty() ? 0 : values.size() - 1; }
  double h() const { return (r_max - eps) / static_cast<double>(intervals()); }
  double r(std::size_t i) const { return eps + static_cast<double>(i) * h(); }
  RadialInnerBc inner_bc() const { return eps > 0.0 ? RadialInnerBc::Dirichlet : RadialInnerBc::Regularity; }

  /// Throws InvalidArgument unless eps < r_max, sign is +-1, sigma > 0, there
  /// are at least 4 intervals, values are finite and Dirichlet ends are zero.
  void validate() const;

  /// Samples f on the grid and zeroes the Dirichlet end points.
  static RadialProfile sample(double eps, double r_max, std::size_t intervals, const std::function<cplx(double)>& f,
                              int sign = 1, double lambda = 1.0, double sigma = 2.0);
};

/// Control-volume weights for integrals of f(r) r dr. The cell at r = 0 has
/// weight h^2/8; these are the weights in which the discrete operator is
/// self-adjoint, so Crank-Nicolson conserves sum w |Phi|^2 exactly.
std::vector<double> radial_weights(const RadialProfile& p);

/// 2 pi int |Phi|^2 r dr.
double radial_mass(const RadialProfile& p);
/// 2 pi [ sign/2 int |Phi_r|^2 r dr - lambda/(sigma+2) int |Phi|^{sigma+2} r dr ].
double radial_energy(const RadialProfile& p);
double radial_linf(const RadialProfile& p);
/// Fraction of the mass at r > r_max / 2.
double radial_outer_fraction(const RadialProfile& p);

/// (Phi_rr + Phi_r / r) in flux form at every node; zero at Dirichlet ends.
std::vector<cplx> apply_radial_laplacian(const RadialProfile& p);

struct RadialRunConfig {
  double t_end = 1.0;
  double dt0 = 1e-3;
  bool adapt = false;
  std::optional<double> linf_ceiling;  // default 1e6 * initial linf
  std::optional<double> dt_floor;      // default dt0 * 1e-8
  std::size_t sample_stride = 10;
  /// Snapshots keep only nodes with r <= this radius (all nodes when unset).
  std::optional<double> snapshot_radius;
  /// sign = -1 is normally run as the conjugate sign = +1 problem with
  /// lambda -> -lambda; set this to use the sign = -1 scheme directly.
  bool direct_negative_sign = false;
};

struct RadialSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double linf = 0.0;
  double outer_fraction = 0.0;
};

struct RadialTrajectory {
  double eps = 0.0;
  double h = 0.0;
  RadialInnerBc inner_bc = RadialInnerBc::Regularity;
  std::vector<RadialSample> samples;
  std::vector<double> t;                   // snapshot times (same as samples)
  std::vector<std::vector<cplx>> values;   // innermost nodes of each snapshot
  RadialProfile final_profile;
  RunStatus status = RunStatus::Running;
  double t_detect = 0.0;

  /// All samples keep the outer-half mass fraction below `tol`.
  bool outer_mass_ok(double tol = 1e-8) const;
  /// Index of the snapshot at time t (within 1e-12); throws InvalidArgument otherwise.
  std::size_t index_at(double t) const;
};

/// One Strang step (half CN, exact phase, half CN) with the given sign.
void radial_step_in_place(RadialProfile& p, double dt, bool direct_negative_sign = false);

/// Strang splitting with Crank-Nicolson for the linear part and the exact
/// phase rotation for the nonlinearity. Adaptive dt = dt0 / (1 + linf^sigma)
/// when enabled; BlownUp on the L^inf ceiling, dt underflow or non-finite data.
RadialTrajectory solve_radial(const RadialProfile& p, const RadialRunConfig& config);
RadialTrajectory solve_radial(const RadialProfile& p, double dt, double t_end);

/// Cubic interpolation of the profile at radius r (even extension about 0 for
/// the regularity condition). Zero outside [eps, r_max].
cplx radial_value(const RadialProfile& p, double r);

/// Glued field on the plane: Phi(sqrt(x^2-y^2)) on D1, Psi(sqrt(y^2-x^2)) on D2.
struct ConeField {
  ComplexField field;
  /// 0 on the excluded strip |x^2 - y^2| < eps^2 (the cone itself when eps = 0), 1 on D1, 2 on D2.
  std::vector<std::uint8_t> region;
  double eps = 0.0;
};

cplx cone_value(const RadialProfile& phi, const RadialProfile& psi, double x, double y);
ConeField lift_to_cone(const RadialProfile& phi, const RadialProfile& psi, const GridPtr& grid);

/// | |Phi(0+)| - |Psi(0+)| |, each limit extrapolated by the cubic through the
/// four innermost nodes.
double cone_trace_jump(const RadialProfile& phi, const RadialProfile& psi);
double cone_trace_jump(const RadialTrajectory& phi, const RadialTrajectory& psi, double t);

/// Positive decaying solution of Q'' + Q'/r - Q + Q^{sigma+1} = 0.
struct GroundState {
  double sigma = 2.0;
  double q0 = 0.0;
  double dr = 0.0;
  double r_match = 0.0;  // beyond this radius the profile is the K0 tail
  std::vector<double> r;
  std::vector<double> q;
  std::vector<double> dq;
  double residual = 0.0;    // max interior ODE residual
  double tail_ratio = 0.0;  // Q(r_max) / Q(0)

  double r_max() const { return r.empty() ? 0.0 : r.back(); }
  /// 2 pi int Q^2 r dr.
  double mass() const;
  /// Cubic interpolation; the K0 tail beyond r_max.
  double value_at(double radius) const;
};

/// Shooting on Q(0) with bisection inside `bracket`. Throws InvalidArgument if
/// both ends of the bracket behave alike (no undershoot/overshoot change).
GroundState shoot_ground_state(double sigma, double r_max, std::pair<double, double> bracket, double dr = 1e-3);

struct ConcentrationSeries {
  double eps = 0.0;
  std::vector<double> t;
  std::vector<double> value;  // max |Phi| over r < eps
  bool increasing_last_decade = false;
};

/// For each radius, max |Phi| over r < eps at every snapshot, and whether it
/// increases strictly over the final tenth of the snapshots.
std::vector<ConcentrationSeries> concentration_scan(const RadialTrajectory& traj, const std::vector<double>& eps_list);

/// Virial-type functionals of the exterior problem. For eps > 0 the weight is
/// theta = |x|^2/2 - eps^2 log|x| and the threshold constant is 8; for eps = 0
/// it is |x|^2 with constant 4.
struct ThetaReport {
  double energy = 0.0;
  double moment = 0.0;  // int theta |u|^2
  double flux = 0.0;    // Im int (grad theta . grad u) conj(u)
  bool negative_energy = false;
  bool flux_condition = false;  // flux > 0 and flux^2 >= c E moment
};

ThetaReport theta_functionals(const RadialProfile& p);

}  // namespace hnls
