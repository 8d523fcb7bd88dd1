#pragma once

#include <array>
#include <vector>

#include "hnls/field.hpp"

namespace hnls {

/// Fraction of the box (per axis, measured from the center) beyond which mass
/// counts as touching the periodic boundary.
inline constexpr double kBoundaryBand = 0.45;
/// Boundary-mass fraction above which moment observables are flagged unreliable.
inline constexpr double kBoundaryMassTolerance = 1e-8;

/// One row of monitored quantities. Moments use the box's centered coordinates.
///
/// For a signature alpha with |alpha_j| in {0, 1} the variance functional is
/// V = sum_j sign(alpha_j) int x_j^2 |u|^2 (for HNLS: int (x^2 - |y|^2)|u|^2)
/// and its exact rate of change is
/// dV/dt = 4 sum_j |alpha_j| Im int conj(u) x_j d_j u.
struct ObservableSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  std::array<double, 3> momentum{};  // Im int conj(u) d_j u
  std::array<double, 3> com{};       // int x_j |u|^2
  double virial_v = 0.0;
  double virial_rate = 0.0;            // 4 Im int conj(u)(x u_x + y . grad_y u)
  double virial_rate_signed = 0.0;     // 4 Im int conj(u)(x u_x - y . grad_y u)
  double virial_rhs = 0.0;             // 16E + 4 lambda ((2d+4)/(sigma+2) - d) int |u|^(sigma+2)
  double lsigma2 = 0.0;                // int |u|^(sigma+2)
  double linf = 0.0;
  double boundary_fraction = 0.0;
  bool moments_reliable = true;
};

struct ObservableSeries {
  double lambda = 0.0;
  double sigma = 2.0;
  std::vector<double> alpha;
  std::vector<ObservableSample> samples;

  /// Appends a sample; throws if t does not increase strictly.
  void push(const ObservableSample& s);
};

/// E(u) = 1/2 sum_j alpha_j int |d_j u|^2 - lambda/(sigma+2) int |u|^(sigma+2).
double energy(const ComplexField& field, double lambda, double sigma);

ObservableSample sample(const ComplexField& field, double lambda, double sigma);

struct ConservationTolerances {
  double mass = 1e-10;
  double energy = 1e-6;
  double momentum = 1e-8;
  double com_fit = 1e-6;
  double virial = 1e-2;
};

struct ConservationReport {
  std::size_t samples = 0;
  double mass_drift = 0.0;      // max |M(t)-M(0)| / M(0)
  double energy_drift = 0.0;    // max |E(t)-E(0)| / |E(0)|
  double momentum_drift = 0.0;  // max_j |P_j(t)-P_j(0)| / max(|P(0)|, M(0))

  std::array<double, 3> momentum0{};
  std::array<double, 3> com_slope{};
  std::array<double, 3> com_intercept{};
  std::array<double, 3> com_excursion{};
  std::array<double, 3> com_fit_residual{};  // max residual / excursion
  /// For each axis, +1 when the measured com slope has the sign of +P_j, -1 when it has the sign of -P_j, 0 if undecidable.
  std::array<int, 3> com_sign_vs_momentum{};

  // Virial checks at interior samples, centered differences of the V series.
  double virial_rate_residual = 0.0;         // max |dV/dt - virial_rate|
  double virial_rate_signed_residual = 0.0;  // max |dV/dt - virial_rate_signed|
  double virial_rate_scale = 0.0;            // max |dV/dt|, |virial_rate|, |virial_rate_signed|
  double virial_accel_residual = 0.0;        // max |d2V/dt2 - virial_rhs|
  double virial_accel_scale = 0.0;           // |16 E(0)|
  bool moments_reliable = true;

  bool mass_ok = false;
  bool energy_ok = false;
  bool momentum_ok = false;
  bool com_ok = false;
  bool virial_ok = false;
};

/// Drift, linear-fit and virial diagnostics for a trajectory. Throws
/// InvalidArgument for fewer than 3 samples.
ConservationReport verify_conservation(const ObservableSeries& series,
                                       const ConservationTolerances& tol = {});

}  // namespace hnls
