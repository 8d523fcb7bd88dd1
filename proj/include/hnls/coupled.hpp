#pragma once

#include <string>
#include <vector>

#include "hnls/evolution.hpp"
#include "hnls/families.hpp"

namespace hnls {

// Evolution of u = v + phi with v in H^1 and phi a plane or standing wave.

enum class WaveKind { Plane, Standing };

/// A plane or standing wave carried by its profile. For plane waves the
/// profile is f(t) on the 1-D grid; for standing waves it is f(-t) on the
/// transverse grid.
class StructuredWave {
 public:
  static StructuredWave plane(PlaneWaveSpec spec);
  static StructuredWave standing(StandingWaveSpec spec);

  WaveKind kind() const { return kind_; }
  double lambda() const;
  double sigma() const;
  double t() const { return t_; }
  RunStatus status() const { return status_; }
  const ComplexField& profile() const { return profile_; }
  const PlaneWaveSpec& plane_spec() const { return plane_; }
  const StandingWaveSpec& standing_spec() const { return standing_; }

  /// Throws InvalidArgument if the wave cannot be carried by `grid`.
  void validate(const Grid& grid) const;
  ComplexField lift(const GridPtr& grid) const;
  /// One Strang step of the profile equation over dt > 0; sets BlownUp on
  /// non-finite profile values.
  void advance(double dt);

  /// sup |phi| and sup |grad phi| of the lifted wave.
  double linf() const;
  double grad_linf(const GridPtr& grid) const;

 private:
  WaveKind kind_ = WaveKind::Plane;
  PlaneWaveSpec plane_;
  StandingWaveSpec standing_;
  EvolutionProblem problem_;
  ComplexField profile_;
  double t_ = 0.0;
  RunStatus status_ = RunStatus::Running;
};

struct DecomposedState {
  ComplexField u;  // full field
  ComplexField v;  // u - lift(wave)
  StructuredWave wave;
  double t = 0.0;
  RunStatus status = RunStatus::Running;

  static DecomposedState make(const ComplexField& v0, StructuredWave wave);
};

/// Advances u with the full split-step solver and the profile with its own
/// solver, then sets v = u - lift(profile).
void step_decomposed(DecomposedState& s, double dt);

struct PerturbationState {
  ComplexField v;
  StructuredWave wave;
  double t = 0.0;
  RunStatus status = RunStatus::Running;
};

/// Direct integration of
///   i v_t + box v + lambda (|v + phi|^sigma (v + phi) - |phi|^sigma phi) = 0:
/// exact linear half steps around an RK4 step of the coupling term, with phi
/// lifted at t, t + dt/2 and t + dt (the profile advances in half steps).
void step_perturbation(PerturbationState& s, double dt);

enum class StabilityStatus { Bounded, Grew, BlownUp };
const char* to_string(StabilityStatus s);

/// Whether the wave satisfies the hypotheses of the known stability results. Only
/// (plane, d = 2, sigma = 4, (|c| - 1) lambda > 0) and (standing, lambda > 0,
/// d = 2 with sigma = 4 or d = 3 with sigma = 2) are certified. Warnings come
/// from the profile lint: decay before the box edge (moment condition) and a
/// resolved spectrum (smoothness).
struct RegimeCheck {
  bool in_regime = false;
  std::string label;
  std::vector<std::string> warnings;
};

RegimeCheck check_regime(const StructuredWave& wave, const Grid& grid);

/// Fraction of the profile's spectral energy in the top quarter of its modes.
double profile_spectral_tail(const StructuredWave& wave);

struct StabilityConfig {
  double t_end = 5.0;
  double dt = 1e-3;
  std::size_t sample_stride = 10;
  double growth_limit = 10.0;  // h_sup / eps above this is Grew
  // A collapsing profile saturates at a grid-limited amplitude on a fixed
  // mesh, so blow-up is declared once this much of its spectral energy sits in
  // the top quarter of the spectrum.
  double resolution_tail = 1e-6;
};

struct StabilityReport {
  double eps = 0.0;
  double h_sup = 0.0;
  double growth_ratio = 0.0;
  StabilityStatus status = StabilityStatus::Bounded;
  double t_detect = 0.0;
  std::string detection;  // what triggered BlownUp, empty otherwise
  RegimeCheck regime;
  std::vector<double> t;
  std::vector<double> h;                  // ||v(t)||_{H^1}
  std::vector<double> wave_linf;          // ||phi(t)||_inf
  std::vector<double> wave_grad_linf;     // ||grad phi(t)||_inf
};

/// For each eps, v0 = eps * shape / ||shape||_{H^1}, evolved with
/// step_decomposed to t_end. eps = 0 gives the exact zero perturbation
/// without a run.
std::vector<StabilityReport> stability_run(const StructuredWave& wave, const ComplexField& v0_shape,
                                           const std::vector<double>& eps_list, const StabilityConfig& config);

/// u = v + lift(f1) + lift(f2) evolved in full, f1 and f2 by their own
/// profile equations; the remainder u - lift(f1) - lift(f2) is reported.
struct TwoWaveSeries {
  std::vector<double> t;
  std::vector<double> remainder_h1;
  std::vector<double> boundary_fraction;  // remainder mass beyond 0.45 len on any axis; 0 at rounding level
  double product_scale = 0.0;             // ||f1||_{H^1} ||f2||_{H^1} of the profiles at t = 0
  ComplexField remainder;                 // at the final time
  RunStatus status = RunStatus::Running;
};

/// Throws InvalidArgument unless both waves are plane waves with different
/// speeds on the same grid as v0.
TwoWaveSeries two_wave_run(StructuredWave w1, StructuredWave w2, const ComplexField& v0, double t_end, double dt,
                           std::size_t sample_stride = 10);

}  // namespace hnls
