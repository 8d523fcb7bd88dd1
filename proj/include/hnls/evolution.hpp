#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hnls/field.hpp"
#include "hnls/observables.hpp"

namespace hnls {

/// i u_t + sum_j alpha_j d_j^2 u + lambda |u|^sigma u - V(x) u = 0, with alpha from the grid.
struct EvolutionProblem {
  GridPtr grid;
  double lambda = 0.0;
  double sigma = 2.0;
  std::optional<std::vector<double>> potential;

  /// Throws InvalidArgument if sigma <= 0 or the potential has the wrong size / is non-finite.
  void validate() const;
};

/// Inner fraction of each axis on which the harmonic potential is exact; it is
/// tapered smoothly to zero between this and the box edge.
inline constexpr double kPotentialTaperStart = 0.4;

/// k (x~^2 - |y~|^2) + gamma0 where q~ = q tau(q) and tau is 1 for
/// |q| <= 0.4 len and decays as cos^2 to 0 at the box edge.
std::vector<double> harmonic_potential(const Grid& grid, double k, double gamma0 = 0.0);

enum class RunStatus { Running, BlownUp, Done };

const char* to_string(RunStatus s);

struct StepperState {
  ComplexField field;
  double dt = 1e-3;  // signed; negative for backwards runs
  double t = 0.0;
  std::size_t step_count = 0;
  RunStatus status = RunStatus::Running;
  double t_detect = 0.0;

  StepperState() = default;
  StepperState(ComplexField f, double step);
};

struct RunConfig {
  double t_end = 1.0;
  double dt0 = 1e-3;
  bool adapt = false;
  /// Blow-up threshold on ||u||_inf; default 1e6 * initial ||u||_inf.
  std::optional<double> linf_ceiling;
  /// Smallest admissible |dt| when adapting; default |dt0| * 1e-8.
  std::optional<double> dt_floor;
  std::size_t sample_stride = 10;

  void validate(double t_start) const;
};

using Observer = std::function<void(const ObservableSample&, const ComplexField&)>;

struct RunResult {
  StepperState state;
  ObservableSeries series;
};

/// Exact pointwise phase rotation u -> u exp(i dt (lambda |u|^sigma - V)).
void nonlinear_phase_in_place(ComplexField& field, const EvolutionProblem& problem, double dt);

/// One Strang step L(dt/2) N(dt) L(dt/2) in place. A non-finite result marks
/// the state BlownUp and leaves the last finite field in place.
void step_strang_in_place(StepperState& state, const EvolutionProblem& problem);
StepperState step_strang(StepperState state, const EvolutionProblem& problem);

/// Steps until t_end, a blow-up trigger, or dt underflow; samples observables
/// every `sample_stride` steps and at the end.
RunResult run(StepperState state, const EvolutionProblem& problem, const RunConfig& config,
              const Observer& observer = {});

/// Relative l2 residual of the equation at the middle field, centered in time.
double residual_hnls(const ComplexField& prev, const ComplexField& cur, const ComplexField& next,
                     const EvolutionProblem& problem);

}  // namespace hnls
