#include "hnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"

namespace hnls {

namespace {

double taper(double q, double len) {
  const double a = std::abs(q);
  const double start = kPotentialTaperStart * len;
  const double stop = 0.5 * len;
  if (a <= start) return 1.0;
  if (a >= stop) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (a - start) / (stop - start));
  return c * c;
}

}  // namespace

void EvolutionProblem::validate() const {
  if (!grid) throw InvalidArgument("EvolutionProblem: grid is required");
  if (!(sigma > 0.0)) throw InvalidArgument("EvolutionProblem: sigma must be positive");
  if (!std::isfinite(lambda)) throw InvalidArgument("EvolutionProblem: lambda must be finite");
  if (potential) {
    if (potential->size() != grid->size()) throw InvalidArgument("EvolutionProblem: potential size mismatch");
    for (double v : *potential) {
      if (!std::isfinite(v)) throw InvalidArgument("EvolutionProblem: potential must be finite");
    }
  }
}

std::vector<double> harmonic_potential(const Grid& grid, double k, double gamma0) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    double q = 0.0;
    for (std::size_t j = 0; j < grid.dim(); ++j) {
      const double xt = x[j] * taper(x[j], grid.length(j));
      q += (j == 0 ? 1.0 : -1.0) * xt * xt;
    }
    v[i] = k * q + gamma0;
  }
  return v;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Running:
      return "Running";
    case RunStatus::BlownUp:
      return "BlownUp";
    case RunStatus::Done:
      return "Done";
  }
  return "?";
}

StepperState::StepperState(ComplexField f, double step) : field(std::move(f)), dt(step), t(field.t) {}

void RunConfig::validate(double t_start) const {
  if (!(dt0 > 0.0)) throw InvalidArgument("RunConfig: dt0 must be positive");
  if (sample_stride == 0) throw InvalidArgument("RunConfig: sample_stride must be positive");
  if (t_end < t_start && adapt) throw InvalidArgument("RunConfig: backwards runs require adapt = false");
  if (linf_ceiling && !(*linf_ceiling > 0.0)) throw InvalidArgument("RunConfig: linf_ceiling must be positive");
  if (dt_floor && !(*dt_floor > 0.0)) throw InvalidArgument("RunConfig: dt_floor must be positive");
}

void nonlinear_phase_in_place(ComplexField& field, const EvolutionProblem& problem, double dt) {
  const double lambda = problem.lambda;
  const bool has_pot = problem.potential.has_value();
  if (lambda == 0.0 && !has_pot) return;
  const bool cubic = problem.sigma == 2.0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    cplx& u = field.values[i];
    const double rho = std::norm(u);
    double w = 0.0;
    if (lambda != 0.0) w = lambda * (cubic ? rho : std::pow(rho, 0.5 * problem.sigma));
    if (has_pot) w -= (*problem.potential)[i];
    u *= std::polar(1.0, dt * w);
  }
}

void step_strang_in_place(StepperState& state, const EvolutionProblem& problem) {
  if (state.status != RunStatus::Running) return;
  ComplexField next = state.field;
  const double dt = state.dt;
  propagate_in_place(next, 0.5 * dt);
  nonlinear_phase_in_place(next, problem, dt);
  propagate_in_place(next, 0.5 * dt);
  if (!next.all_finite()) {
    state.status = RunStatus::BlownUp;
    state.t_detect = state.t;
    return;
  }
  state.t += dt;
  next.t = state.t;
  state.field = std::move(next);
  ++state.step_count;
}

StepperState step_strang(StepperState state, const EvolutionProblem& problem) {
  step_strang_in_place(state, problem);
  return state;
}

RunResult run(StepperState state, const EvolutionProblem& problem, const RunConfig& config, const Observer& observer) {
  problem.validate();
  config.validate(state.t);
  RunResult result;
  result.series.lambda = problem.lambda;
  result.series.sigma = problem.sigma;
  result.series.alpha.assign(problem.grid->alphas().begin(), problem.grid->alphas().end());

  const double direction = config.t_end >= state.t ? 1.0 : -1.0;
  const double linf0 = linf_norm(state.field);
  const double ceiling = config.linf_ceiling.value_or(linf0 > 0.0 ? 1e6 * linf0 : std::numeric_limits<double>::infinity());
  const double dt_floor = config.dt_floor.value_or(config.dt0 * 1e-8);
  const double tiny = 1e-12 * std::max(1.0, std::abs(config.t_end));

  auto record = [&](const ComplexField& f) {
    if (!result.series.samples.empty() && !(f.t * direction > result.series.samples.back().t * direction)) return;
    const auto s = sample(f, problem.lambda, problem.sigma);
    if (direction > 0.0) result.series.push(s);
    else result.series.samples.push_back(s);
    if (observer) observer(s, f);
  };

  auto adapted_dt = [&](double linf) {
    return config.adapt ? config.dt0 / (1.0 + std::pow(linf, problem.sigma)) : config.dt0;
  };

  state.status = RunStatus::Running;
  double linf = linf0;
  double linf_at_floor_check = linf0;
  state.dt = direction * adapted_dt(linf);
  record(state.field);

  std::size_t since_sample = 0;
  while (state.status == RunStatus::Running) {
    const double remaining = (config.t_end - state.t) * direction;
    if (remaining <= tiny) {
      state.status = RunStatus::Done;
      break;
    }
    const double nominal = state.dt;
    const bool last = std::abs(nominal) >= remaining;
    if (last) state.dt = direction * remaining;
    step_strang_in_place(state, problem);
    if (last && state.status == RunStatus::Running) {
      state.t = config.t_end;
      state.field.t = config.t_end;
    }
    state.dt = nominal;
    if (state.status != RunStatus::Running) break;

    linf = linf_norm(state.field);
    if (linf > ceiling) {
      state.status = RunStatus::BlownUp;
      state.t_detect = state.t;
      break;
    }
    if (++since_sample >= config.sample_stride) {
      since_sample = 0;
      record(state.field);
      if (config.adapt) {
        state.dt = direction * adapted_dt(linf);
        if (std::abs(state.dt) < dt_floor && linf > linf_at_floor_check) {
          state.status = RunStatus::BlownUp;
          state.t_detect = state.t;
          break;
        }
        linf_at_floor_check = linf;
      }
    }
  }
  record(state.field);
  result.state = std::move(state);
  return result;
}

double residual_hnls(const ComplexField& prev, const ComplexField& cur, const ComplexField& next,
                     const EvolutionProblem& problem) {
  require_same_grid(prev, cur, "residual_hnls");
  require_same_grid(cur, next, "residual_hnls");
  const double two_h = next.t - prev.t;
  if (!(std::abs(two_h) > 0.0)) throw InvalidArgument("residual_hnls: time stamps must differ");
  ComplexField box = apply_signature_operator(ComplexField(problem.grid, cur.values, cur.t));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    const cplx u = cur.values[i];
    const double rho = std::norm(u);
    cplx r = cplx(0.0, 1.0) * (next.values[i] - prev.values[i]) / two_h + box.values[i];
    r += problem.lambda * std::pow(rho, 0.5 * problem.sigma) * u;
    if (problem.potential) r -= (*problem.potential)[i] * u;
    num += std::norm(r);
    den += rho;
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

}  // namespace hnls
