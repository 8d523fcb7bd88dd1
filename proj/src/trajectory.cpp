#include "hnls/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hnls/errors.hpp"
#include "hnls/spectral.hpp"

namespace hnls {

void TrajectorySampler::require_time(double s) const {
  const double lo = t_min();
  const double hi = t_max();
  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (!(s >= lo - slack && s <= hi + slack)) {
    throw InvalidArgument("trajectory: time " + std::to_string(s) + " outside sampled range [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
  }
}

bool inside_box(const Grid& grid, const std::array<double, kMaxDim>& x) {
  for (std::size_t j = 0; j < grid.dim(); ++j) {
    const double half = 0.5 * grid.length(j);
    if (!(x[j] >= -half && x[j] < half)) return false;
  }
  return true;
}

GridTrajectory::GridTrajectory(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("GridTrajectory: grid is required");
}

ComplexField GridTrajectory::scaled(double s, const GridPtr& target, double c) const {
  require_time(s);
  if (!target || target->dim() != dim()) throw InvalidArgument("GridTrajectory: target dimension mismatch");
  ComplexField u = field_at(s);
  const bool identity = c == 1.0 && target->same_shape(*grid_) && std::ranges::equal(target->lengths(), grid_->lengths());
  if (identity) {
    ComplexField out(target, std::move(u.values), s);
    return out;
  }
  std::vector<double> scale(dim(), c);
  ComplexField out = resample_onto(u, target, scale);
  for (std::size_t i = 0; i < target->size(); ++i) {
    auto x = target->point(i);
    for (std::size_t j = 0; j < dim(); ++j) x[j] *= c;
    if (!inside_box(*grid_, x)) out.values[i] = 0.0;
  }
  out.t = s;
  return out;
}

SolverTrajectory::SolverTrajectory(EvolutionProblem problem, const ComplexField& u0, double t_end, double dt,
                                   std::size_t checkpoint_stride)
    : GridTrajectory(u0.grid), problem_(std::move(problem)), dt_(dt) {
  problem_.validate();
  if (!problem_.grid->same_shape(*u0.grid)) throw InvalidArgument("SolverTrajectory: grid mismatch");
  if (!(dt > 0.0)) throw InvalidArgument("SolverTrajectory: dt must be positive");
  RunConfig cfg;
  cfg.t_end = t_end;
  cfg.dt0 = dt;
  cfg.adapt = false;
  cfg.sample_stride = std::max<std::size_t>(1, checkpoint_stride);
  auto keep = [this](const ObservableSample&, const ComplexField& f) { checkpoints_.push_back(f); };
  auto result = run(StepperState(u0, dt), problem_, cfg, keep);
  status_ = result.state.status;
  std::sort(checkpoints_.begin(), checkpoints_.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
}

ComplexField SolverTrajectory::field_at(double s) const {
  require_time(s);
  // Start from the checkpoint nearest to s; Strang steps run either way in time.
  auto it = std::min_element(checkpoints_.begin(), checkpoints_.end(),
                             [s](const auto& a, const auto& b) { return std::abs(a.t - s) < std::abs(b.t - s); });
  const double delta = s - it->t;
  if (delta == 0.0) return *it;
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(delta) / dt_ - 1e-9));
  StepperState st(*it, delta / static_cast<double>(std::max<std::size_t>(1, steps)));
  for (std::size_t i = 0; i < std::max<std::size_t>(1, steps); ++i) step_strang_in_place(st, problem_);
  if (st.status != RunStatus::Running) throw NumericalError("SolverTrajectory: non-finite field during replay");
  st.field.t = s;
  return st.field;
}

FunctionTrajectory::FunctionTrajectory(std::size_t d, double t_min, double t_max, Fn fn)
    : d_(d), t0_(t_min), t1_(t_max), fn_(std::move(fn)) {
  if (d == 0 || d > kMaxDim) throw InvalidArgument("FunctionTrajectory: dimension must be 1..3");
  if (!(t_min <= t_max)) throw InvalidArgument("FunctionTrajectory: empty time range");
  if (!fn_) throw InvalidArgument("FunctionTrajectory: function is required");
}

ComplexField FunctionTrajectory::scaled(double s, const GridPtr& target, double c) const {
  require_time(s);
  if (!target || target->dim() != d_) throw InvalidArgument("FunctionTrajectory: target dimension mismatch");
  ComplexField out(target, s);
  for (std::size_t i = 0; i < target->size(); ++i) {
    auto x = target->point(i);
    for (std::size_t j = 0; j < d_; ++j) x[j] *= c;
    out.values[i] = fn_(s, x);
  }
  return out;
}

}  // namespace hnls
