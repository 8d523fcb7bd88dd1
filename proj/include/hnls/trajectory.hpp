#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hnls/evolution.hpp"
#include "hnls/field.hpp"

namespace hnls {

/// Read-only access to a solution u(s, x). Implementations hold no mutable
/// state, so one instance can be shared between threads.
class TrajectorySampler {
 public:
  virtual ~TrajectorySampler() = default;

  virtual std::size_t dim() const = 0;
  virtual double t_min() const = 0;
  virtual double t_max() const = 0;

  /// u(s, c x) for x on the points of `target`. Points that fall outside the
  /// sampler's own box evaluate to zero. Throws InvalidArgument when s is
  /// outside [t_min, t_max].
  virtual ComplexField scaled(double s, const GridPtr& target, double c) const = 0;

  ComplexField at(double s, const GridPtr& target) const { return scaled(s, target, 1.0); }

 protected:
  void require_time(double s) const;
};

using SamplerPtr = std::shared_ptr<const TrajectorySampler>;

/// Base for trajectories stored on a grid. Off-grid evaluation uses the
/// trigonometric interpolant.
class GridTrajectory : public TrajectorySampler {
 public:
  explicit GridTrajectory(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  std::size_t dim() const override { return grid_->dim(); }

  virtual ComplexField field_at(double s) const = 0;
  ComplexField scaled(double s, const GridPtr& target, double c) const override;

 private:
  GridPtr grid_;
};

/// Numerical solution stored as checkpoints. A query evolves the nearest
/// preceding checkpoint with uniform Strang steps no longer than dt.
class SolverTrajectory : public GridTrajectory {
 public:
  SolverTrajectory(EvolutionProblem problem, const ComplexField& u0, double t_end, double dt,
                   std::size_t checkpoint_stride = 50);

  double t_min() const override { return checkpoints_.front().t; }
  double t_max() const override { return checkpoints_.back().t; }
  ComplexField field_at(double s) const override;

  RunStatus status() const { return status_; }
  const EvolutionProblem& problem() const { return problem_; }
  const std::vector<ComplexField>& checkpoints() const { return checkpoints_; }

 private:
  EvolutionProblem problem_;
  double dt_;
  std::vector<ComplexField> checkpoints_;  // sorted by time
  RunStatus status_ = RunStatus::Running;
};

/// Closed-form u(s, x), evaluated pointwise. Never masked.
class FunctionTrajectory : public TrajectorySampler {
 public:
  using Fn = std::function<cplx(double, const std::array<double, kMaxDim>&)>;

  FunctionTrajectory(std::size_t d, double t_min, double t_max, Fn fn);

  std::size_t dim() const override { return d_; }
  double t_min() const override { return t0_; }
  double t_max() const override { return t1_; }
  ComplexField scaled(double s, const GridPtr& target, double c) const override;

 private:
  std::size_t d_;
  double t0_;
  double t1_;
  Fn fn_;
};

/// True when every coordinate of x lies in the half-open box of `grid`.
bool inside_box(const Grid& grid, const std::array<double, kMaxDim>& x);

}  // namespace hnls
