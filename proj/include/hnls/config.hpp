#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hnls/coupled.hpp"
#include "hnls/evolution.hpp"
#include "hnls/families.hpp"
#include "hnls/radial.hpp"

namespace hnls {

// Experiment configuration, parsed from JSON. The schema is documented in
// README.md; every block rejects keys it does not know.

enum class ExperimentKind {
  Simulate,
  PlaneWave,
  Standing,
  Semiclassical,
  Radial,
  TransformCheck,
  Stability,
  TwoWave,
  ConservationReport,
};

const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_kind(std::string_view s);
std::vector<std::string> kind_names();

struct ProblemConfig {
  std::size_t d = 2;
  std::vector<std::size_t> n;
  std::vector<double> len;
  std::vector<double> alpha;
  std::string preset;  // "hnls", "nls" or empty for an explicit vector
  double lambda = 1.0;
  double sigma = 2.0;
  std::optional<double> potential_k;
  double potential_gamma0 = 0.0;

  GridPtr grid() const;
  EvolutionProblem problem(const GridPtr& grid) const;
};

/// Initial data for v or u: a (boosted) Gaussian, a seeded sum of random
/// Gaussians, or zero.
struct ShapeConfig {
  std::string type = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<double> center;
  std::vector<double> velocity;
  std::size_t modes = 4;

  ComplexField build(const GridPtr& grid, std::uint64_t seed) const;
};

/// amplitude exp(-|z - center|^2 / (2 width^2)) on a 1-D or transverse grid.
struct ProfileConfig {
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<double> center;
};

struct PlaneWaveConfig {
  std::vector<double> c;
  ProfileConfig profile;
  std::optional<double> dt;

  PlaneWaveSpec spec(const ProblemConfig& p, double default_dt) const;
};

struct StandingWaveConfig {
  double omega = 0.0;
  ProfileConfig profile;
  std::optional<double> dt;

  StandingWaveSpec spec(const ProblemConfig& p, const GridPtr& grid, double default_dt) const;
};

struct SemiclassicalConfig {
  double k = 0.0;
  double a0 = 0.0;
  double gamma0 = 0.125;
  std::size_t refine_iterations = 500;
  ProfileConfig start{0.5, 1.0, {}};
  std::vector<double> times;
};

struct RadialConfig {
  double eps = 0.0;
  double r_max = 10.0;
  std::size_t intervals = 2000;
  int sign = 1;
  double lambda = 1.0;
  double sigma = 2.0;
  ProfileConfig profile{3.0, 1.0, {}};  // amplitude exp(-r^2 / width^2)
  RadialRunConfig run;
  std::vector<double> scan_eps;
};

struct TransformConfig {
  double a0 = 0.0;
  double k = 0.0;
  std::size_t d = 2;
  double t_end = 1.0;
  std::size_t samples = 201;
};

struct StabilityBlock {
  std::vector<double> eps;
  StabilityConfig run;
};

struct TwoWaveBlock {
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t sample_stride = 10;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  std::optional<ProblemConfig> problem;
  std::optional<ShapeConfig> initial;
  RunConfig run;                     // linf_ceiling empty means 1e6 * initial sup norm
  std::size_t snapshot_stride = 0;   // every k-th sample, 0 for final only
  std::optional<PlaneWaveConfig> plane_wave;
  std::optional<PlaneWaveConfig> plane_wave2;
  std::optional<StandingWaveConfig> standing_wave;
  std::optional<SemiclassicalConfig> semiclassical;
  std::optional<RadialConfig> radial;
  std::optional<TransformConfig> transform;
  std::optional<StabilityBlock> stability;
  std::optional<TwoWaveBlock> two_wave;
  nlohmann::json source;  // the parsed input document
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty() && config.has_value(); }
};

/// Validates the whole document and reports every error found. `kind`
/// fills in a missing "kind" key and must agree with a present one.
ConfigResult parse_config(std::string_view text, std::optional<ExperimentKind> kind = std::nullopt);

}  // namespace hnls
