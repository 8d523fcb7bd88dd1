#include "hnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "hnls/errors.hpp"

namespace hnls {

namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::Simulate, "simulate"},
    {ExperimentKind::PlaneWave, "planewave"},
    {ExperimentKind::Standing, "standing"},
    {ExperimentKind::Semiclassical, "semiclassical"},
    {ExperimentKind::Radial, "radial"},
    {ExperimentKind::TransformCheck, "transform-check"},
    {ExperimentKind::Stability, "stability"},
    {ExperimentKind::TwoWave, "two-wave"},
    {ExperimentKind::ConservationReport, "conservation-report"},
};

std::string num(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

bool is_pow2(double x) {
  if (x < 2 || x != std::floor(x) || x > 1e9) return false;
  const auto v = static_cast<std::uint64_t>(x);
  return (v & (v - 1)) == 0;
}

bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

// Typed access to one JSON object; remembers which keys were asked for so the
// rest can be reported as unknown.
class Block {
 public:
  Block(const json* obj, std::string path, Diagnostics& diag) : obj_(obj), path_(std::move(path)), diag_(&diag) {
    if (obj_ && !obj_->is_object()) {
      error("", "must be an object");
      obj_ = nullptr;
    }
  }

  bool present() const { return obj_ != nullptr; }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void error(const std::string& key, const std::string& msg) const {
    diag_->errors.push_back((key.empty() ? path_ : at(key)) + ": " + msg);
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return obj_ && obj_->contains(key) ? &(*obj_)[key] : nullptr;
  }

  std::optional<double> number(const std::string& key, bool required = false) {
    const json* v = raw(key);
    if (!v) {
      if (required) error(key, "is required");
      return std::nullopt;
    }
    if (!v->is_number() || !std::isfinite(v->get<double>())) {
      error(key, "must be a finite number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double positive_or(const std::string& key, double fallback, bool required = false) {
    const auto v = number(key, required);
    if (v && !(*v > 0.0)) {
      error(key, "must be positive, got " + num(*v));
      return fallback;
    }
    return v.value_or(fallback);
  }

  std::optional<std::uint64_t> integer(const std::string& key, std::uint64_t min, bool required = false) {
    const json* v = raw(key);
    if (!v) {
      if (required) error(key, "is required");
      return std::nullopt;
    }
    if (!v->is_number_unsigned()) {
      error(key, "must be a non-negative integer");
      return std::nullopt;
    }
    const auto x = v->get<std::uint64_t>();
    if (x < min) {
      error(key, "must be at least " + std::to_string(min));
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::vector<double>> numbers(const std::string& key, bool required = false) {
    const json* v = raw(key);
    if (!v) {
      if (required) error(key, "is required");
      return std::nullopt;
    }
    if (!v->is_array()) {
      error(key, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& e = (*v)[i];
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        error(key + "[" + std::to_string(i) + "]", "must be a finite number");
        ok = false;
      } else {
        out.push_back(e.get<double>());
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::string> string(const std::string& key, bool required = false) {
    const json* v = raw(key);
    if (!v) {
      if (required) error(key, "is required");
      return std::nullopt;
    }
    if (!v->is_string()) {
      error(key, "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      error(key, "must be true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  Block sub(const std::string& key) { return Block(raw(key), at(key), *diag_); }

  void finish() const {
    if (!obj_) return;
    for (const auto& item : obj_->items()) {
      if (!seen_.count(item.key())) error(item.key(), "unknown key");
    }
  }

 private:
  const json* obj_;
  std::string path_;
  Diagnostics* diag_;
  std::set<std::string> seen_;
};

std::vector<double> sized(Block& b, const std::string& key, std::size_t n, std::vector<double> fallback,
                          bool required = false) {
  auto v = b.numbers(key, required);
  if (!v) return fallback;
  if (v->size() != n) {
    b.error(key, "must have " + std::to_string(n) + " entries, got " + std::to_string(v->size()));
    return fallback;
  }
  return *v;
}

std::optional<ProblemConfig> parse_problem(Block b) {
  if (!b.present()) return std::nullopt;
  ProblemConfig p;
  const auto d = b.integer("d", 2, true);
  if (d && *d > 3) b.error("d", "must be 2 or 3");
  p.d = d && *d <= 3 ? static_cast<std::size_t>(*d) : 2;

  if (auto v = b.numbers("n", true)) {
    if (v->size() != p.d) b.error("n", "must have d = " + std::to_string(p.d) + " entries");
    for (std::size_t j = 0; j < v->size(); ++j) {
      const std::string key = "n[" + std::to_string(j) + "]";
      const double x = (*v)[j];
      if (x != std::floor(x) || x < 1) b.error(key, "must be a positive integer");
      else if (!is_pow2(x)) b.error(key, "= " + num(x) + " is not a power of two (grid sizes must be powers of two)");
      else p.n.push_back(static_cast<std::size_t>(x));
    }
  }
  if (auto v = b.numbers("len", true)) {
    if (v->size() != p.d) b.error("len", "must have d = " + std::to_string(p.d) + " entries");
    for (std::size_t j = 0; j < v->size(); ++j)
      if (!((*v)[j] > 0.0)) b.error("len[" + std::to_string(j) + "]", "must be positive");
    p.len = *v;
  }

  p.preset = "hnls";
  p.alpha = hnls_alpha(p.d);
  if (const json* a = b.raw("alpha")) {
    if (a->is_string()) {
      p.preset = a->get<std::string>();
      if (p.preset == "nls") p.alpha = nls_alpha(p.d);
      else if (p.preset != "hnls") b.error("alpha", "preset must be \"hnls\" or \"nls\"");
    } else {
      p.preset.clear();
      p.alpha = sized(b, "alpha", p.d, p.alpha);
      for (std::size_t j = 0; j < p.alpha.size(); ++j)
        if (p.alpha[j] == 0.0) b.error("alpha[" + std::to_string(j) + "]", "must be non-zero");
    }
  }
  p.lambda = b.number_or("lambda", 1.0);
  p.sigma = b.positive_or("sigma", 2.0);
  Block pot = b.sub("potential");
  if (pot.present()) {
    p.potential_k = pot.number("k", true);
    p.potential_gamma0 = pot.number_or("gamma0", 0.0);
    pot.finish();
  }
  b.finish();
  return p;
}

ShapeConfig parse_shape(Block b, std::size_t d) {
  ShapeConfig s;
  s.type = b.string("type").value_or("gaussian");
  if (s.type != "gaussian" && s.type != "random" && s.type != "zero")
    b.error("type", "must be \"gaussian\", \"random\" or \"zero\"");
  s.amplitude = b.number_or("amplitude", 1.0);
  s.width = b.positive_or("width", 1.0);
  s.center = sized(b, "center", d, std::vector<double>(d, 0.0));
  s.velocity = sized(b, "velocity", d, std::vector<double>(d, 0.0));
  s.modes = b.integer("modes", 1).value_or(4);
  b.finish();
  return s;
}

ProfileConfig parse_profile(Block b, std::size_t dims, ProfileConfig fallback) {
  ProfileConfig p = fallback;
  p.center.assign(dims, 0.0);
  if (!b.present()) return p;
  p.amplitude = b.number_or("amplitude", p.amplitude);
  p.width = b.positive_or("width", p.width);
  if (dims == 1 && b.raw("center") && b.raw("center")->is_number()) p.center = {b.number_or("center", 0.0)};
  else p.center = sized(b, "center", dims, p.center);
  b.finish();
  return p;
}

PlaneWaveConfig parse_plane(Block b, std::size_t d) {
  PlaneWaveConfig w;
  w.c = sized(b, "c", d - 1, std::vector<double>(d - 1, 0.0), true);
  w.profile = parse_profile(b.sub("profile"), 1, ProfileConfig{});
  if (b.raw("dt")) w.dt = b.positive_or("dt", 1e-3);
  b.finish();
  return w;
}

RunConfig parse_run(Block b, RunConfig r, std::size_t* snapshot_stride) {
  r.t_end = b.positive_or("t_end", r.t_end);
  r.dt0 = b.positive_or("dt0", r.dt0);
  r.adapt = b.boolean("adapt").value_or(r.adapt);
  if (b.raw("linf_ceiling")) r.linf_ceiling = b.positive_or("linf_ceiling", 1.0);
  if (b.raw("dt_floor")) r.dt_floor = b.positive_or("dt_floor", 1e-12);
  r.sample_stride = b.integer("sample_stride", 1).value_or(r.sample_stride);
  if (snapshot_stride) *snapshot_stride = b.integer("snapshot_stride", 0).value_or(0);
  b.finish();
  return r;
}

void lint_plane_regime(const ProblemConfig& p, const PlaneWaveConfig& w, std::vector<std::string>& warnings) {
  double c2 = 0.0;
  for (double c : w.c) c2 += c * c;
  const double c = std::sqrt(c2);
  if ((c - 1.0) * p.lambda <= 0.0)
    warnings.push_back("out-of-regime: (|c|-1)λ ≤ 0 (plane-wave stability is only certified for (|c|-1)λ > 0); got |c| = " +
                       num(c) + ", λ = " + num(p.lambda));
  if (p.d != 2) warnings.push_back("out-of-regime: plane-wave stability is only certified for d = 2");
  if (p.sigma != 4.0) warnings.push_back("out-of-regime: plane-wave stability is only certified for sigma = 4");
}

void lint_standing_regime(const ProblemConfig& p, std::vector<std::string>& warnings) {
  if (p.lambda <= 0.0) warnings.push_back("out-of-regime: λ ≤ 0 (standing-wave stability needs λ > 0)");
  if (!((p.d == 2 && p.sigma == 4.0) || (p.d == 3 && p.sigma == 2.0)))
    warnings.push_back("out-of-regime: standing-wave stability is only certified for (d, sigma) = (2, 4) or (3, 2)");
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "?";
}

std::optional<ExperimentKind> parse_kind(std::string_view s) {
  for (const auto& [kind, name] : kKinds)
    if (s == name) return kind;
  return std::nullopt;
}

std::vector<std::string> kind_names() {
  std::vector<std::string> out;
  for (const auto& entry : kKinds) out.emplace_back(entry.second);
  return out;
}

GridPtr ProblemConfig::grid() const { return make_grid(d, n, len, alpha); }

EvolutionProblem ProblemConfig::problem(const GridPtr& g) const {
  EvolutionProblem p{g, lambda, sigma, std::nullopt};
  if (potential_k) p.potential = harmonic_potential(*g, *potential_k, potential_gamma0);
  return p;
}

ComplexField ShapeConfig::build(const GridPtr& g, std::uint64_t seed) const {
  const std::size_t d = g->dim();
  if (type == "zero") return ComplexField(g);
  if (type == "gaussian") {
    return ComplexField::sample(g, [&](const auto& x) {
      double r2 = 0.0, phase = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double c = j < center.size() ? center[j] : 0.0;
        r2 += (x[j] - c) * (x[j] - c);
        phase += (j < velocity.size() ? velocity[j] : 0.0) * x[j];
      }
      return amplitude * std::exp(-r2 / (2.0 * width * width)) * std::polar(1.0, phase);
    });
  }
  if (type != "random") throw InvalidArgument("ShapeConfig: unknown type " + type);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-0.2, 0.2);
  std::normal_distribution<double> coef(0.0, 1.0);
  std::vector<std::array<double, kMaxDim>> centres(modes);
  std::vector<cplx> amps(modes);
  for (std::size_t m = 0; m < modes; ++m) {
    centres[m] = {};
    for (std::size_t j = 0; j < d; ++j) centres[m][j] = pos(rng) * g->length(j);
    const double re = coef(rng);
    const double im = coef(rng);
    amps[m] = amplitude / std::sqrt(static_cast<double>(modes)) * cplx(re, im);
  }
  return ComplexField::sample(g, [&](const auto& x) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < modes; ++m) {
      double r2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) r2 += (x[j] - centres[m][j]) * (x[j] - centres[m][j]);
      acc += amps[m] * std::exp(-r2 / (2.0 * width * width));
    }
    return acc;
  });
}

PlaneWaveSpec PlaneWaveConfig::spec(const ProblemConfig& p, double default_dt) const {
  const std::size_t n = p.n.at(0);
  const double len = p.len.at(0);
  const double z0 = profile.center.empty() ? 0.0 : profile.center[0];
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = -0.5 * len + len * static_cast<double>(i) / static_cast<double>(n) - z0;
    z -= len * std::round(z / len);
    f[i] = profile.amplitude * std::exp(-z * z / (2.0 * profile.width * profile.width));
  }
  return PlaneWaveSpec{std::move(f), len, c, p.lambda, p.sigma, dt.value_or(default_dt)};
}

StandingWaveSpec StandingWaveConfig::spec(const ProblemConfig& p, const GridPtr& g, double default_dt) const {
  const auto tg = transverse_grid(*g);
  auto f0 = ComplexField::sample(tg, [&](const auto& y) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < tg->dim(); ++j) {
      const double c = j < profile.center.size() ? profile.center[j] : 0.0;
      r2 += (y[j] - c) * (y[j] - c);
    }
    return cplx(profile.amplitude * std::exp(-r2 / (2.0 * profile.width * profile.width)), 0.0);
  });
  return StandingWaveSpec{std::move(f0), omega, p.lambda, p.sigma, dt.value_or(default_dt)};
}

ConfigResult parse_config(std::string_view text, std::optional<ExperimentKind> kind_hint) {
  ConfigResult result;
  Diagnostics diag;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back("config: top level must be an object");
    return result;
  }

  ExperimentConfig cfg;
  cfg.source = doc;
  Block top(&doc, "", diag);

  std::optional<ExperimentKind> kind;
  if (auto s = top.string("kind")) {
    kind = parse_kind(*s);
    if (!kind) {
      std::string names;
      for (const auto& n : kind_names()) names += (names.empty() ? "" : ", ") + n;
      top.error("kind", "unknown kind \"" + *s + "\" (expected one of " + names + ")");
    } else if (kind_hint && *kind != *kind_hint) {
      top.error("kind", std::string("\"") + *s + "\" does not match the subcommand " + to_string(*kind_hint));
    }
  } else if (kind_hint) {
    kind = kind_hint;
  } else if (!top.raw("kind")) {
    top.error("kind", "is required");
  }
  cfg.kind = kind.value_or(ExperimentKind::Simulate);

  cfg.seed = top.integer("seed", 0).value_or(0);
  cfg.output = top.string("output");
  cfg.problem = parse_problem(top.sub("problem"));
  const std::size_t d = cfg.problem ? cfg.problem->d : 2;

  if (Block b = top.sub("initial"); b.present()) cfg.initial = parse_shape(std::move(b), d);
  cfg.run = parse_run(top.sub("run"), RunConfig{}, &cfg.snapshot_stride);

  if (Block b = top.sub("plane_wave"); b.present()) cfg.plane_wave = parse_plane(std::move(b), d);
  if (Block b = top.sub("plane_wave2"); b.present()) cfg.plane_wave2 = parse_plane(std::move(b), d);
  if (Block b = top.sub("standing_wave"); b.present()) {
    StandingWaveConfig w;
    const auto omega = b.number("omega");
    const auto mode = b.raw("mode") ? b.number("mode") : std::nullopt;
    if (omega && mode) b.error("", "give either omega or mode, not both");
    if (!omega && !mode) b.error("", "needs omega or mode (omega = 2 pi mode / len_x)");
    if (mode && cfg.problem && !cfg.problem->len.empty()) w.omega = 2.0 * std::numbers::pi * *mode / cfg.problem->len[0];
    if (omega) w.omega = *omega;
    if (mode && !near_integer(*mode)) b.error("mode", "must be an integer");
    w.profile = parse_profile(b.sub("profile"), d - 1, ProfileConfig{});
    if (b.raw("dt")) w.dt = b.positive_or("dt", 1e-3);
    b.finish();
    cfg.standing_wave = w;
  }
  if (Block b = top.sub("semiclassical"); b.present()) {
    SemiclassicalConfig s;
    s.k = b.number("k", true).value_or(0.0);
    s.a0 = b.number_or("a0", 0.0);
    s.gamma0 = b.number_or("gamma0", s.gamma0);
    s.refine_iterations = b.integer("refine_iterations", 0).value_or(s.refine_iterations);
    s.start = parse_profile(b.sub("start"), d, s.start);
    if (auto t = b.numbers("times", true)) {
      s.times = *t;
      if (t->empty()) b.error("times", "must not be empty");
      for (std::size_t i = 0; i < t->size(); ++i) {
        if ((*t)[i] < 0.0) b.error("times", "must be non-negative");
        if (i && !((*t)[i] > (*t)[i - 1])) b.error("times", "must increase strictly");
      }
    }
    b.finish();
    cfg.semiclassical = s;
  }
  if (Block b = top.sub("radial"); b.present()) {
    RadialConfig r;
    r.eps = b.number_or("eps", 0.0);
    r.r_max = b.positive_or("r_max", r.r_max);
    if (r.eps < 0.0 || r.eps >= r.r_max) b.error("eps", "must lie in [0, r_max)");
    r.intervals = b.integer("intervals", 4).value_or(r.intervals);
    const double sign = b.number_or("sign", 1.0);
    if (sign != 1.0 && sign != -1.0) b.error("sign", "must be +1 or -1");
    r.sign = sign < 0.0 ? -1 : 1;
    r.lambda = b.number_or("lambda", r.lambda);
    r.sigma = b.positive_or("sigma", r.sigma);
    r.profile = parse_profile(b.sub("profile"), 0, r.profile);
    r.run.t_end = b.positive_or("t_end", 1.0);
    r.run.dt0 = b.positive_or("dt0", 1e-3);
    r.run.adapt = b.boolean("adapt").value_or(true);
    if (b.raw("linf_ceiling")) r.run.linf_ceiling = b.positive_or("linf_ceiling", 1.0);
    if (b.raw("dt_floor")) r.run.dt_floor = b.positive_or("dt_floor", 1e-12);
    r.run.sample_stride = b.integer("sample_stride", 1).value_or(r.run.sample_stride);
    if (b.raw("snapshot_radius")) r.run.snapshot_radius = b.positive_or("snapshot_radius", 1.0);
    if (auto s = b.numbers("scan_eps")) {
      r.scan_eps = *s;
      for (double e : *s)
        if (!(e > 0.0)) b.error("scan_eps", "entries must be positive");
      if (!s->empty() && !r.run.snapshot_radius)
        r.run.snapshot_radius = *std::max_element(s->begin(), s->end());
    }
    b.finish();
    cfg.radial = r;
  }
  if (Block b = top.sub("transform"); b.present()) {
    TransformConfig t;
    t.a0 = b.number_or("a0", 0.0);
    t.k = b.number("k", true).value_or(0.0);
    t.d = b.integer("d", 1).value_or(2);
    if (t.d > 3) b.error("d", "must be 1, 2 or 3");
    t.t_end = b.positive_or("t_end", 1.0, true);
    t.samples = b.integer("samples", 5).value_or(t.samples);
    b.finish();
    cfg.transform = t;
  }
  if (Block b = top.sub("stability"); b.present()) {
    StabilityBlock s;
    if (auto e = b.numbers("eps", true)) {
      s.eps = *e;
      if (e->empty()) b.error("eps", "must not be empty");
      for (double x : *e)
        if (x < 0.0) b.error("eps", "entries must be non-negative");
    }
    s.run.t_end = b.positive_or("t_end", s.run.t_end);
    s.run.dt = b.positive_or("dt", s.run.dt);
    s.run.sample_stride = b.integer("sample_stride", 1).value_or(s.run.sample_stride);
    s.run.growth_limit = b.positive_or("growth_limit", s.run.growth_limit);
    s.run.resolution_tail = b.positive_or("resolution_tail", s.run.resolution_tail);
    b.finish();
    cfg.stability = s;
  }
  if (Block b = top.sub("two_wave"); b.present()) {
    TwoWaveBlock t;
    t.t_end = b.positive_or("t_end", t.t_end);
    t.dt = b.positive_or("dt", t.dt);
    t.sample_stride = b.integer("sample_stride", 1).value_or(t.sample_stride);
    b.finish();
    cfg.two_wave = t;
  }
  top.finish();

  // Blocks each kind needs.
  auto need = [&](bool ok, const char* block) {
    if (!ok) diag.errors.push_back(std::string(block) + ": required for kind " + to_string(cfg.kind));
  };
  const bool grid_kind = cfg.kind != ExperimentKind::Radial && cfg.kind != ExperimentKind::TransformCheck;
  if (kind && grid_kind) need(cfg.problem.has_value(), "problem");
  if (kind) {
    switch (cfg.kind) {
      case ExperimentKind::Simulate:
      case ExperimentKind::ConservationReport: need(cfg.initial.has_value(), "initial"); break;
      case ExperimentKind::PlaneWave: need(cfg.plane_wave.has_value(), "plane_wave"); break;
      case ExperimentKind::Standing: need(cfg.standing_wave.has_value(), "standing_wave"); break;
      case ExperimentKind::Semiclassical: need(cfg.semiclassical.has_value(), "semiclassical"); break;
      case ExperimentKind::Radial: need(cfg.radial.has_value(), "radial"); break;
      case ExperimentKind::TransformCheck: need(cfg.transform.has_value(), "transform"); break;
      case ExperimentKind::Stability:
        need(cfg.stability.has_value(), "stability");
        need(cfg.initial.has_value(), "initial");
        if (cfg.plane_wave.has_value() == cfg.standing_wave.has_value())
          diag.errors.push_back("stability: exactly one of plane_wave and standing_wave is required");
        break;
      case ExperimentKind::TwoWave:
        need(cfg.plane_wave.has_value(), "plane_wave");
        need(cfg.plane_wave2.has_value(), "plane_wave2");
        need(cfg.two_wave.has_value(), "two_wave");
        break;
    }
  }

  // Cross-block checks that need a well-formed problem.
  const bool problem_ok = cfg.problem && cfg.problem->n.size() == d && cfg.problem->len.size() == d;
  if (problem_ok) {
    const auto& p = *cfg.problem;
    for (const auto* w : {cfg.plane_wave ? &*cfg.plane_wave : nullptr, cfg.plane_wave2 ? &*cfg.plane_wave2 : nullptr}) {
      if (!w || w->c.size() != d - 1) continue;
      for (std::size_t j = 0; j + 1 < d; ++j) {
        const double q = w->c[j] * p.len[j + 1] / p.len[0];
        if (!near_integer(q))
          diag.errors.push_back("plane_wave.c[" + std::to_string(j) + "]: c len_y / len_x = " + num(q) +
                                " must be an integer for the wave to be periodic on the grid");
      }
    }
    if (cfg.standing_wave) {
      const double q = cfg.standing_wave->omega * p.len[0] / (2.0 * std::numbers::pi);
      if (!near_integer(q))
        diag.errors.push_back("standing_wave.omega: omega len_x / 2 pi = " + num(q) + " must be an integer");
    }
    if (cfg.kind == ExperimentKind::TwoWave && cfg.plane_wave && cfg.plane_wave2) {
      if (cfg.plane_wave->c == cfg.plane_wave2->c) diag.errors.push_back("plane_wave2.c: must differ from plane_wave.c");
      if (d != 2) diag.errors.push_back("problem.d: two-wave runs need d = 2");
      if (p.sigma < 1.0) diag.errors.push_back("problem.sigma: two-wave runs need sigma >= 1");
    }
    if (cfg.kind == ExperimentKind::Stability) {
      if (cfg.plane_wave && cfg.plane_wave->c.size() == d - 1) lint_plane_regime(p, *cfg.plane_wave, diag.warnings);
      if (cfg.standing_wave) lint_standing_regime(p, diag.warnings);
    }
    const bool family = cfg.kind == ExperimentKind::PlaneWave || cfg.kind == ExperimentKind::Standing ||
                        cfg.kind == ExperimentKind::Stability || cfg.kind == ExperimentKind::TwoWave ||
                        cfg.kind == ExperimentKind::Semiclassical;
    if (family && p.alpha != hnls_alpha(d))
      diag.errors.push_back(std::string("problem.alpha: kind ") + to_string(cfg.kind) +
                            " needs the hnls signature (1, -1, ...)");
    const bool uses_potential = cfg.kind == ExperimentKind::Simulate || cfg.kind == ExperimentKind::ConservationReport;
    if (p.potential_k && !uses_potential)
      diag.warnings.push_back(std::string("problem.potential: ignored for kind ") + to_string(cfg.kind));
    if (cfg.initial && cfg.initial->type == "random" && !cfg.source.contains("seed"))
      diag.warnings.push_back("initial: random shape without an explicit seed uses seed 0");
  }

  result.errors = std::move(diag.errors);
  result.warnings = std::move(diag.warnings);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

}  // namespace hnls
