#include "hnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <future>
#include <iomanip>
#include <sstream>

#include "hnls/errors.hpp"
#include "hnls/io.hpp"
#include "hnls/spectral.hpp"
#include "hnls/transforms.hpp"

#ifndef HNLS_VERSION
#define HNLS_VERSION "unknown"
#endif

namespace hnls {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Writes output files atomically and keeps their digests for the manifest.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& bytes) {
    write_file_atomic(dir_ / name, bytes);
    files_.push_back({name, sha256_hex(bytes), bytes.size()});
  }
  void json_file(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void snapshot(const std::string& name, const ComplexField& f) { write(name, encode_snapshot(f)); }

  const fs::path& dir() const { return dir_; }
  std::vector<OutputFile>& files() { return files_; }

 private:
  fs::path dir_;
  std::vector<OutputFile> files_;
};

void write_manifest(const fs::path& dir, const json& config_doc, const std::string& started, ExperimentOutcome& out,
                    std::uint64_t seed, unsigned threads, const std::vector<std::string>& warnings) {
  json m;
  m["config_sha256"] = sha256_hex(config_doc.dump());
  m["config"] = config_doc;
  m["code_version"] = code_version();
  m["started_utc"] = started;
  m["finished_utc"] = utc_now();
  m["status"] = out.status;
  m["exit_code"] = out.exit_code;
  m["message"] = out.message;
  m["seed"] = seed;
  m["threads"] = threads;
  m["warnings"] = warnings;
  json files = json::array();
  for (const auto& f : out.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  m["files"] = files;
  fs::create_directories(dir);
  write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

EvolutionProblem plain_problem(const ProblemConfig& p, const GridPtr& g) { return EvolutionProblem{g, p.lambda, p.sigma, std::nullopt}; }

std::string snapshot_name(std::size_t k) {
  std::ostringstream ss;
  ss << "snapshot_" << std::setw(5) << std::setfill('0') << k << ".bin";
  return ss.str();
}

// Full-grid run with observables and strided snapshots.
RunResult evolve(const ExperimentConfig& cfg, const EvolutionProblem& problem, const ComplexField& u0, Outputs& out) {
  std::size_t sample_index = 0, snap = 0;
  Observer obs;
  if (cfg.snapshot_stride > 0) {
    obs = [&](const ObservableSample&, const ComplexField& f) {
      if (sample_index++ % cfg.snapshot_stride == 0) out.snapshot(snapshot_name(snap++), f);
    };
  }
  auto res = run(StepperState(u0, cfg.run.dt0), problem, cfg.run, obs);
  out.write("observables.csv", observables_csv(res.series, problem.grid->dim()));
  out.snapshot("final.bin", res.state.field);
  return res;
}

json run_summary(const RunResult& res) {
  json j;
  j["status"] = to_string(res.state.status);
  j["t"] = res.state.t;
  j["steps"] = res.state.step_count;
  j["t_detect"] = res.state.status == RunStatus::BlownUp ? json(res.state.t_detect) : json(nullptr);
  return j;
}

std::string status_of(RunStatus s) { return s == RunStatus::BlownUp ? "BlownUp" : "Done"; }

std::string run_simulate(const ExperimentConfig& cfg, std::uint64_t seed, Outputs& out) {
  const auto& p = *cfg.problem;
  const auto grid = p.grid();
  const auto problem = p.problem(grid);
  const auto u0 = cfg.initial->build(grid, seed);
  const auto res = evolve(cfg, problem, u0, out);
  json summary = run_summary(res);
  if (cfg.kind == ExperimentKind::ConservationReport) {
    if (res.series.samples.size() < 3) throw InvalidArgument("conservation-report needs at least 3 samples");
    const auto rep = verify_conservation(res.series);
    out.json_file("conservation.json", conservation_report_json(rep, p.d));
  }
  out.json_file("summary.json", summary);
  return status_of(res.state.status);
}

double max_modulus_deviation(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(std::abs(a[i]) - std::abs(b[i])));
  return m;
}

std::string run_planewave(const ExperimentConfig& cfg, Outputs& out) {
  const auto& p = *cfg.problem;
  const auto grid = p.grid();
  const auto spec = cfg.plane_wave->spec(p, cfg.run.dt0);
  spec.validate(*grid);
  const auto u0 = plane_wave_field(spec, 0.0, grid);
  const auto res = evolve(cfg, plain_problem(p, grid), u0, out);
  json j = run_summary(res);
  j["unit_speed"] = spec.unit_speed();
  j["profile_alpha"] = spec.profile_alpha();
  if (res.state.status == RunStatus::Done) {
    const auto lifted = plane_wave_field(spec, res.state.t, grid);
    j["rel_l2_full_vs_lift"] = relative_l2_error(res.state.field, lifted);
    j["modulus_deviation_lift"] = max_modulus_deviation(lifted, u0);
    out.snapshot("profile_final.bin", plane_wave_profile(spec, res.state.t));
  }
  out.json_file("planewave.json", j);
  return status_of(res.state.status);
}

std::string run_standing(const ExperimentConfig& cfg, Outputs& out) {
  const auto& p = *cfg.problem;
  const auto grid = p.grid();
  const auto spec = cfg.standing_wave->spec(p, grid, cfg.run.dt0);
  spec.validate(*grid);
  const auto u0 = standing_wave_field(spec, 0.0, grid);
  const auto res = evolve(cfg, plain_problem(p, grid), u0, out);
  json j = run_summary(res);
  j["omega"] = spec.omega;
  if (res.state.status == RunStatus::Done) {
    j["rel_l2_full_vs_lift"] = relative_l2_error(res.state.field, standing_wave_field(spec, res.state.t, grid));
    out.snapshot("profile_final.bin", standing_wave_profile(spec, res.state.t));
  }
  out.json_file("standing.json", j);
  return status_of(res.state.status);
}

std::string run_semiclassical(const ExperimentConfig& cfg, Outputs& out) {
  const auto& p = *cfg.problem;
  const auto& s = *cfg.semiclassical;
  const auto grid = p.grid();
  const auto start = ComplexField::sample(grid, [&](const auto& x) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < grid->dim(); ++j) r2 += (x[j] - s.start.center[j]) * (x[j] - s.start.center[j]);
    return cplx(s.start.amplitude * std::exp(-r2 / (2.0 * s.start.width * s.start.width)), 0.0);
  });
  const auto cand = refine_bound_state(start, s.k, s.gamma0, p.lambda, s.refine_iterations);
  const auto spec = SemiclassicalSpec::make(cand.field, s.k, s.gamma0, s.a0, p.lambda);
  out.snapshot("bound_state.bin", cand.field);

  std::vector<std::vector<double>> cols(3);
  std::optional<double> singular_at;
  for (double t : s.times) {
    try {
      const auto psi = semiclassical_field(spec, t, grid);
      cols[0].push_back(t);
      cols[1].push_back(linf_norm(psi));
      cols[2].push_back(std::pow(l2_norm(psi), 2));
    } catch (const NumericalError&) {
      singular_at = t;
      break;
    }
  }
  out.write("semiclassical.csv", columns_csv({"t", "linf", "mass"}, cols));
  json j;
  j["defect"] = spec.defect.value;
  j["defect_start"] = cand.defect_history.front();
  j["refine_iterations"] = s.refine_iterations;
  const auto ts = closed_form_singular_time(s.a0, s.k);
  j["singular_time_closed_form"] = ts ? json(*ts) : json(nullptr);
  j["first_singular_request"] = singular_at ? json(*singular_at) : json(nullptr);
  j["status"] = singular_at ? "BlownUp" : "Done";
  out.json_file("semiclassical.json", j);
  return singular_at ? "BlownUp" : "Done";
}

std::string run_radial(const ExperimentConfig& cfg, Outputs& out) {
  const auto& r = *cfg.radial;
  const double w = r.profile.width;
  const auto profile = RadialProfile::sample(
      r.eps, r.r_max, r.intervals, [&](double x) { return cplx(r.profile.amplitude * std::exp(-x * x / (w * w)), 0.0); },
      r.sign, r.lambda, r.sigma);
  const auto traj = solve_radial(profile, r.run);
  out.write("radial_series.csv", radial_series_csv(traj));
  out.write("radial_final.csv", radial_profile_csv(traj.final_profile));
  json j;
  j["status"] = to_string(traj.status);
  j["t"] = traj.t.empty() ? 0.0 : traj.t.back();
  j["t_detect"] = traj.status == RunStatus::BlownUp ? json(traj.t_detect) : json(nullptr);
  j["outer_mass_ok"] = traj.outer_mass_ok();
  j["energy0"] = traj.samples.empty() ? 0.0 : traj.samples.front().energy;
  json scans = json::array();
  if (!r.scan_eps.empty()) {
    for (const auto& c : concentration_scan(traj, r.scan_eps))
      scans.push_back({{"eps", c.eps}, {"increasing_last_decade", c.increasing_last_decade},
                       {"final_value", c.value.empty() ? 0.0 : c.value.back()}});
  }
  j["concentration"] = scans;
  out.json_file("radial.json", j);
  return status_of(traj.status);
}

std::string run_transform_check(const ExperimentConfig& cfg, Outputs& out) {
  const auto& t = *cfg.transform;
  std::vector<double> times(t.samples);
  for (std::size_t i = 0; i < t.samples; ++i)
    times[i] = t.t_end * static_cast<double>(i) / static_cast<double>(t.samples - 1);
  const auto st = integrate_transform_odes(t.a0, t.k, t.d, times);

  std::vector<std::vector<double>> cols(8);
  double ea = 0.0, eb = 0.0, ef = 0.0, eg = 0.0;
  auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
  for (std::size_t i = 0; i < st.size(); ++i) {
    const double tt = st.t[i];
    const double a = closed_form_a(t.a0, t.k, tt);
    const double b = closed_form_b(t.a0, t.k, tt);
    const double f = std::pow(b, -0.5 * static_cast<double>(t.d));
    const double g = closed_form_g(t.a0, t.k, tt);
    ea = std::max(ea, rel(st.a[i], a));
    eb = std::max(eb, rel(st.b[i], b));
    ef = std::max(ef, rel(st.f[i], f));
    eg = std::max(eg, rel(st.g[i], g));
    const double row[] = {tt, st.a[i], st.b[i], st.f[i], st.g[i], a, b, g};
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].push_back(row[c]);
  }
  out.write("transform.csv", columns_csv({"t", "a", "b", "f", "g", "a_closed", "b_closed", "g_closed"}, cols));
  json j;
  j["a0"] = t.a0;
  j["k"] = t.k;
  j["d"] = t.d;
  j["samples_reached"] = st.size();
  j["truncated"] = st.truncated;
  j["singular_time"] = st.singular_time ? json(*st.singular_time) : json(nullptr);
  const auto ts = closed_form_singular_time(t.a0, t.k);
  j["singular_time_closed_form"] = ts ? json(*ts) : json(nullptr);
  j["max_rel_error"] = {{"a", ea}, {"b", eb}, {"f", ef}, {"g", eg}};
  if (st.size() >= 2 && st.t.back() > 0.0) {
    // Residuals use five-point differences, so they get their own fine grid.
    const double t_fine = st.t.back();
    const auto m = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(t_fine / 1e-3)));
    std::vector<double> fine(m + 1);
    for (std::size_t i = 0; i <= m; ++i) fine[i] = t_fine * static_cast<double>(i) / static_cast<double>(m);
    const auto c = constraint_residuals(integrate_transform_odes(t.a0, t.k, t.d, fine));
    j["constraint_residuals"] = {{"i", c.i}, {"ii", c.ii}, {"iii", c.iii}, {"iv", c.iv}, {"v", c.v}, {"vi", c.vi},
                                 {"fb", c.fb}, {"max", c.max()}};
  }
  out.json_file("transform.json", j);
  return st.truncated ? "BlownUp" : "Done";
}

StructuredWave stability_wave(const ExperimentConfig& cfg, const GridPtr& grid, double dt) {
  const auto& p = *cfg.problem;
  if (cfg.plane_wave) return StructuredWave::plane(cfg.plane_wave->spec(p, dt));
  return StructuredWave::standing(cfg.standing_wave->spec(p, grid, dt));
}

std::string run_stability(const ExperimentConfig& cfg, std::uint64_t seed, unsigned threads, Outputs& out) {
  const auto& p = *cfg.problem;
  const auto& block = *cfg.stability;
  const auto grid = p.grid();
  const auto wave = stability_wave(cfg, grid, block.run.dt);
  const auto shape = cfg.initial->build(grid, seed);

  // Each eps is an independent run; results are collected in list order.
  std::vector<StabilityReport> reports(block.eps.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, block.eps.size()));
  std::vector<std::future<void>> pending;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < block.eps.size(); i = next++)
        reports[i] = stability_run(wave, shape, {block.eps[i]}, block.run).front();
    }));
  }
  for (auto& f : pending) f.get();

  bool blown = false;
  json summary = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const std::string base = "stability_" + std::to_string(i);
    std::vector<std::vector<double>> cols = {r.t, r.h, r.wave_linf, r.wave_grad_linf};
    if (cols[2].size() != cols[0].size()) cols[2].assign(cols[0].size(), 0.0);
    if (cols[3].size() != cols[0].size()) cols[3].assign(cols[0].size(), 0.0);
    out.write(base + ".csv", columns_csv({"t", "h", "wave_linf", "wave_grad_linf"}, cols));
    const auto j = stability_report_json(r, base + ".csv");
    out.json_file(base + ".json", j);
    summary.push_back(j);
    blown = blown || r.status == StabilityStatus::BlownUp;
  }
  out.json_file("stability_summary.json", {{"reports", summary}});
  return blown ? "BlownUp" : "Done";
}

std::string run_two_wave(const ExperimentConfig& cfg, std::uint64_t seed, Outputs& out) {
  const auto& p = *cfg.problem;
  const auto& tw = *cfg.two_wave;
  const auto grid = p.grid();
  const auto w1 = StructuredWave::plane(cfg.plane_wave->spec(p, tw.dt));
  const auto w2 = StructuredWave::plane(cfg.plane_wave2->spec(p, tw.dt));
  const auto v0 = cfg.initial ? cfg.initial->build(grid, seed) : ComplexField(grid);
  const auto s = two_wave_run(w1, w2, v0, tw.t_end, tw.dt, tw.sample_stride);
  out.write("two_wave.csv", columns_csv({"t", "remainder_h1", "boundary_fraction"}, {s.t, s.remainder_h1, s.boundary_fraction}));
  out.snapshot("remainder_final.bin", s.remainder);
  const double rmax = s.remainder_h1.empty() ? 0.0 : *std::max_element(s.remainder_h1.begin(), s.remainder_h1.end());
  const double bmax =
      s.boundary_fraction.empty() ? 0.0 : *std::max_element(s.boundary_fraction.begin(), s.boundary_fraction.end());
  out.json_file("two_wave.json", {{"status", to_string(s.status)},
                                  {"product_scale", s.product_scale},
                                  {"max_remainder_h1", rmax},
                                  {"remainder_over_scale", s.product_scale > 0.0 ? rmax / s.product_scale : 0.0},
                                  {"max_boundary_fraction", bmax}});
  return status_of(s.status);
}

}  // namespace

std::string code_version() { return HNLS_VERSION; }

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const std::string started = utc_now();
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  ExperimentOutcome outcome;
  std::unique_ptr<Outputs> out;
  try {
    out = std::make_unique<Outputs>(opt.out_dir);
    switch (cfg.kind) {
      case ExperimentKind::Simulate:
      case ExperimentKind::ConservationReport: outcome.status = run_simulate(cfg, seed, *out); break;
      case ExperimentKind::PlaneWave: outcome.status = run_planewave(cfg, *out); break;
      case ExperimentKind::Standing: outcome.status = run_standing(cfg, *out); break;
      case ExperimentKind::Semiclassical: outcome.status = run_semiclassical(cfg, *out); break;
      case ExperimentKind::Radial: outcome.status = run_radial(cfg, *out); break;
      case ExperimentKind::TransformCheck: outcome.status = run_transform_check(cfg, *out); break;
      case ExperimentKind::Stability: outcome.status = run_stability(cfg, seed, opt.threads, *out); break;
      case ExperimentKind::TwoWave: outcome.status = run_two_wave(cfg, seed, *out); break;
    }
    outcome.exit_code = kExitOk;
  } catch (const std::exception& e) {
    outcome.status = "Failed";
    outcome.exit_code = kExitFailure;
    outcome.message = e.what();
  }
  if (out) outcome.files = out->files();
  try {
    write_manifest(opt.out_dir, cfg.source, started, outcome, seed, opt.threads, opt.warnings);
  } catch (const std::exception& e) {
    outcome.status = "Failed";
    outcome.exit_code = kExitFailure;
    outcome.message += std::string(outcome.message.empty() ? "" : "; ") + "manifest: " + e.what();
  }
  return outcome;
}

void write_invalid_config_manifest(const fs::path& out_dir, const std::string& config_text,
                                   const std::vector<std::string>& errors, const std::vector<std::string>& warnings) {
  ExperimentOutcome o;
  o.status = "InvalidConfig";
  o.exit_code = kExitConfig;
  for (const auto& e : errors) o.message += (o.message.empty() ? "" : "\n") + e;
  json doc = json::parse(config_text, nullptr, false);
  if (doc.is_discarded()) doc = config_text;
  write_manifest(out_dir, doc, utc_now(), o, 0, 1, warnings);
}

}  // namespace hnls
