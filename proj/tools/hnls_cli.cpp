#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hnls/config.hpp"
#include "hnls/experiments.hpp"
#include "hnls/io.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

int execute(hnls::ExperimentKind kind, const Common& c, CLI::App& sub) {
  std::string text;
  try {
    text = hnls::read_file(c.config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hnls::kExitFailure;
  }
  const auto parsed = hnls::parse_config(text, kind);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";

  std::filesystem::path out = c.out;
  if (out.empty() && parsed.config && parsed.config->output) out = *parsed.config->output;
  if (out.empty()) out = std::string("out-") + hnls::to_string(kind);

  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "error: " << e << "\n";
    try {
      hnls::write_invalid_config_manifest(out, text, parsed.errors, parsed.warnings);
    } catch (const std::exception& e) {
      std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    }
    return hnls::kExitConfig;
  }

  hnls::RunOptions opt;
  opt.out_dir = out;
  opt.threads = c.threads;
  if (sub.count("--seed")) opt.seed = c.seed;
  opt.warnings = parsed.warnings;
  const auto outcome = hnls::run_experiment(*parsed.config, opt);
  std::cout << hnls::to_string(kind) << ": " << outcome.status << " (" << outcome.files.size() << " files in "
            << out.string() << ")\n";
  if (!outcome.message.empty()) std::cerr << outcome.message << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HNLS simulation laboratory"};
  app.set_version_flag("--version", hnls::code_version());
  app.require_subcommand(1);

  Common common;
  int code = hnls::kExitOk;
  for (const auto& name : hnls::kind_names()) {
    const auto kind = *hnls::parse_kind(name);
    auto* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
    sub->add_option("--config", common.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides the config)");
    sub->add_option("--threads", common.threads, "concurrent runs in sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "seed for randomized shapes (overrides the config)");
    sub->callback([&, kind, sub] { code = execute(kind, common, *sub); });
  }

  CLI11_PARSE(app, argc, argv);
  return code;
}
