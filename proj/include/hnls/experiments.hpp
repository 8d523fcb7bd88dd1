#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hnls/config.hpp"

namespace hnls {

inline constexpr int kExitOk = 0;          // Done or BlownUp; the outcome is in the manifest
inline constexpr int kExitConfig = 2;      // the config failed validation
inline constexpr int kExitFailure = 3;     // I/O or numerical failure while running

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 1;                   // concurrent eps runs in stability sweeps
  std::optional<std::uint64_t> seed;      // overrides the config seed
  std::vector<std::string> warnings;      // config lint, copied into the manifest
};

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct ExperimentOutcome {
  std::string status;  // Done, BlownUp, Failed or InvalidConfig
  int exit_code = kExitOk;
  std::string message;
  std::vector<OutputFile> files;
};

/// Runs the experiment, writing its outputs and manifest.json into
/// options.out_dir. Never throws for failures inside the run; they are
/// recorded with status Failed and exit code kExitFailure.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Manifest for a config that never ran: status InvalidConfig with the errors.
void write_invalid_config_manifest(const std::filesystem::path& out_dir, const std::string& config_text,
                                   const std::vector<std::string>& errors, const std::vector<std::string>& warnings);

std::string code_version();

}  // namespace hnls
