#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "bubbly_cli/config.hpp"

namespace bubbly::cli {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 1;
  std::uint64_t seed = 0;
};

/// Per-command overrides from the command line.
struct FieldOverrides {
  std::optional<double> epsilon;
  std::optional<std::string> band;
};

/// Each command writes its CSV/JSON files and manifest.json into the output directory.
/// Throws ConfigError or NumericError.
void cmd_bands(const RunConfig& config, const RunOptions& options);
void cmd_dirac(const RunConfig& config, const RunOptions& options);
void cmd_field(RunConfig config, const RunOptions& options, const FieldOverrides& overrides = {});
void cmd_envelope(RunConfig config, const RunOptions& options, std::optional<LatticeKind> kind = std::nullopt);
void cmd_compare(const RunConfig& config, const RunOptions& options);

/// Dispatches by name; returns the process exit code (0 ok, 1 config error, 2 numeric failure).
int run_command(const std::string& name, const std::string& config_path, const RunOptions& options,
                const FieldOverrides& field = {}, const std::optional<std::string>& lattice = std::nullopt);

}  // namespace bubbly::cli
