#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bubbly/homogenize.hpp"

namespace bubbly::cli {

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure of a pipeline. Maps to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BandsSection {
  std::vector<std::string> path;
  int points_per_segment = 12;
};

struct DiracSection {
  double h_rel = 1e-3;
  int directions = 8;
  /// Fit window in units of |alpha*|.
  double t_min = 1e-3;
  double t_max = 5e-2;
  int samples = 6;
};

struct FieldSection {
  double epsilon = 8e-3;
  /// "upper", "lower" (honeycomb) or "first" (square).
  std::string band;
  int cells = 2;
  int per_cell = 20;
  int line_cells = 64;
  int line_per_cell = 8;
  int probes = 100;
};

struct EnvelopeSection {
  std::vector<double> epsilons;
  std::vector<double> fft_epsilons;
  int fft_cells = 64;
  int fft_per_cell = 8;
};

struct CompareSection {
  std::vector<double> honeycomb_epsilons;
  std::vector<double> square_epsilons;
};

struct RunConfig {
  LatticeKind lattice = LatticeKind::Honeycomb;
  double L = 1.0;
  double R = 0.2;
  int n_modes = 6;
  int n_quad = 64;
  Material material;
  SolverOptions solver;
  BandsSection bands;
  DiracSection dirac;
  FieldSection field;
  EnvelopeSection envelope;
  CompareSection compare;
};

/// Defaults for a lattice kind; the honeycomb defaults are the reference crystal
/// (L = 1, R = 0.2, rho = kappa = 1000, rho_b = kappa_b = 1).
RunConfig default_config(LatticeKind kind);

/// Missing keys take the defaults of the configured lattice kind; unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Reads a config file, or the config embedded in a manifest written by a previous run.
RunConfig load_config(const std::string& path);

/// Throws ConfigError on out-of-range values.
void validate(const RunConfig& c);

Lattice lattice_of(const RunConfig& c);
DimerGeometry geometry_of(const RunConfig& c);

}  // namespace bubbly::cli
