#include "bubbly_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace bubbly::cli {

using nlohmann::json;

namespace {

// i / denominator for first <= i <= last; division keeps each entry equal to its decimal literal.
std::vector<double> grid(int first, int last, double denominator) {
  std::vector<double> out;
  for (int i = first; i <= last; ++i) out.push_back(i / denominator);
  return out;
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

// Integer-valued fields reject non-integral numbers instead of truncating them.
void read_int(const json& j, const char* key, int& target, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  target = j.at(key).get<int>();
}

}  // namespace

RunConfig default_config(LatticeKind kind) {
  RunConfig c;
  c.lattice = kind;
  if (kind == LatticeKind::Honeycomb) {
    c.bands.path = {"Gamma", "K", "M", "Gamma"};
    c.field.band = "upper";
    c.envelope.epsilons = grid(-5, 5, 500.0);
  } else {
    c.bands.path = {"Gamma", "X", "M", "Gamma"};
    c.field.band = "first";
    c.envelope.epsilons = {-0.004, -0.002};
    for (double e : grid(1, 10, 1000.0)) c.envelope.epsilons.push_back(e);
  }
  c.envelope.fft_epsilons = {8e-3};
  c.compare.honeycomb_epsilons = grid(-5, 5, 500.0);
  c.compare.square_epsilons = grid(1, 10, 1000.0);
  return c;
}

RunConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"schema_version", "lattice", "geometry", "material", "greens", "solver", "bands", "dirac", "field",
              "envelope", "compare"});
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw ConfigError("unsupported schema_version");
  LatticeKind kind = LatticeKind::Honeycomb;
  if (j.contains("lattice")) {
    const json& l = j.at("lattice");
    check_keys(l, "lattice", {"kind", "L"});
    if (l.contains("kind")) {
      try {
        kind = lattice_kind_from_string(l.at("kind").get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("lattice.kind: ") + e.what());
      }
    }
  }
  RunConfig c = default_config(kind);
  if (j.contains("lattice")) read(j.at("lattice"), "L", c.L, "lattice");
  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    check_keys(g, "geometry", {"R", "n_modes", "n_quad"});
    read(g, "R", c.R, "geometry");
    read_int(g, "n_modes", c.n_modes, "geometry");
    read_int(g, "n_quad", c.n_quad, "geometry");
  }
  if (j.contains("material")) {
    const json& m = j.at("material");
    check_keys(m, "material", {"rho", "kappa", "rho_b", "kappa_b"});
    read(m, "rho", c.material.rho, "material");
    read(m, "kappa", c.material.kappa, "material");
    read(m, "rho_b", c.material.rho_b, "material");
    read(m, "kappa_b", c.material.kappa_b, "material");
  }
  if (j.contains("greens")) {
    const json& g = j.at("greens");
    check_keys(g, "greens", {"ewald_split", "real_shells", "recip_shells", "tolerance"});
    read(g, "ewald_split", c.solver.ewald.split, "greens");
    read_int(g, "real_shells", c.solver.ewald.real_shells, "greens");
    read_int(g, "recip_shells", c.solver.ewald.recip_shells, "greens");
    read(g, "tolerance", c.solver.ewald.tolerance, "greens");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"omega_tol", "residual_tol", "bracket"});
    read(s, "omega_tol", c.solver.omega_tol, "solver");
    read(s, "residual_tol", c.solver.residual_tol, "solver");
    read(s, "bracket", c.solver.bracket, "solver");
  }
  if (j.contains("bands")) {
    const json& b = j.at("bands");
    check_keys(b, "bands", {"path", "points_per_segment"});
    read(b, "path", c.bands.path, "bands");
    read_int(b, "points_per_segment", c.bands.points_per_segment, "bands");
  }
  if (j.contains("dirac")) {
    const json& d = j.at("dirac");
    check_keys(d, "dirac", {"h_rel", "directions", "t_min", "t_max", "samples"});
    read(d, "h_rel", c.dirac.h_rel, "dirac");
    read_int(d, "directions", c.dirac.directions, "dirac");
    read(d, "t_min", c.dirac.t_min, "dirac");
    read(d, "t_max", c.dirac.t_max, "dirac");
    read_int(d, "samples", c.dirac.samples, "dirac");
  }
  if (j.contains("field")) {
    const json& f = j.at("field");
    check_keys(f, "field", {"epsilon", "band", "cells", "per_cell", "line_cells", "line_per_cell", "probes"});
    read(f, "epsilon", c.field.epsilon, "field");
    read(f, "band", c.field.band, "field");
    read_int(f, "cells", c.field.cells, "field");
    read_int(f, "per_cell", c.field.per_cell, "field");
    read_int(f, "line_cells", c.field.line_cells, "field");
    read_int(f, "line_per_cell", c.field.line_per_cell, "field");
    read_int(f, "probes", c.field.probes, "field");
  }
  if (j.contains("envelope")) {
    const json& e = j.at("envelope");
    check_keys(e, "envelope", {"epsilons", "fft_epsilons", "fft_cells", "fft_per_cell"});
    read(e, "epsilons", c.envelope.epsilons, "envelope");
    read(e, "fft_epsilons", c.envelope.fft_epsilons, "envelope");
    read_int(e, "fft_cells", c.envelope.fft_cells, "envelope");
    read_int(e, "fft_per_cell", c.envelope.fft_per_cell, "envelope");
  }
  if (j.contains("compare")) {
    const json& e = j.at("compare");
    check_keys(e, "compare", {"honeycomb_epsilons", "square_epsilons"});
    read(e, "honeycomb_epsilons", c.compare.honeycomb_epsilons, "compare");
    read(e, "square_epsilons", c.compare.square_epsilons, "compare");
  }
  validate(c);
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lattice"] = {{"kind", to_string(c.lattice)}, {"L", c.L}};
  j["geometry"] = {{"R", c.R}, {"n_modes", c.n_modes}, {"n_quad", c.n_quad}};
  j["material"] = {{"rho", c.material.rho},
                   {"kappa", c.material.kappa},
                   {"rho_b", c.material.rho_b},
                   {"kappa_b", c.material.kappa_b}};
  j["greens"] = {{"ewald_split", c.solver.ewald.split},
                 {"real_shells", c.solver.ewald.real_shells},
                 {"recip_shells", c.solver.ewald.recip_shells},
                 {"tolerance", c.solver.ewald.tolerance}};
  j["solver"] = {{"omega_tol", c.solver.omega_tol},
                 {"residual_tol", c.solver.residual_tol},
                 {"bracket", c.solver.bracket}};
  j["bands"] = {{"path", c.bands.path}, {"points_per_segment", c.bands.points_per_segment}};
  j["dirac"] = {{"h_rel", c.dirac.h_rel},
                {"directions", c.dirac.directions},
                {"t_min", c.dirac.t_min},
                {"t_max", c.dirac.t_max},
                {"samples", c.dirac.samples}};
  j["field"] = {{"epsilon", c.field.epsilon},     {"band", c.field.band},
                {"cells", c.field.cells},         {"per_cell", c.field.per_cell},
                {"line_cells", c.field.line_cells}, {"line_per_cell", c.field.line_per_cell},
                {"probes", c.field.probes}};
  j["envelope"] = {{"epsilons", c.envelope.epsilons},
                   {"fft_epsilons", c.envelope.fft_epsilons},
                   {"fft_cells", c.envelope.fft_cells},
                   {"fft_per_cell", c.envelope.fft_per_cell}};
  j["compare"] = {{"honeycomb_epsilons", c.compare.honeycomb_epsilons},
                  {"square_epsilons", c.compare.square_epsilons}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.is_object() && j.contains("manifest")) {
    if (!j.contains("config")) throw ConfigError(path + ": manifest without config");
    return config_from_json(j.at("config"));
  }
  return config_from_json(j);
}

void validate(const RunConfig& c) {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.L > 0.0, "lattice.L must be positive");
  require(c.R > 0.0, "geometry.R must be positive");
  require(c.n_modes >= 1, "geometry.n_modes must be at least 1");
  require(c.n_quad >= 4 * c.n_modes + 4 && c.n_quad % 2 == 0, "geometry.n_quad must be even and >= 4 n_modes + 4");
  try {
    c.material.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }
  require(c.solver.ewald.split >= 0.0, "greens.ewald_split must be nonnegative");
  require(c.solver.ewald.real_shells >= 0 && c.solver.ewald.recip_shells >= 0, "greens shell counts must be nonnegative");
  require(c.solver.ewald.tolerance > 0.0 && c.solver.ewald.tolerance < 1e-3, "greens.tolerance must lie in (0, 1e-3)");
  require(c.solver.omega_tol > 0.0 && c.solver.omega_tol < 1e-2, "solver.omega_tol must lie in (0, 1e-2)");
  require(c.solver.residual_tol > 0.0 && c.solver.residual_tol < 1.0, "solver.residual_tol must lie in (0, 1)");
  require(c.solver.bracket > 0.0 && c.solver.bracket < 0.9, "solver.bracket must lie in (0, 0.9)");
  require(c.bands.path.size() >= 2, "bands.path needs at least two waypoints");
  require(c.bands.points_per_segment >= 1, "bands.points_per_segment must be positive");
  require(c.dirac.h_rel >= 1e-5 && c.dirac.h_rel <= 1e-2, "dirac.h_rel must lie in [1e-5, 1e-2]");
  require(c.dirac.directions >= 1, "dirac.directions must be positive");
  require(c.dirac.t_min > 0.0 && c.dirac.t_max > c.dirac.t_min && c.dirac.t_max < 0.5, "dirac fit window invalid");
  require(c.dirac.samples >= 5, "dirac.samples must be at least 5");
  require(std::abs(c.field.epsilon) <= 0.01, "field.epsilon must satisfy |epsilon| <= 0.01");
  if (c.lattice == LatticeKind::Honeycomb)
    require(c.field.band == "upper" || c.field.band == "lower", "field.band must be 'upper' or 'lower'");
  else
    require(c.field.band == "first", "field.band must be 'first' on the square lattice");
  require(c.field.cells >= 1 && c.field.per_cell >= 2, "field grid too small");
  require(c.field.line_cells >= 1 && c.field.line_per_cell >= 1, "field line cut too small");
  require(c.field.probes >= 1, "field.probes must be positive");
  const auto in_window = [](const std::vector<double>& e) {
    for (double x : e)
      if (!(std::abs(x) <= 0.01)) return false;
    return true;
  };
  require(!c.envelope.epsilons.empty() && in_window(c.envelope.epsilons), "envelope.epsilons must lie in [-0.01, 0.01]");
  require(in_window(c.envelope.fft_epsilons), "envelope.fft_epsilons must lie in [-0.01, 0.01]");
  require(c.envelope.fft_cells >= 64 && c.envelope.fft_per_cell >= 8, "FFT needs >= 64 cells and >= 8 samples per cell");
  require(in_window(c.compare.honeycomb_epsilons) && in_window(c.compare.square_epsilons),
          "compare epsilons must lie in [-0.01, 0.01]");
}

Lattice lattice_of(const RunConfig& c) { return make_lattice(c.lattice, c.L); }

DimerGeometry geometry_of(const RunConfig& c) {
  try {
    return make_dimer(lattice_of(c), c.R, c.n_modes, c.n_quad);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
}

}  // namespace bubbly::cli
