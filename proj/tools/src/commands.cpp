#include "bubbly_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "bubbly_cli/output.hpp"

namespace bubbly::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

QuasiMomentum waypoint(const Lattice& lat, const std::string& name) {
  if (name == "Gamma" || name == "G") return gamma_point(lat);
  if (name == "M") return m_point(lat);
  if (lat.kind == LatticeKind::Honeycomb) {
    if (name == "K") return dirac_point(lat);
    if (name == "K'") return second_dirac_point(lat);
  } else if (name == "X") {
    return x_point(lat);
  }
  throw ConfigError("bands.path: unknown waypoint '" + name + "' for the " + to_string(lat.kind) + " lattice");
}

void prepare(const RunOptions& options) {
  if (options.threads < 1) throw ConfigError("--threads must be positive");
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + options.out_dir.string());
}

void write_manifest(const std::string& command, const RunConfig& config, const RunOptions& options,
                    const std::vector<std::string>& outputs) {
  json m;
  m["manifest"] = true;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command;
  m["threads"] = options.threads;
  m["seed"] = options.seed;
  m["config"] = config_to_json(config);
  m["outputs"] = outputs;
  write_json(options.out_dir / "manifest.json", m);
}

json header(const std::string& command, const RunConfig& config) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["lattice"] = to_string(config.lattice);
  j["delta"] = config.material.delta();
  return j;
}

double relative_spread(const std::vector<double>& r) {
  if (r.empty()) return kNaN;
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  double spread = 0.0;
  for (double x : r) spread = std::max(spread, std::abs(x - mean) / mean);
  return spread;
}

json fit_json(const EnvelopeFit& fit) {
  return {{"model", fit.model},
          {"coefficient", fit.coefficient},
          {"intercept", fit.intercept},
          {"r2", fit.r2},
          {"ratio_spread", fit.ratio_spread}};
}

json dirac_json(const DiracData& d) {
  return {{"alpha_star", to_json(d.alpha_star.alpha)},
          {"c1_star", d.c1_star},
          {"c2_ratio", d.c2_star_abs / d.c1_star},
          {"c", to_json(d.c_dirac)},
          {"abs_c", std::abs(d.c_dirac)},
          {"theta_c", std::arg(d.c_dirac)},
          {"lambda0", d.lambda0},
          {"omega_star_asym", d.omega_star},
          {"predicted_slope", d.slope},
          {"grad_c1", to_json(d.grad_c1)},
          {"gradient_pattern", to_json(d.pattern)},
          {"richardson_change", d.richardson_change}};
}

struct GapScan {
  double min_ratio = std::numeric_limits<double>::infinity();
  int roots = 0;
};

// Characteristic values in [lo, hi]: every interior local minimum of the sampled singular-value
// ratio is refined and counted when it reaches the solver's residual threshold.
GapScan gap_scan(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha, double lo,
                 double hi, int n, const SolverOptions& options) {
  BandSolver solver(basis, material, alpha, hi, options);
  std::vector<double> w(n), r(n);
  GapScan out;
  for (int i = 0; i < n; ++i) {
    w[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    const SigmaResult s = solver.svd(w[i]);
    r[i] = s.sigma_min / s.sigma_max;
    out.min_ratio = std::min(out.min_ratio, r[i]);
  }
  for (int i = 1; i + 1 < n; ++i)
    if (r[i] < r[i - 1] && r[i] < r[i + 1] && solver.minimize(w[i - 1], w[i + 1]).found) ++out.roots;
  return out;
}

EnvelopeContext envelope_context(const RunConfig& config) {
  const DimerGeometry geo = geometry_of(config);
  return make_envelope_context(geo.basis, config.material, config.solver);
}

struct LineField {
  std::vector<Vec2> points;
  FieldGrid grid;
};

LineField line_field(const EnvelopeContext& ctx, const DispersionRoot& root, double period, int cells, int per_cell,
                     int threads) {
  const QuasiMomentum alpha{ctx.alpha_star.alpha + root.t * Vec2(1.0, 0.0)};
  const EigenDensities d = kernel_densities(ctx.basis, ctx.material, alpha, root.omega);
  LineField out;
  out.points = line_points(period, cells, per_cell);
  out.grid = eval_field(ctx.basis, d, out.points, threads);
  return out;
}

}  // namespace

void cmd_bands(const RunConfig& config, const RunOptions& options) {
  prepare(options);
  const DimerGeometry geo = geometry_of(config);
  const Lattice& lat = geo.basis.lattice();
  std::vector<QuasiMomentum> waypoints;
  for (const std::string& name : config.bands.path) waypoints.push_back(waypoint(lat, name));
  const PathSamples path = bz_path(waypoints, config.bands.points_per_segment);
  const BandStructure bs = band_sweep(geo.basis, config.material, path, options.threads, config.solver);

  {
    CsvWriter csv(options.out_dir / "bands.csv", {"arclength", "alpha_x", "alpha_y", "omega1", "omega2", "residual1",
                                                  "residual2", "omega1_asym", "omega2_asym"});
    for (std::size_t i = 0; i < bs.points.size(); ++i) {
      const BandPoint& p = bs.points[i];
      const bool skipped = std::isnan(p.omega1_asym);
      const double w1 = skipped || p.found1 ? p.omega1 : kNaN;
      const double w2 = skipped || p.found2 ? p.omega2 : kNaN;
      csv.row({bs.arclength[i], p.alpha.alpha.x(), p.alpha.alpha.y(), w1, w2, p.residual1, p.residual2,
               p.omega1_asym, p.omega2_asym});
    }
  }

  json j = header("bands", config);
  std::size_t solved = 0, skipped = 0;
  double max1 = -1.0, max1_arc = kNaN, min_sep = std::numeric_limits<double>::infinity();
  std::size_t max1_index = 0;
  for (std::size_t i = 0; i < bs.points.size(); ++i) {
    const BandPoint& p = bs.points[i];
    if (std::isnan(p.omega1_asym)) {
      ++skipped;
      continue;
    }
    ++solved;
    if (p.found1 && p.omega1 > max1) {
      max1 = p.omega1;
      max1_arc = bs.arclength[i];
      max1_index = i;
    }
    if (p.found1 && p.found2) min_sep = std::min(min_sep, p.omega2 - p.omega1);
  }
  const double fraction = solved ? static_cast<double>(bs.failures) / static_cast<double>(solved) : 0.0;
  j["n_points"] = bs.points.size();
  j["n_skipped"] = skipped;
  j["failures"] = bs.failures;
  j["failure_fraction"] = fraction;
  json wp = json::array();
  std::string max1_label;
  for (std::size_t w = 0; w < path.waypoint_index.size(); ++w) {
    const std::size_t i = path.waypoint_index[w];
    wp.push_back({{"label", config.bands.path[w]},
                  {"index", i},
                  {"arclength", path.arclength[i]},
                  {"alpha", to_json(path.points[i].alpha)}});
    if (i == max1_index) max1_label = config.bands.path[w];
  }
  j["waypoints"] = wp;
  j["first_band_max"] = {{"omega", max1}, {"arclength", max1_arc}, {"at_waypoint", max1_label}};
  if (lat.kind == LatticeKind::Honeycomb) {
    j["min_band_separation"] = min_sep;
    j["bandgap_above_first_band"] = min_sep > 1e-3 * max1;
    const auto k = std::find(config.bands.path.begin(), config.bands.path.end(), "K");
    if (k != config.bands.path.end()) {
      const BandPoint& at = bs.points[path.waypoint_index[k - config.bands.path.begin()]];
      json dj = dirac_json(dirac_velocity(geo.basis, config.material, config.dirac.h_rel));
      dj["omega_star"] = at.omega1;
      dj["omega_gap_at_K"] = std::abs(at.omega2 - at.omega1);
      dj["degenerate"] = at.degenerate;
      j["dirac"] = dj;
    }
  } else {
    // No second characteristic value between the first-band maximum and four times it.
    const QuasiMomentum top = bs.points[max1_index].alpha;
    const GapScan scan = gap_scan(geo.basis, config.material, top, 1.1 * max1, 4.0 * max1, 64, config.solver);
    j["gap_scan"] = {
        {"lower", 1.1 * max1}, {"upper", 4.0 * max1}, {"min_sigma_ratio", scan.min_ratio}, {"roots", scan.roots}};
    j["bandgap_above_first_band"] = scan.roots == 0;
  }
  write_json(options.out_dir / "bands.json", j);
  write_manifest("bands", config, options, {"bands.csv", "bands.json"});
  if (fraction > 0.05) throw NumericError("band solver failed at more than 5% of the path points");
}

void cmd_dirac(const RunConfig& config, const RunOptions& options) {
  if (config.lattice != LatticeKind::Honeycomb) throw ConfigError("dirac requires the honeycomb lattice");
  prepare(options);
  const DimerGeometry geo = geometry_of(config);
  const DiracData d = dirac_velocity(geo.basis, config.material, config.dirac.h_rel);
  const ConeScan scan = cone_scan(geo.basis, config.material, config.dirac.directions, config.dirac.t_min,
                                  config.dirac.t_max, config.dirac.samples, options.threads, config.solver);
  const double scale = scan.alpha_star.alpha.norm();
  {
    CsvWriter csv(options.out_dir / "dirac_cone.csv",
                  {"direction", "theta", "t", "t_rel", "alpha_x", "alpha_y", "omega1", "omega2"});
    for (std::size_t k = 0; k < scan.directions.size(); ++k) {
      const ConeDirection& cd = scan.directions[k];
      for (std::size_t i = 0; i < cd.t.size(); ++i) {
        const Vec2 a = scan.alpha_star.alpha + cd.t[i] * Vec2(std::cos(cd.theta), std::sin(cd.theta));
        csv.row({static_cast<double>(k), cd.theta, cd.t[i], cd.t[i] / scale, a.x(), a.y(), cd.lower[i], cd.upper[i]});
      }
    }
  }
  json j = header("dirac", config);
  j.update(dirac_json(d));
  j["omega_star"] = scan.at_star.omega1;
  j["omega_gap_at_K"] = std::abs(scan.at_star.omega2 - scan.at_star.omega1);
  j["degenerate"] = scan.at_star.degenerate;
  j["slope_mean"] = scan.slope_mean;
  j["slope_error"] = std::abs(scan.slope_mean - d.slope) / d.slope;
  j["isotropy_spread"] = scan.isotropy_spread;
  j["pm_mismatch"] = scan.pm_mismatch;
  j["r2_min"] = scan.r2_min;
  j["fit_window"] = {config.dirac.t_min, config.dirac.t_max};
  json dirs = json::array();
  for (const ConeDirection& cd : scan.directions)
    dirs.push_back({{"theta", cd.theta},
                    {"slope_plus", cd.fit.slope_plus},
                    {"slope_minus", cd.fit.slope_minus},
                    {"r2_plus", cd.fit.r2_plus},
                    {"r2_minus", cd.fit.r2_minus},
                    {"omega_star_fit", cd.fit.omega_star_fit}});
  j["directions"] = dirs;
  write_json(options.out_dir / "dirac.json", j);
  write_manifest("dirac", config, options, {"dirac_cone.csv", "dirac.json"});
}

void cmd_field(RunConfig config, const RunOptions& options, const FieldOverrides& overrides) {
  if (overrides.epsilon) config.field.epsilon = *overrides.epsilon;
  if (overrides.band) config.field.band = *overrides.band;
  validate(config);
  const bool honeycomb = config.lattice == LatticeKind::Honeycomb;
  const double eps = config.field.epsilon;
  if (honeycomb && ((config.field.band == "upper" && eps < 0.0) || (config.field.band == "lower" && eps > 0.0)))
    throw ConfigError("field: the upper band needs epsilon >= 0 and the lower band epsilon <= 0");
  prepare(options);
  const EnvelopeContext ctx = envelope_context(config);
  const Lattice& lat = ctx.basis.lattice();
  const DispersionRoot root = envelope_frequency_dispersion(ctx, eps, Vec2(1.0, 0.0));
  if (!root.found) throw NumericError("no eigenmode at this frequency shift (band gap)");
  const QuasiMomentum alpha{ctx.alpha_star.alpha + root.t * Vec2(1.0, 0.0)};
  const EigenDensities d = kernel_densities(ctx.basis, ctx.material, alpha, root.omega);

  const double period = x_axis_period(lat);
  const int n = config.field.cells * config.field.per_cell;
  const Vec2 upper(config.field.cells * period, config.field.cells * config.L);
  const FieldGrid grid = eval_field(ctx.basis, d, rectangle_points(Vec2::Zero(), upper, n, n), options.threads);
  const std::vector<Vec2> line = line_points(period, config.field.line_cells, config.field.line_per_cell);
  const FieldGrid cut = eval_field(ctx.basis, d, line, options.threads);

  double scale = 0.0;
  int nudged = 0;
  for (const FieldSample& s : grid.samples) {
    scale = std::max(scale, std::abs(s.value));
    nudged += s.nudged;
  }
  if (!(scale > 0.0)) throw NumericError("field vanishes on the grid");
  {
    CsvWriter csv(options.out_dir / "field.csv", {"x", "y", "re_u", "im_u", "inside"});
    for (const FieldSample& s : grid.samples)
      csv.row({s.point.x(), s.point.y(), s.value.real() / scale, s.value.imag() / scale, s.inside ? 1.0 : 0.0});
  }
  {
    CsvWriter csv(options.out_dir / "line.csv", {"x", "re_u", "im_u", "inside"});
    for (const FieldSample& s : cut.samples)
      csv.row({s.point.x(), s.value.real() / scale, s.value.imag() / scale, s.inside ? 1.0 : 0.0});
  }

  // Quasi-periodicity probes u(x + l1) = e^{i alpha.l1} u(x) at seeded random points.
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> probes;
  for (int i = 0; i < config.field.probes; ++i) probes.push_back(lat.point(unit(rng), unit(rng)));
  std::vector<Vec2> shifted;
  for (const Vec2& x : probes) shifted.push_back(x + lat.l1);
  const FieldGrid a = eval_field(ctx.basis, d, probes, options.threads);
  const FieldGrid b = eval_field(ctx.basis, d, shifted, options.threads);
  const cplx phase = std::exp(kI * alpha.alpha.dot(lat.l1));
  double qp = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    qp = std::max(qp, std::abs(b.samples[i].value - phase * a.samples[i].value) / scale);

  json j = header("field", config);
  j["epsilon"] = eps;
  j["band"] = config.field.band;
  j["omega"] = root.omega;
  j["alpha"] = to_json(alpha.alpha);
  j["alpha_tilde"] = root.t;
  j["f"] = root.f;
  j["sigma_ratio"] = d.sigma_ratio;
  j["normalization"] = scale;
  j["grid"] = {{"nx", n}, {"ny", n}, {"lower", to_json(Vec2::Zero())}, {"upper", to_json(upper)}};
  j["line"] = {{"period", period}, {"cells", config.field.line_cells}, {"per_cell", config.field.line_per_cell}};
  j["nudged"] = nudged;
  j["quasi_periodicity_error"] = qp;
  if (honeycomb) {
    const PsiDensities psi = solve_psi(ctx.basis, ctx.alpha_star);
    // Far from the Dirac point the density leaves span{psi_1, psi_2}; the report then omits A, B.
    try {
      const CoeffPair cp = project_coeffs(d, psi.psi[0], psi.psi[1]);
      j["coefficients"] = {{"A", to_json(cp.A)}, {"B", to_json(cp.B)}, {"residual", cp.residual}};
    } catch (const std::runtime_error&) {
      j["coefficients"] = nullptr;
    }
  }
  write_json(options.out_dir / "field.json", j);
  write_manifest("field", config, options, {"field.csv", "line.csv", "field.json"});
}

void cmd_envelope(RunConfig config, const RunOptions& options, std::optional<LatticeKind> kind) {
  if (kind && *kind != config.lattice) {
    const RunConfig d = default_config(*kind);
    config.lattice = *kind;
    config.bands.path = d.bands.path;
    config.field.band = d.field.band;
    config.envelope.epsilons = d.envelope.epsilons;
  }
  validate(config);
  for (double e : config.envelope.fft_epsilons)
    if (std::find(config.envelope.epsilons.begin(), config.envelope.epsilons.end(), e) ==
        config.envelope.epsilons.end())
      throw ConfigError("envelope.fft_epsilons must be a subset of envelope.epsilons");
  prepare(options);
  const EnvelopeContext ctx = envelope_context(config);
  const Lattice& lat = ctx.basis.lattice();
  const EnvelopeCurve curve = f_curve(ctx, config.envelope.epsilons, options.threads);
  const double period = x_axis_period(lat);

  std::vector<double> f_fft(curve.epsilons.size(), kNaN);
  json fft = json::array();
  for (std::size_t i = 0; i < curve.epsilons.size(); ++i) {
    const double e = curve.epsilons[i];
    if (std::find(config.envelope.fft_epsilons.begin(), config.envelope.fft_epsilons.end(), e) ==
        config.envelope.fft_epsilons.end())
      continue;
    json entry = {{"epsilon", e}, {"f_dispersion", curve.found[i] ? curve.f[i] : kNaN}};
    if (curve.found[i]) {
      const DispersionRoot root = envelope_frequency_dispersion(ctx, e, Vec2(1.0, 0.0));
      const LineField lf =
          line_field(ctx, root, period, config.envelope.fft_cells, config.envelope.fft_per_cell, options.threads);
      std::vector<cplx> values;
      for (const FieldSample& s : lf.grid.samples) values.push_back(s.value);
      const FftEnvelope r =
          envelope_frequency_fft(values, lf.points, ctx.alpha_star.alpha, period, config.envelope.fft_cells);
      if (r.found) f_fft[i] = r.f;
      entry["f_fft"] = r.found ? r.f : kNaN;
      entry["bin_width"] = r.bin_width;
      entry["bins_apart"] = r.found ? std::abs(r.f - curve.f[i]) / r.bin_width : kNaN;
      entry["found"] = r.found;
    } else {
      entry["f_fft"] = kNaN;
      entry["found"] = false;
    }
    fft.push_back(entry);
  }
  {
    CsvWriter csv(options.out_dir / "envelope.csv", {"epsilon", "f_dispersion", "f_fft"});
    for (std::size_t i = 0; i < curve.epsilons.size(); ++i)
      csv.row({curve.epsilons[i], curve.found[i] ? curve.f[i] : kNaN, f_fft[i]});
  }
  json j = header("envelope", config);
  j["omega_star"] = ctx.omega_star;
  j["fit"] = fit_json(curve.fit);
  if (ctx.dirac) {
    const double predicted = 1.0 / (kTwoPi * std::abs(ctx.dirac->c_dirac) * ctx.dirac->lambda0 *
                                    std::sqrt(config.material.delta()));
    j["predicted_coefficient"] = predicted;
    j["coefficient_error"] = std::abs(curve.fit.coefficient - predicted) / predicted;
    double fmax = 0.0;
    for (std::size_t i = 0; i < curve.f.size(); ++i)
      if (curve.found[i]) fmax = std::max(fmax, curve.f[i]);
    j["intercept_ratio"] = fmax > 0.0 ? std::abs(curve.fit.intercept) / fmax : kNaN;
  } else {
    j["curvature"] = ctx.curvature;
  }
  json missing = json::array();
  for (std::size_t i = 0; i < curve.epsilons.size(); ++i)
    if (!curve.found[i]) missing.push_back(curve.epsilons[i]);
  j["not_found"] = missing;
  j["fft"] = fft;
  write_json(options.out_dir / "envelope.json", j);
  write_manifest("envelope", config, options, {"envelope.csv", "envelope.json"});
}

void cmd_compare(const RunConfig& config, const RunOptions& options) {
  prepare(options);
  RunConfig hc = config, sq = config;
  hc.lattice = LatticeKind::Honeycomb;
  sq.lattice = LatticeKind::Square;
  const EnvelopeCurve h = f_curve(envelope_context(hc), config.compare.honeycomb_epsilons, options.threads);
  const EnvelopeCurve s = f_curve(envelope_context(sq), config.compare.square_epsilons, options.threads);

  const auto laws = [](const EnvelopeCurve& c) {
    std::vector<double> lin, root;
    for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
      const double e = c.epsilons[i];
      if (!c.found[i] || e <= 0.0) continue;
      lin.push_back(c.f[i] / e);
      root.push_back(c.f[i] / std::sqrt(e));
    }
    return json{{"linear_spread", relative_spread(lin)}, {"sqrt_spread", relative_spread(root)}};
  };
  json hj = {{"fit", fit_json(h.fit)}, {"laws", laws(h)}};
  json sj = {{"fit", fit_json(s.fit)}, {"laws", laws(s)}};
  const double tol = 0.05;
  // A null spread (fewer than two positive epsilons) satisfies neither side.
  const auto within = [tol](const json& v) { return v.is_number() && v.get<double>() <= tol; };
  const auto beyond = [tol](const json& v) { return v.is_number() && v.get<double>() > tol; };
  const bool exclusive = within(hj["laws"]["linear_spread"]) && beyond(hj["laws"]["sqrt_spread"]) &&
                         within(sj["laws"]["sqrt_spread"]) && beyond(sj["laws"]["linear_spread"]);

  std::map<double, std::pair<double, double>> rows;
  for (std::size_t i = 0; i < h.epsilons.size(); ++i) rows[h.epsilons[i]] = {h.found[i] ? h.f[i] : kNaN, kNaN};
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
    auto it = rows.find(s.epsilons[i]);
    const double f = s.found[i] ? s.f[i] : kNaN;
    if (it == rows.end())
      rows[s.epsilons[i]] = {kNaN, f};
    else
      it->second.second = f;
  }
  {
    CsvWriter csv(options.out_dir / "compare.csv", {"epsilon", "f_honeycomb", "f_square"});
    for (const auto& [e, f] : rows) csv.row({e, f.first, f.second});
  }
  json j = header("compare", config);
  j["honeycomb"] = hj;
  j["square"] = sj;
  j["tolerance"] = tol;
  j["mutually_exclusive"] = exclusive;
  write_json(options.out_dir / "compare.json", j);
  write_manifest("compare", config, options, {"compare.csv", "compare.json"});
}

int run_command(const std::string& name, const std::string& config_path, const RunOptions& options,
                const FieldOverrides& field, const std::optional<std::string>& lattice) {
  try {
    const RunConfig config = load_config(config_path);
    if (name == "bands") {
      cmd_bands(config, options);
    } else if (name == "dirac") {
      cmd_dirac(config, options);
    } else if (name == "field") {
      cmd_field(config, options, field);
    } else if (name == "envelope") {
      std::optional<LatticeKind> kind;
      if (lattice) {
        try {
          kind = lattice_kind_from_string(*lattice);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      cmd_envelope(config, options, kind);
    } else if (name == "compare") {
      cmd_compare(config, options);
    } else {
      throw ConfigError("unknown command " + name);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace bubbly::cli
