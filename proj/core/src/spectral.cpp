#include "bubbly/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "bubbly/parallel.hpp"

namespace bubbly {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double default_omega_max(const Material& material) { return 0.5 * std::min(material.v(), material.v_b()); }

}  // namespace

PsiDensities solve_psi(const KernelTable& static_table) {
  const BoundaryBasis& basis = static_table.basis();
  const CMatrix s = static_table.single_layer(0.0);
  const Eigen::PartialPivLU<CMatrix> lu(s);
  PsiDensities out;
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e-12)) throw std::runtime_error("static single-layer matrix is near-singular");
  for (int j = 1; j <= basis.n_bubbles(); ++j) {
    const CVector rhs = indicator_rhs(basis, j);
    CVector psi = lu.solve(rhs);
    out.residual = std::max(out.residual, (s * psi - rhs).norm() / rhs.norm());
    out.psi.push_back(std::move(psi));
  }
  return out;
}

PsiDensities solve_psi(const BoundaryBasis& basis, const QuasiMomentum& alpha) {
  return solve_psi(KernelTable(basis, alpha.alpha, 0.0));
}

CapacitanceMatrix capacitance_from(const BoundaryBasis& basis, const PsiDensities& psi) {
  const int nb = basis.n_bubbles();
  CapacitanceMatrix c;
  c.values.resize(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) c.values(i, j) = -basis.integrate(psi.psi[i], j);
  return c;
}

CapacitanceMatrix capacitance(const BoundaryBasis& basis, const QuasiMomentum& alpha) {
  return capacitance_from(basis, solve_psi(basis, alpha));
}

std::vector<double> CapacitanceMatrix::eigenvalues() const {
  const CMatrix h = 0.5 * (values + values.adjoint());
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

std::vector<double> asymptotic_bands(const CapacitanceMatrix& c, const Material& material, double bubble_area) {
  std::vector<double> out;
  for (double lambda : c.eigenvalues()) {
    if (lambda < 0.0) throw std::runtime_error("negative capacitance eigenvalue");
    out.push_back(std::sqrt(material.delta() * lambda / bubble_area) * material.v_b());
  }
  return out;
}

DiracData dirac_velocity(const BoundaryBasis& basis, const Material& material, double h_rel) {
  const Lattice& lat = basis.lattice();
  DiracData d;
  d.alpha_star = dirac_point(lat);
  const Vec2 a0 = d.alpha_star.alpha;
  const double scale = a0.norm();
  if (h_rel < 1e-5 || h_rel > 1e-2) throw std::invalid_argument("finite-difference step outside [1e-5, 1e-2]|alpha*|");
  const auto cap = [&](const Vec2& a) { return capacitance(basis, {a}); };
  const CapacitanceMatrix c0 = cap(a0);
  d.c1_star = c0.c1();
  d.c2_star_abs = std::abs(c0.c2());

  struct Grad {
    Vec2 c1;
    CVec2 c2;
  };
  const auto gradient = [&](double h) {
    Grad g;
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 e = Vec2::Zero();
      e[axis] = h;
      const CapacitanceMatrix p = cap(a0 + e);
      const CapacitanceMatrix m = cap(a0 - e);
      g.c1[axis] = (p.c1() - m.c1()) / (2.0 * h);
      g.c2[axis] = (p.c2() - m.c2()) / (2.0 * h);
    }
    return g;
  };
  d.step = h_rel * scale;
  const Grad g1 = gradient(d.step);
  const Grad g2 = gradient(0.5 * d.step);
  // Richardson combination of the two central differences.
  d.grad_c1 = (4.0 * g2.c1 - g1.c1) / 3.0;
  d.grad_c2 = (4.0 * g2.c2 - g1.c2) / 3.0;
  d.c_dirac = std::conj(d.grad_c2[0]);
  d.richardson_change = std::abs(g2.c2[0] - g1.c2[0]) / std::abs(d.grad_c2[0]);
  d.pattern = d.grad_c2[1] / d.grad_c2[0];
  const double area = basis.dimer().bubble_area();
  d.omega_star = std::sqrt(material.delta() * d.c1_star / area) * material.v_b();
  d.lambda0 = 0.5 * std::sqrt(material.v_b() * material.v_b() / (area * d.c1_star));
  d.slope = std::sqrt(material.delta()) * d.lambda0 * std::abs(d.c_dirac);
  return d;
}

BandSolver::BandSolver(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                       double omega_max, const SolverOptions& options)
    : table_(basis, alpha.alpha, std::max(omega_max, 0.0) / std::min(material.v(), material.v_b()),
             options.ewald),
      material_(material),
      options_(options) {
  material.validate();
}

double BandSolver::sigma(double omega) {
  ++evaluations_;
  CMatrix m = assemble_A(table_, material_, omega).matrix;
  equilibrate_rows(m);
  return sigma_min_estimate(m, &warm_);
}

SigmaResult BandSolver::svd(double omega) const { return sigma_min(assemble_A(table_, material_, omega)); }

CharacteristicResult BandSolver::minimize(double lo, double hi) {
  CharacteristicResult out;
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("invalid search bracket");
  const int start = evaluations_;
  const auto f = [&](double w) {
    const double s = sigma(w);
    return s * s;
  };
  const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(options_.omega_tol))), 8, 52);
  std::uintmax_t max_iter = 200;
  const auto [w, fw] = boost::math::tools::brent_find_minima(f, lo, hi, bits, max_iter);
  out.omega = w;
  out.evaluations = evaluations_ - start;
  const double edge = 1e-3 * (hi - lo);
  const bool interior = (w - lo) > edge && (hi - w) > edge;
  const SigmaResult s = svd(w);
  out.residual = s.sigma_min / s.sigma_max;
  out.found = interior && out.residual <= options_.residual_tol && fw >= 0.0;
  return out;
}

CharacteristicResult find_characteristic(const BoundaryBasis& basis, const Material& material,
                                         const QuasiMomentum& alpha, double omega_guess,
                                         const SolverOptions& options) {
  if (!(omega_guess > 0.0)) throw std::invalid_argument("frequency guess must be positive");
  BandSolver solver(basis, material, alpha, omega_guess * (1.0 + options.bracket), options);
  return solver.minimize(omega_guess * (1.0 - options.bracket), omega_guess * (1.0 + options.bracket));
}

namespace {

void assign(BandPoint& p, int band, const CharacteristicResult& r) {
  if (band == 1) {
    p.omega1 = r.omega;
    p.residual1 = r.residual;
    p.found1 = r.found;
  } else {
    p.omega2 = r.omega;
    p.residual2 = r.residual;
    p.found2 = r.found;
  }
}

CharacteristicResult search(BandSolver& solver, double lo, double hi) {
  CharacteristicResult r = solver.minimize(lo, hi);
  if (!r.found) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const CharacteristicResult wide = solver.minimize(std::max(mid - 2.0 * half, 0.05 * mid), mid + 2.0 * half);
    if (wide.found) return wide;
  }
  return r;
}

}  // namespace

BandPoint solve_bands(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                      const SolverOptions& options) {
  BandPoint p;
  p.alpha = alpha;
  const double b = options.bracket;
  double omega_max = default_omega_max(material);
  std::optional<BandSolver> solver;
  solver.emplace(basis, material, alpha, omega_max, options);
  const CapacitanceMatrix cap = capacitance_from(basis, solve_psi(solver->table()));
  const std::vector<double> g = asymptotic_bands(cap, material, basis.dimer().bubble_area());
  const double needed = 2.0 * (1.0 + b) * g.back();
  if (needed > omega_max) {
    omega_max = needed;
    solver.emplace(basis, material, alpha, omega_max, options);
  }
  p.omega1_asym = g[0];
  p.omega2_asym = g.size() > 1 ? g[1] : kNaN;

  if (g.size() == 1) {
    assign(p, 1, search(*solver, (1.0 - b) * g[0], (1.0 + b) * g[0]));
    p.omega2 = kNaN;
    p.residual2 = kNaN;
    return p;
  }

  const double g1 = g[0];
  const double g2 = g[1];
  const double sep = g2 - g1;
  if (sep > 0.2 * g2) {
    const double mid = 0.5 * (g1 + g2);
    assign(p, 1, search(*solver, (1.0 - b) * g1, std::min((1.0 + b) * g1, mid)));
    assign(p, 2, search(*solver, std::max((1.0 - b) * g2, mid), (1.0 + b) * g2));
  } else {
    const CharacteristicResult first = search(*solver, (1.0 - b) * g1, (1.0 + b) * g2);
    if (!first.found) {
      assign(p, 1, first);
      assign(p, 2, first);
      p.found2 = false;
      return p;
    }
    const SigmaResult at = solver->svd(first.omega);
    // Double root only when the asymptotic guesses coincide and a second null direction exists.
    if (sep <= 1e-6 * g2 && at.sigma_second / at.sigma_max <= options.residual_tol) {
      p.degenerate = true;
      assign(p, 1, first);
      assign(p, 2, first);
      p.residual2 = at.sigma_second / at.sigma_max;
    } else {
      // The partner root lies about sep away on one side; search both sides past the
      // separating maximum of sigma.
      const double w0 = first.omega;
      const double d = std::max(sep, 1e-9 * g2);
      CharacteristicResult best;
      for (double widen : {1.0, 4.0}) {
        for (int side : {-1, 1}) {
          const double near = w0 + side * 0.5 * d / widen;
          const double far = w0 + side * 2.0 * d * widen;
          const CharacteristicResult r = solver->minimize(std::min(near, far), std::max(near, far));
          if (r.found && (!best.found || r.residual < best.residual)) best = r;
        }
        if (best.found) break;
      }
      if (!best.found) {
        assign(p, 1, first);
        assign(p, 2, best);
      } else {
        const CharacteristicResult& lower = best.omega < w0 ? best : first;
        const CharacteristicResult& upper = best.omega < w0 ? first : best;
        assign(p, 1, lower);
        assign(p, 2, upper);
      }
    }
  }
  if (p.found1 && p.found2 && p.omega1 > p.omega2) {
    std::swap(p.omega1, p.omega2);
    std::swap(p.residual1, p.residual2);
  }
  return p;
}

BandStructure band_sweep(const BoundaryBasis& basis, const Material& material, const PathSamples& path, int threads,
                         const SolverOptions& options) {
  BandStructure out;
  out.path = path.points;
  out.arclength = path.arclength;
  out.points.resize(path.points.size());
  const Lattice& lat = basis.lattice();
  parallel_for(path.points.size(), threads, [&](std::size_t i) {
    const QuasiMomentum& a = path.points[i];
    if (distance_to_dual_lattice(lat, a.alpha) < 1e-9 * kTwoPi / lat.L) {
      BandPoint skipped;
      skipped.alpha = a;
      skipped.omega1 = skipped.omega2 = kNaN;
      skipped.residual1 = skipped.residual2 = kNaN;
      skipped.omega1_asym = skipped.omega2_asym = kNaN;
      out.points[i] = skipped;
      return;
    }
    out.points[i] = solve_bands(basis, material, a, options);
  });
  const bool two = basis.n_bubbles() == 2;
  for (const BandPoint& p : out.points) {
    if (std::isnan(p.omega1_asym)) continue;
    if (!p.found1 || (two && !p.found2)) ++out.failures;
  }
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs two or more paired samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

DiracFit dirac_fit(const std::vector<double>& t, const std::vector<double>& lower, const std::vector<double>& upper,
                   double omega_star) {
  if (t.size() < 5 || lower.size() != t.size() || upper.size() != t.size())
    throw std::invalid_argument("dirac_fit needs at least five radii");
  std::vector<double> up(t.size()), down(t.size()), qup(t.size()), qdown(t.size()), t2(t.size()), mean(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    up[i] = upper[i] - omega_star;
    down[i] = omega_star - lower[i];
    qup[i] = up[i] / t[i];
    qdown[i] = down[i] / t[i];
    t2[i] = t[i] * t[i];
    mean[i] = 0.5 * (upper[i] + lower[i]);
  }
  DiracFit f;
  f.r2_plus = fit_line(t, up).r2;
  f.r2_minus = fit_line(t, down).r2;
  f.slope_plus = fit_line(t, qup).intercept;
  f.slope_minus = fit_line(t, qdown).intercept;
  f.omega_star_fit = fit_line(t2, mean).intercept;
  f.conical = f.r2_plus >= 0.999 && f.r2_minus >= 0.999;
  return f;
}

ConeScan cone_scan(const BoundaryBasis& basis, const Material& material, int n_directions, double t_min_rel,
                   double t_max_rel, int samples, int threads, const SolverOptions& options) {
  if (basis.n_bubbles() != 2) throw std::invalid_argument("cone scan needs the honeycomb dimer");
  if (n_directions < 1 || samples < 5 || !(t_min_rel > 0.0 && t_max_rel > t_min_rel))
    throw std::invalid_argument("invalid cone scan window");
  ConeScan out;
  out.alpha_star = dirac_point(basis.lattice());
  out.at_star = solve_bands(basis, material, out.alpha_star, options);
  if (!out.at_star.found1) throw std::runtime_error("no characteristic value at the Dirac point");
  const double scale = out.alpha_star.alpha.norm();
  std::vector<double> radii(samples);
  for (int i = 0; i < samples; ++i)
    radii[i] = scale * t_min_rel * std::pow(t_max_rel / t_min_rel, static_cast<double>(i) / (samples - 1));
  std::vector<BandPoint> points(static_cast<std::size_t>(n_directions) * samples);
  parallel_for(points.size(), threads, [&](std::size_t task) {
    const double theta = kTwoPi * static_cast<double>(task / samples) / n_directions;
    const Vec2 dir(std::cos(theta), std::sin(theta));
    points[task] = solve_bands(basis, material, {out.alpha_star.alpha + radii[task % samples] * dir}, options);
  });
  std::vector<double> slopes;
  out.r2_min = 1.0;
  for (int d = 0; d < n_directions; ++d) {
    ConeDirection cd;
    cd.theta = kTwoPi * d / n_directions;
    cd.t = radii;
    for (int i = 0; i < samples; ++i) {
      const BandPoint& p = points[static_cast<std::size_t>(d) * samples + i];
      if (!p.found1 || !p.found2) throw std::runtime_error("band solve failed on the cone scan");
      cd.lower.push_back(p.omega1);
      cd.upper.push_back(p.omega2);
    }
    cd.fit = dirac_fit(cd.t, cd.lower, cd.upper, out.at_star.omega1);
    slopes.push_back(cd.fit.slope_plus);
    slopes.push_back(cd.fit.slope_minus);
    out.r2_min = std::min({out.r2_min, cd.fit.r2_plus, cd.fit.r2_minus});
    out.directions.push_back(std::move(cd));
  }
  double sum = 0.0;
  for (double s : slopes) sum += s;
  out.slope_mean = sum / static_cast<double>(slopes.size());
  const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
  out.isotropy_spread = (*hi - *lo) / out.slope_mean;
  for (const ConeDirection& cd : out.directions)
    out.pm_mismatch = std::max(out.pm_mismatch, std::abs(cd.fit.slope_plus - cd.fit.slope_minus) / out.slope_mean);
  return out;
}

}  // namespace bubbly
