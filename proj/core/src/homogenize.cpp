#include "bubbly/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>
#include <fftw3.h>

#include "bubbly/parallel.hpp"

namespace bubbly {

Eigen::Matrix2cd DiracSystem::matrix(const Vec2& a) const {
  Eigen::Matrix2cd m;
  m << 0.0, lambda0 * c * cplx(a.x(), -a.y()), lambda0 * std::conj(c) * cplx(a.x(), a.y()), 0.0;
  return m;
}

DiracEigenpairs dirac_eigenpairs(const DiracSystem& system, const Vec2& a) {
  DiracEigenpairs out;
  const double mag = system.lambda0 * std::abs(system.c) * a.norm();
  out.values = {-mag, mag};
  if (a.norm() == 0.0 || std::abs(system.c) == 0.0) {
    out.degenerate = true;
    out.vectors[0] = Eigen::Vector2cd(1.0, 0.0);
    out.vectors[1] = Eigen::Vector2cd(0.0, 1.0);
    return out;
  }
  // Upper branch: A/B = c (a1 - i a2) / (|c| |a|); lower branch flips the sign of A.
  const cplx ratio = system.c * cplx(a.x(), -a.y()) / (std::abs(system.c) * a.norm());
  const double s = 1.0 / std::sqrt(2.0);
  out.vectors[0] = Eigen::Vector2cd(-ratio * s, s);
  out.vectors[1] = Eigen::Vector2cd(ratio * s, s);
  return out;
}

double effective_wavenumber(double beta, const DiracSystem& system) {
  return std::abs(beta) / (std::abs(system.c) * system.lambda0);
}

double x_axis_period(const Lattice& lattice) {
  return lattice.kind == LatticeKind::Honeycomb ? std::sqrt(3.0) * lattice.L : lattice.L;
}

double band_value(const EnvelopeContext& ctx, double t, const Vec2& direction, bool upper) {
  if (t == 0.0) return ctx.omega_star;
  const QuasiMomentum a{ctx.alpha_star.alpha + t * direction.normalized()};
  const BandPoint p = solve_bands(ctx.basis, ctx.material, a, ctx.options);
  const bool two = ctx.basis.n_bubbles() == 2;
  if (two && upper) {
    if (!p.found2) throw std::runtime_error("upper band not resolved");
    return p.omega2;
  }
  if (!p.found1) throw std::runtime_error("lower band not resolved");
  return p.omega1;
}

EnvelopeContext make_envelope_context(const BoundaryBasis& basis, const Material& material,
                                      const SolverOptions& options) {
  EnvelopeContext ctx{basis, material, dirac_point(basis.lattice()), 0.0, std::nullopt, 0.0, options};
  const BandPoint at = solve_bands(basis, material, ctx.alpha_star, options);
  if (!at.found1) throw std::runtime_error("characteristic value at the critical point not found");
  ctx.omega_star = at.omega1;
  if (basis.lattice().kind == LatticeKind::Honeycomb) {
    ctx.dirac = dirac_velocity(basis, material);
  } else {
    const double t1 = 0.05 * ctx.alpha_star.alpha.norm();
    const double w1 = band_value(ctx, t1, Vec2(1.0, 0.0), false);
    ctx.curvature = (ctx.omega_star - w1) / (t1 * t1);
    if (!(ctx.curvature > 0.0)) throw std::runtime_error("first band is not maximal at the critical point");
  }
  return ctx;
}

DispersionRoot envelope_frequency_dispersion(const EnvelopeContext& ctx, double epsilon, const Vec2& direction) {
  DispersionRoot out;
  if (std::abs(epsilon) > 0.01 + 1e-15) throw std::invalid_argument("frequency shift outside |eps| <= 0.01");
  if (epsilon == 0.0) {
    out.found = true;
    out.omega = ctx.omega_star;
    return out;
  }
  const bool honeycomb = ctx.basis.n_bubbles() == 2;
  if (!honeycomb && epsilon < 0.0) return out;
  const bool upper = honeycomb && epsilon > 0.0;
  const double target = honeycomb ? ctx.omega_star + epsilon : ctx.omega_star - epsilon;
  double t0 = 0.0;
  if (honeycomb) {
    if (!ctx.dirac) throw std::logic_error("honeycomb context without Dirac data");
    t0 = std::abs(epsilon) / ctx.dirac->slope;
  } else {
    t0 = std::sqrt(epsilon / ctx.curvature);
  }
  // h increases with t and h(0) = -|eps|.
  const auto h = [&](double t) {
    const double w = band_value(ctx, t, direction, upper);
    return (honeycomb && upper) ? w - target : target - w;
  };
  double lo = 0.5 * t0;
  double hlo = h(lo);
  while (hlo > 0.0 && lo > 1e-6 * t0) {
    lo *= 0.5;
    hlo = h(lo);
  }
  double hi = 2.0 * t0;
  double hhi = h(hi);
  for (int i = 0; i < 6 && hhi < 0.0; ++i) {
    hi *= 1.5;
    hhi = h(hi);
  }
  if (hlo > 0.0 || hhi < 0.0) return out;
  std::uintmax_t iters = 40;
  const auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi,
                                                         boost::math::tools::eps_tolerance<double>(36), iters);
  out.t = 0.5 * (a + b);
  out.f = out.t / kTwoPi;
  out.omega = target;
  out.found = true;
  return out;
}

FftEnvelope envelope_frequency_fft(const std::vector<cplx>& values, const std::vector<Vec2>& points,
                                   const Vec2& alpha_star, double period, int n_cells) {
  if (n_cells < 64) throw std::invalid_argument("FFT envelope needs at least 64 cells");
  if (values.size() != points.size() || values.size() % n_cells != 0)
    throw std::invalid_argument("samples do not tile the cells");
  const std::size_t per_cell = values.size() / n_cells;
  if (per_cell < 8) throw std::invalid_argument("FFT envelope needs at least 8 samples per cell");
  std::vector<cplx> in(n_cells), out(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    cplx acc = 0.0;
    for (std::size_t s = 0; s < per_cell; ++s) {
      const std::size_t i = c * per_cell + s;
      acc += values[i] * std::exp(-kI * alpha_star.dot(points[i]));
    }
    in[c] = acc / static_cast<double>(per_cell);
  }
  {
    // The FFTW planner is not thread safe.
    static std::mutex planner;
    std::lock_guard<std::mutex> lock(planner);
    fftw_plan plan = fftw_plan_dft_1d(n_cells, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  std::vector<double> mag(n_cells);
  for (int i = 0; i < n_cells; ++i) mag[i] = std::abs(out[i]);
  const int peak = static_cast<int>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + n_cells / 2, sorted.end());
  const double median = sorted[n_cells / 2];
  FftEnvelope r;
  r.bin_width = 1.0 / (n_cells * period);
  const int signed_bin = peak <= n_cells / 2 ? peak : peak - n_cells;
  r.f = std::abs(signed_bin) * r.bin_width;
  r.found = mag[peak] > 3.0 * median;
  return r;
}

EnvelopeCurve f_curve(const EnvelopeContext& ctx, const std::vector<double>& epsilons, int threads) {
  EnvelopeCurve curve;
  curve.epsilons = epsilons;
  curve.f.assign(epsilons.size(), 0.0);
  curve.found.assign(epsilons.size(), false);
  std::vector<DispersionRoot> roots(epsilons.size());
  parallel_for(epsilons.size(), threads,
               [&](std::size_t i) { roots[i] = envelope_frequency_dispersion(ctx, epsilons[i], Vec2(1.0, 0.0)); });
  for (std::size_t i = 0; i < roots.size(); ++i) {
    curve.f[i] = roots[i].f;
    curve.found[i] = roots[i].found;
  }
  const bool honeycomb = ctx.basis.n_bubbles() == 2;
  std::vector<double> x, y, ratio;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!curve.found[i]) continue;
    const double e = epsilons[i];
    if (honeycomb) {
      x.push_back(e);
      y.push_back(e < 0.0 ? -curve.f[i] : curve.f[i]);
      if (e != 0.0) ratio.push_back(curve.f[i] / std::abs(e));
    } else if (e > 0.0) {
      x.push_back(e);
      y.push_back(curve.f[i]);
      ratio.push_back(curve.f[i] / std::sqrt(e));
    }
  }
  EnvelopeFit fit;
  if (honeycomb) {
    fit.model = "linear";
    if (x.size() >= 2) {
      const LinearFit lf = fit_line(x, y);
      fit.coefficient = lf.slope;
      fit.intercept = lf.intercept;
      fit.r2 = lf.r2;
    }
  } else {
    fit.model = "sqrt";
    double num = 0.0, den = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += y[i] * std::sqrt(x[i]);
      den += x[i];
      mean += y[i];
    }
    if (!x.empty()) {
      fit.coefficient = num / den;
      mean /= static_cast<double>(x.size());
      double ss_res = 0.0, ss_tot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.coefficient * std::sqrt(x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
      }
      fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
  }
  if (!ratio.empty()) {
    double mean = 0.0;
    for (double r : ratio) mean += r;
    mean /= static_cast<double>(ratio.size());
    for (double r : ratio) fit.ratio_spread = std::max(fit.ratio_spread, std::abs(r - mean) / mean);
  }
  curve.fit = fit;
  return curve;
}

}  // namespace bubbly
