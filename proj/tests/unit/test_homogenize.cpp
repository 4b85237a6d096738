#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace bubbly;
using namespace bubbly::testing;

namespace {

const EnvelopeContext& honeycomb_ctx() {
  static const EnvelopeContext ctx = make_envelope_context(honeycomb_basis(), Material{});
  return ctx;
}

const EnvelopeContext& square_ctx() {
  static const EnvelopeContext ctx = make_envelope_context(square_basis(), Material{});
  return ctx;
}

const std::vector<double>& honeycomb_eps() {
  static const std::vector<double> e = {-1e-2, -8e-3, -5e-3, -2e-3, -1e-3, 0.0, 1e-3, 2e-3, 5e-3, 8e-3, 1e-2};
  return e;
}

const EnvelopeCurve& honeycomb_curve() {
  static const EnvelopeCurve c = f_curve(honeycomb_ctx(), honeycomb_eps());
  return c;
}

const EnvelopeCurve& square_curve() {
  static const EnvelopeCurve c = f_curve(square_ctx(), {-4e-3, 1e-3, 2e-3, 4e-3, 6e-3, 8e-3, 1e-2});
  return c;
}

DiracSystem system_of(const DiracData& d) { return {d.lambda0, d.c_dirac}; }

double predicted_coefficient() {
  const DiracData& d = *honeycomb_ctx().dirac;
  return 1.0 / (kTwoPi * std::abs(d.c_dirac) * d.lambda0 * std::sqrt(1e-3));
}

double f_at(const EnvelopeCurve& c, double eps) {
  for (std::size_t i = 0; i < c.epsilons.size(); ++i)
    if (c.epsilons[i] == eps) return c.f[i];
  ADD_FAILURE() << "epsilon not on the grid: " << eps;
  return 0.0;
}

// Spread of f / g(eps) about its mean over eps in [1e-3, 1e-2].
template <class G>
double law_spread(const EnvelopeCurve& c, G g) {
  std::vector<double> r;
  for (std::size_t i = 0; i < c.epsilons.size(); ++i)
    if (c.found[i] && c.epsilons[i] >= 1e-3) r.push_back(c.f[i] / g(c.epsilons[i]));
  double mean = 0.0;
  for (double v : r) mean += v / r.size();
  double spread = 0.0;
  for (double v : r) spread = std::max(spread, std::abs(v - mean) / mean);
  return spread;
}

}  // namespace

TEST(Homogenize, DiracMatrixIsHermitianWithClosedFormSpectrum) {
  const DiracSystem sys{0.5, cplx(0.3, -1.2)};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const Vec2 a(g(rng), g(rng));
    const Eigen::Matrix2cd m = sys.matrix(a);
    EXPECT_LE((m - m.adjoint()).norm(), 1e-15);
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(m).eigenvalues();
    const DiracEigenpairs p = dirac_eigenpairs(sys, a);
    const double m0 = sys.lambda0 * std::abs(sys.c) * a.norm();
    EXPECT_NEAR(p.values[0], -m0, 1e-14);
    EXPECT_NEAR(p.values[1], m0, 1e-14);
    EXPECT_NEAR(ev[0], p.values[0], 1e-12);
    EXPECT_NEAR(ev[1], p.values[1], 1e-12);
    for (int j = 0; j < 2; ++j) {
      EXPECT_LE((m * p.vectors[j] - p.values[j] * p.vectors[j]).norm(), 1e-12);
      EXPECT_NEAR(p.vectors[j].norm(), 1.0, 1e-14);
      EXPECT_EQ(p.vectors[j][1].imag(), 0.0);
      EXPECT_GT(p.vectors[j][1].real(), 0.0);
    }
    EXPECT_FALSE(p.degenerate);
  }
}

TEST(Homogenize, EigenvectorsAlongTheFirstAxis) {
  const DiracSystem sys{0.5, 1.7 * std::exp(kI * 0.4)};
  const DiracEigenpairs p = dirac_eigenpairs(sys, Vec2(1.0, 0.0));
  EXPECT_NEAR(p.values[1], 0.5 * 1.7, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LE(std::abs(p.vectors[1][0] - r * std::exp(kI * 0.4)), 1e-14);
  EXPECT_LE(std::abs(p.vectors[0][0] + r * std::exp(kI * 0.4)), 1e-14);
  EXPECT_NEAR(p.vectors[1][1].real(), r, 1e-14);
}

// With the off-diagonal entry c (a1 - i a2), a rotation by phi multiplies the first component by e^{-i phi}.
TEST(Homogenize, RotationCovariance) {
  const DiracSystem sys{0.7, cplx(-0.2, 1.1)};
  const Vec2 a(0.3, -0.8);
  for (double phi : {0.3, 1.9, -2.5}) {
    const Eigen::Rotation2Dd rot(phi);
    const DiracEigenpairs p = dirac_eigenpairs(sys, a);
    const DiracEigenpairs q = dirac_eigenpairs(sys, rot * a);
    for (int j = 0; j < 2; ++j) {
      EXPECT_LE(std::abs(q.vectors[j][0] - std::exp(-kI * phi) * p.vectors[j][0]), 1e-14);
      EXPECT_NEAR(q.vectors[j][1].real(), p.vectors[j][1].real(), 1e-14);
    }
  }
}

TEST(Homogenize, BranchesSwapUnderReflection) {
  const DiracSystem sys{0.7, cplx(0.5, 1.1)};
  const Vec2 a(0.3, -0.8);
  const DiracEigenpairs p = dirac_eigenpairs(sys, a);
  const DiracEigenpairs q = dirac_eigenpairs(sys, -a);
  EXPECT_DOUBLE_EQ(q.values[0], -p.values[1]);
  EXPECT_DOUBLE_EQ(q.values[1], -p.values[0]);
  // The upper vector at -a is the lower vector at a.
  EXPECT_LE((q.vectors[1] - p.vectors[0]).norm(), 1e-14);
}

TEST(Homogenize, DegenerateAtZero) {
  const DiracEigenpairs p = dirac_eigenpairs(DiracSystem{0.5, cplx(1.0, 0.0)}, Vec2::Zero());
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.values[0], 0.0);
  EXPECT_EQ(p.values[1], 0.0);
  EXPECT_NEAR(std::abs(p.vectors[0].dot(p.vectors[1])), 0.0, 1e-15);
}

TEST(Homogenize, EffectiveWavenumber) {
  const DiracSystem sys{0.5, cplx(0.0, -1.6)};
  EXPECT_EQ(effective_wavenumber(0.0, sys), 0.0);
  EXPECT_DOUBLE_EQ(effective_wavenumber(0.2, sys), 0.25);
  EXPECT_DOUBLE_EQ(effective_wavenumber(-0.4, sys), 2.0 * effective_wavenumber(0.2, sys));
}

TEST(Homogenize, ContextAtTheCriticalPoints) {
  const EnvelopeContext& h = honeycomb_ctx();
  ASSERT_TRUE(h.dirac.has_value());
  EXPECT_NEAR(h.omega_star, 0.24600557065143436, 1e-9);
  EXPECT_NEAR(x_axis_period(honeycomb()), std::sqrt(3.0), 1e-15);
  // The Dirac point lies on the x-axis line cut: alpha*.(sqrt3, 0) = 2 pi.
  EXPECT_NEAR(h.alpha_star.alpha.x() * x_axis_period(honeycomb()), kTwoPi, 1e-12);
  const EnvelopeContext& s = square_ctx();
  EXPECT_FALSE(s.dirac.has_value());
  EXPECT_NEAR(s.omega_star, 0.22434095551419478, 1e-9);
  EXPECT_GT(s.curvature, 0.0);
  EXPECT_EQ(x_axis_period(square()), 1.0);
}

// Full bands near K against the plane-wave spectrum of the 2x2 model.
TEST(Homogenize, DiracModelMatchesBands) {
  const EnvelopeContext& ctx = honeycomb_ctx();
  const DiracSystem sys = system_of(*ctx.dirac);
  const double sd = std::sqrt(ctx.material.delta());
  const double scale = ctx.alpha_star.alpha.norm();
  const double rels[5] = {2e-3, 5e-3, 1e-2, 1.5e-2, 2e-2};
  for (int i = 0; i < 5; ++i) {
    const Vec2 a = rels[i] * scale * unit_dir(0.9 * i);
    const BandPoint p = solve_bands(honeycomb_basis(), ctx.material, QuasiMomentum{ctx.alpha_star.alpha + a});
    ASSERT_TRUE(p.found1 && p.found2);
    const DiracEigenpairs e = dirac_eigenpairs(sys, a);
    const double m = e.values[1];
    EXPECT_LE(std::abs((p.omega1 - ctx.omega_star) / sd - e.values[0]), 0.1 * m) << rels[i];
    EXPECT_LE(std::abs((p.omega2 - ctx.omega_star) / sd - e.values[1]), 0.1 * m) << rels[i];
  }
}

TEST(Homogenize, CoefficientsMatchModelEigenvectors) {
  const EnvelopeContext& ctx = honeycomb_ctx();
  const DiracSystem sys = system_of(*ctx.dirac);
  const PsiDensities psi = solve_psi(honeycomb_basis(), ctx.alpha_star);
  for (double rel_t : {3e-3, 1e-2}) {
    const Vec2 a = rel_t * ctx.alpha_star.alpha.norm() * unit_dir(1.1);
    const QuasiMomentum alpha{ctx.alpha_star.alpha + a};
    const BandPoint p = solve_bands(honeycomb_basis(), ctx.material, alpha);
    const DiracEigenpairs e = dirac_eigenpairs(sys, a);
    for (int band = 0; band < 2; ++band) {
      const EigenDensities d =
          kernel_densities(honeycomb_basis(), ctx.material, alpha, band ? p.omega2 : p.omega1);
      const CoeffPair c = project_coeffs(d, psi.psi[0], psi.psi[1]);
      const Eigen::Vector2cd v(c.A, c.B);
      EXPECT_LE((v - e.vectors[band]).norm(), 0.05) << rel_t << " " << band;
    }
  }
}

TEST(Homogenize, DispersionAtZeroAndWindow) {
  const DispersionRoot r = envelope_frequency_dispersion(honeycomb_ctx(), 0.0, Vec2(1.0, 0.0));
  EXPECT_TRUE(r.found);
  EXPECT_EQ(r.f, 0.0);
  EXPECT_THROW(envelope_frequency_dispersion(honeycomb_ctx(), 0.011, Vec2(1.0, 0.0)), std::invalid_argument);
  EXPECT_THROW(envelope_frequency_dispersion(honeycomb_ctx(), -0.02, Vec2(1.0, 0.0)), std::invalid_argument);
}

TEST(Homogenize, DispersionRootsSolveTheBand) {
  const EnvelopeContext& ctx = honeycomb_ctx();
  for (double eps : {-3e-3, 4e-3}) {
    const DispersionRoot r = envelope_frequency_dispersion(ctx, eps, Vec2(1.0, 0.0));
    ASSERT_TRUE(r.found);
    EXPECT_NEAR(r.f, r.t / kTwoPi, 1e-15);
    EXPECT_NEAR(band_value(ctx, r.t, Vec2(1.0, 0.0), eps > 0.0), ctx.omega_star + eps, 1e-9);
  }
}

TEST(Homogenize, LinearLawOnTheHoneycomb) {
  const EnvelopeCurve& c = honeycomb_curve();
  for (bool f : c.found) EXPECT_TRUE(f);
  for (double f : c.f) EXPECT_GE(f, 0.0);
  EXPECT_EQ(f_at(c, 0.0), 0.0);
  EXPECT_EQ(c.fit.model, "linear");
  EXPECT_GE(c.fit.r2, 0.999);
  EXPECT_LE(rel(c.fit.coefficient, predicted_coefficient()), 0.05);
  double fmax = 0.0;
  for (double f : c.f) fmax = std::max(fmax, f);
  EXPECT_LE(std::abs(c.fit.intercept), 0.02 * fmax);
  EXPECT_LE(c.fit.ratio_spread, 0.05);
}

TEST(Homogenize, EffectiveWavenumberMatchesDispersion) {
  const EnvelopeCurve& c = honeycomb_curve();
  const DiracSystem sys = system_of(*honeycomb_ctx().dirac);
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    if (c.epsilons[i] == 0.0) continue;
    const double k = effective_wavenumber(c.epsilons[i] / std::sqrt(1e-3), sys);
    EXPECT_LE(rel(kTwoPi * c.f[i], k), 0.05) << c.epsilons[i];
  }
}

// Upper and lower cones share a curvature q: omega = omega* +- s t + q t^2, so
// f(eps) / f(-eps) = 1 - 2 q eps / s^2 to first order.
TEST(Homogenize, ConeAsymmetryFollowsTheCommonCurvature) {
  const EnvelopeContext& ctx = honeycomb_ctx();
  const EnvelopeCurve& c = honeycomb_curve();
  const double eps = 5e-3;
  const double fp = f_at(c, eps), fm = f_at(c, -eps);
  const double t = 0.5 * kTwoPi * (fp + fm);
  const double up = band_value(ctx, t, Vec2(1.0, 0.0), true);
  const double lo = band_value(ctx, t, Vec2(1.0, 0.0), false);
  const double s = (up - lo) / (2.0 * t);
  const double q = (up + lo - 2.0 * ctx.omega_star) / (2.0 * t * t);
  EXPECT_LE(std::abs(fp / fm - (1.0 - 2.0 * q * eps / (s * s))), 0.005);
}

// Cycles accumulated by the envelope across 100 cells of the x-axis follow the cone law.
TEST(Homogenize, EnvelopePhaseAcrossTheCrystal) {
  const double period = x_axis_period(honeycomb());
  for (double eps : {-1e-3, 1e-3}) {
    const double cycles = f_at(honeycomb_curve(), eps) * 100.0 * period;
    const double predicted = std::abs(eps) * predicted_coefficient() * 100.0 * period;
    EXPECT_LE(rel(cycles, predicted), 0.05) << eps;
  }
}

TEST(Homogenize, SquareRootLawOnTheSquareLattice) {
  const EnvelopeCurve& c = square_curve();
  EXPECT_FALSE(c.found[0]);
  for (std::size_t i = 1; i < c.found.size(); ++i) EXPECT_TRUE(c.found[i]);
  EXPECT_EQ(c.fit.model, "sqrt");
  EXPECT_GE(c.fit.r2, 0.99);
  EXPECT_LE(c.fit.ratio_spread, 0.05);
  const DispersionRoot neg = envelope_frequency_dispersion(square_ctx(), -1e-3, Vec2(1.0, 0.0));
  EXPECT_FALSE(neg.found);
}

TEST(Homogenize, LawsAreMutuallyExclusive) {
  const auto linear = [](double e) { return e; };
  const auto root = [](double e) { return std::sqrt(e); };
  EXPECT_LE(law_spread(honeycomb_curve(), linear), 0.05);
  EXPECT_GT(law_spread(honeycomb_curve(), root), 0.05);
  EXPECT_LE(law_spread(square_curve(), root), 0.05);
  EXPECT_GT(law_spread(square_curve(), linear), 0.05);
}

TEST(Homogenize, FftRecoversSyntheticEnvelope) {
  const EnvelopeContext& ctx = honeycomb_ctx();
  const double period = x_axis_period(honeycomb());
  const int cells = 64, per_cell = 8;
  const std::vector<Vec2> pts = line_points(period, cells, per_cell);
  const MicroModes mm = micro_modes(honeycomb_basis(), pts);
  const double bin = 1.0 / (cells * period);
  for (double f_true : {0.0, 3.3 * bin, 7.0 * bin, 11.6 * bin}) {
    std::vector<cplx> u(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      u[i] = std::exp(kI * (kTwoPi * f_true * pts[i].x())) * mm.modes[0].samples[i].value;
    const FftEnvelope e = envelope_frequency_fft(u, pts, ctx.alpha_star.alpha, period, cells);
    EXPECT_NEAR(e.bin_width, bin, 1e-15);
    EXPECT_LE(std::abs(e.f - f_true), bin) << f_true;
    if (f_true == 0.0) EXPECT_LT(e.f, bin);
  }
  const std::vector<cplx> u(pts.size(), cplx(1.0));
  EXPECT_THROW(envelope_frequency_fft(std::vector<cplx>(32 * 8), line_points(period, 32, 8), ctx.alpha_star.alpha,
                                      period, 32),
               std::invalid_argument);
  EXPECT_THROW(envelope_frequency_fft(std::vector<cplx>(64 * 4), line_points(period, 64, 4), ctx.alpha_star.alpha,
                                      period, 64),
               std::invalid_argument);
  EXPECT_THROW(envelope_frequency_fft(u, pts, ctx.alpha_star.alpha, period, 65), std::invalid_argument);
}

TEST(Homogenize, FftAgreesWithDispersion) {
  const EnvelopeContext& ctx = honeycomb_ctx();
  const double eps = 8e-3;
  const DispersionRoot r = envelope_frequency_dispersion(ctx, eps, Vec2(1.0, 0.0));
  ASSERT_TRUE(r.found);
  const QuasiMomentum alpha{ctx.alpha_star.alpha + Vec2(r.t, 0.0)};
  const EigenDensities d = kernel_densities(honeycomb_basis(), ctx.material, alpha, r.omega);
  const double period = x_axis_period(honeycomb());
  const std::vector<Vec2> pts = line_points(period, 64, 8);
  const FieldGrid g = eval_field(honeycomb_basis(), d, pts);
  std::vector<cplx> u;
  for (const FieldSample& s : g.samples) u.push_back(s.value);
  const FftEnvelope e = envelope_frequency_fft(u, pts, ctx.alpha_star.alpha, period, 64);
  EXPECT_TRUE(e.found);
  EXPECT_LE(std::abs(e.f - r.f), 2.0 * e.bin_width);
}
