#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace bubbly;
using namespace bubbly::testing;

namespace {

GreensParams params(const Lattice& lat, const Vec2& alpha, double k, GreensMethod method) {
  GreensParams p;
  p.lattice = lat;
  p.alpha.alpha = alpha;
  p.k = k;
  p.method = method;
  return p;
}

double min_shift(const Lattice& lat, const Vec2& alpha) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) m = std::min(m, (alpha + lat.dual_point(i, j)).norm());
  return m;
}

Vec2 random_point(std::mt19937_64& rng, const Lattice& lat) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  return lat.point(u(rng), u(rng));
}

}  // namespace

// Reference value computed with both evaluators and frozen; the two agree to 1e-14.
TEST(Greens, FrozenValueBothMethods) {
  const Lattice& lat = honeycomb();
  const Vec2 alpha = dirac_point(lat).alpha;
  const Vec2 x(0.31, 0.17);
  const cplx expected(-0.076141316514058, 0.011450185814814);
  for (GreensMethod m : {GreensMethod::Spectral, GreensMethod::Ewald})
    EXPECT_LT(std::abs(green(params(lat, alpha, 0.5, m), x) - expected), 1e-12) << to_string(m);
}

TEST(Greens, EwaldIndependentOfSplit) {
  const Lattice& lat = honeycomb();
  const Vec2 alpha = dirac_point(lat).alpha;
  const Vec2 x(0.31, 0.17);
  GreensParams p = params(lat, alpha, 0.5, GreensMethod::Ewald);
  const cplx ref = green(p, x);
  for (double split : {1.0, 2.5, 4.0}) {
    p.ewald_split = split;
    EXPECT_LT(std::abs(green(p, x) - ref), 1e-12) << split;
  }
}

TEST(Greens, MethodsAgreeOnRandomInputs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  for (int i = 0; i < 100; ++i) {
    const Lattice& lat = i % 2 ? square() : honeycomb();
    const Vec2 alpha = random_alpha(rng, lat);
    const double k = u(rng) * min_shift(lat, alpha);
    const Vec2 x = random_point(rng, lat);
    const GreenValue s = green_spectral(params(lat, alpha, k, GreensMethod::Spectral), x).value;
    const GreenValue e = green_value(params(lat, alpha, k, GreensMethod::Ewald), x);
    EXPECT_LT(std::abs(s.value - e.value), 1e-8);
    EXPECT_LT((s.grad - e.grad).norm(), 1e-8);
  }
}

TEST(Greens, SpectralRadiusDoubling) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const Lattice& lat = honeycomb();
    const Vec2 alpha = random_alpha(rng, lat);
    const Vec2 x = random_point(rng, lat);
    GreensParams p = params(lat, alpha, 0.7, GreensMethod::Spectral);
    const SpectralDetail automatic = green_spectral(p, x);
    p.spectral_radius = 2 * automatic.radius_used;
    EXPECT_LT(std::abs(green_spectral(p, x).value.value - automatic.value.value), 1e-9);
  }
}

TEST(Greens, QuasiPeriodicity) {
  std::mt19937_64 rng(99);
  for (const Lattice* lat : {&honeycomb(), &square()}) {
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec2 alpha = random_alpha(rng, *lat);
      const double k = 0.5 * min_shift(*lat, alpha);
      const Vec2 x = random_point(rng, *lat);
      const GreensParams p = params(*lat, alpha, k, GreensMethod::Ewald);
      const GreenValue g = green_value(p, x);
      for (const Vec2& l : {lat->l1, lat->l2, Vec2(lat->l1 - 2.0 * lat->l2)}) {
        const cplx phase = std::exp(kI * alpha.dot(l));
        const GreenValue gs = green_value(p, x + l);
        worst = std::max(worst, std::abs(gs.value - phase * g.value));
        worst = std::max(worst, (gs.grad - phase * g.grad).norm() * 1e-2);
      }
      scale = std::max(scale, std::abs(g.value));
    }
    EXPECT_LE(worst, 1e-9 * scale);
  }
}

TEST(Greens, ReflectionSymmetry) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Lattice& lat = i % 2 ? square() : honeycomb();
    const Vec2 alpha = random_alpha(rng, lat);
    const double k = 0.6 * min_shift(lat, alpha);
    const Vec2 x = random_point(rng, lat);
    const cplx a = green(params(lat, alpha, k, GreensMethod::Ewald), -x);
    const cplx b = green(params(lat, -alpha, k, GreensMethod::Ewald), x);
    EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b)));
  }
}

TEST(Greens, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  const double h = 1e-5;
  for (int i = 0; i < 50; ++i) {
    const Lattice& lat = i % 2 ? square() : honeycomb();
    const Vec2 alpha = random_alpha(rng, lat);
    const GreensParams p = params(lat, alpha, 0.4 * min_shift(lat, alpha), GreensMethod::Ewald);
    const Vec2 x = random_point(rng, lat);
    const EwaldSum sum(lat, alpha, p.k);
    CVec2 fd;
    fd[0] = (sum.eval(p.k, x + Vec2(h, 0)).value - sum.eval(p.k, x - Vec2(h, 0)).value) / (2 * h);
    fd[1] = (sum.eval(p.k, x + Vec2(0, h)).value - sum.eval(p.k, x - Vec2(0, h)).value) / (2 * h);
    const CVec2 g = green_grad(p, x);
    EXPECT_LE((fd - g).norm(), 1e-6 * g.norm());
  }
}

// Periodic trapezoid rule on a circle that encloses no lattice point.
TEST(Greens, StaticGradientIsCurlFree) {
  const Lattice& lat = honeycomb();
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const Vec2 alpha = random_alpha(rng, lat);
    const EwaldSum sum(lat, alpha, 0.0);
    const Vec2 c(0.4, 0.3);
    const double r = 0.2;
    const int n = 256;
    cplx loop = 0.0;
    for (int j = 0; j < n; ++j) {
      const double s = kTwoPi * j / n;
      const Vec2 tangent(-std::sin(s), std::cos(s));
      loop += sum.eval(0.0, c + r * unit_dir(s)).grad.dot(tangent.cast<cplx>()) * (r * kTwoPi / n);
    }
    EXPECT_LE(std::abs(loop), 1e-8);
  }
}

TEST(Greens, StaticCorrectionLimit) {
  const Lattice& lat = honeycomb();
  std::mt19937_64 rng(12);
  for (int t = 0; t < 5; ++t) {
    const Vec2 alpha = random_alpha(rng, lat, 0.15);
    const Vec2 x = random_point(rng, lat);
    const cplx g0 = green(params(lat, alpha, 0.0, GreensMethod::Ewald), x);
    const cplx g1 = green_static_correction(lat, QuasiMomentum{alpha}, x);
    const auto defect = [&](double k) {
      return std::abs((green(params(lat, alpha, k, GreensMethod::Ewald), x) - g0) / (k * k) - g1);
    };
    const double ratio = defect(1e-2) / defect(1e-3);
    EXPECT_GT(ratio, 80.0);
    EXPECT_LT(ratio, 120.0);
  }
}

TEST(Greens, StaticCorrectionSymmetries) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const Lattice& lat = i % 2 ? square() : honeycomb();
    const Vec2 alpha = random_alpha(rng, lat);
    const Vec2 x = random_point(rng, lat);
    const cplx a = green_static_correction(lat, QuasiMomentum{alpha}, x);
    EXPECT_LT(std::abs(green_static_correction(lat, QuasiMomentum{-alpha}, -x) - a), 1e-12 * std::abs(a));
    const cplx shifted = green_static_correction(lat, QuasiMomentum{alpha}, x + lat.l1);
    EXPECT_LT(std::abs(shifted - std::exp(kI * alpha.dot(lat.l1)) * a), 1e-12 * std::abs(a));
  }
}

TEST(Greens, Errors) {
  const Lattice& lat = honeycomb();
  const Vec2 alpha = dirac_point(lat).alpha;
  for (GreensMethod m : {GreensMethod::Spectral, GreensMethod::Ewald}) {
    EXPECT_THROW(green(params(lat, alpha, alpha.norm(), m), Vec2(0.3, 0.1)), ResonanceError);
    EXPECT_THROW(green(params(lat, alpha, 0.5, m), lat.l1), SingularPointError);
    EXPECT_THROW(green(params(lat, alpha, 0.5, m), Vec2::Zero()), SingularPointError);
    EXPECT_THROW(green(params(lat, Vec2::Zero(), 0.0, m), Vec2(0.3, 0.1)), std::invalid_argument);
    EXPECT_THROW(green(params(lat, lat.a1, 0.0, m), Vec2(0.3, 0.1)), std::invalid_argument);
  }
  EXPECT_THROW(green_static_correction(lat, QuasiMomentum{}, Vec2(0.3, 0.1)), std::invalid_argument);
  EXPECT_THROW(greens_method_from_string("fmm"), std::invalid_argument);
  EXPECT_EQ(greens_method_from_string("spectral"), GreensMethod::Spectral);
}
