#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bubbly/fields.hpp"

namespace bubbly {

/// Plane-wave form of the effective Dirac operator:
/// lambda0 [[0, c (a1 - i a2)], [conj(c) (a1 + i a2), 0]] for envelope wave vector a.
struct DiracSystem {
  double lambda0 = 0.0;
  cplx c{0.0, 0.0};

  Eigen::Matrix2cd matrix(const Vec2& alpha_tilde) const;
};

struct DiracEigenpairs {
  /// Ascending: -lambda0 |c| |a|, +lambda0 |c| |a|.
  std::array<double, 2> values{};
  std::array<Eigen::Vector2cd, 2> vectors;
  bool degenerate = false;
};

/// Closed-form eigenpairs; vectors are unit, second component real and positive.
DiracEigenpairs dirac_eigenpairs(const DiracSystem& system, const Vec2& alpha_tilde);

/// |beta| / (|c| lambda0).
double effective_wavenumber(double beta, const DiracSystem& system);

/// Everything the envelope solvers need about the crystal near its critical point.
struct EnvelopeContext {
  BoundaryBasis basis;
  Material material;
  QuasiMomentum alpha_star;
  /// Exact characteristic value at alpha* (double root for the honeycomb, band maximum for the square).
  double omega_star = 0.0;
  /// Honeycomb only.
  std::optional<DiracData> dirac;
  /// Square only: a in omega* - omega ~ a t^2, used to seed the dispersion inversion.
  double curvature = 0.0;
  SolverOptions options;
};

EnvelopeContext make_envelope_context(const BoundaryBasis& basis, const Material& material,
                                      const SolverOptions& options = {});

/// Band value at alpha* + t direction: the upper band when upper is set, the lower otherwise.
/// The square lattice has one band.
double band_value(const EnvelopeContext& ctx, double t, const Vec2& direction, bool upper);

struct DispersionRoot {
  double t = 0.0;
  double f = 0.0;
  double omega = 0.0;
  bool found = false;
};

/// Solves band(alpha* + t d) = target for t >= 0 and returns f = t / 2pi. Honeycomb targets
/// omega* + epsilon (upper band for epsilon > 0, lower for epsilon < 0); square targets
/// omega* - epsilon on the first band and has no solution for epsilon < 0.
DispersionRoot envelope_frequency_dispersion(const EnvelopeContext& ctx, double epsilon, const Vec2& direction);

struct FftEnvelope {
  double f = 0.0;
  double bin_width = 0.0;
  bool found = false;
};

/// Per-cell average of u e^{-i alpha*.x} over consecutive cells of the x-axis, then the dominant
/// FFT bin. `values` holds per_cell samples for each of n_cells cells.
FftEnvelope envelope_frequency_fft(const std::vector<cplx>& values, const std::vector<Vec2>& points,
                                   const Vec2& alpha_star, double period, int n_cells);

enum class EnvelopeMethod { DispersionInversion, FieldFFT };

struct EnvelopeFit {
  std::string model;  // "linear" or "sqrt"
  double coefficient = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Max relative deviation of f/epsilon (linear) or f/sqrt(epsilon) (sqrt) from its mean.
  double ratio_spread = 0.0;
};

struct EnvelopeCurve {
  std::vector<double> epsilons;
  std::vector<double> f;
  std::vector<bool> found;
  EnvelopeMethod method = EnvelopeMethod::DispersionInversion;
  EnvelopeFit fit;
};

/// Honeycomb: the branch-signed frequency sign(eps) f is fitted by a line in eps. Square:
/// f = a sqrt(eps) by least squares; negative eps entries are reported as not found.
EnvelopeCurve f_curve(const EnvelopeContext& ctx, const std::vector<double>& epsilons, int threads = 1);

/// Period of the lattice along the x-axis: sqrt(3) L for the honeycomb, L for the square.
double x_axis_period(const Lattice& lattice);

}  // namespace bubbly
