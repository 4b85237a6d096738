#pragma once

#include <optional>
#include <vector>

#include "bubbly/operators.hpp"

namespace bubbly {

/// Densities psi_j with S^{alpha,0}[psi_j] = indicator of bubble j.
struct PsiDensities {
  std::vector<CVector> psi;
  /// Reciprocal condition estimate of the single-layer matrix.
  double rcond = 0.0;
  double residual = 0.0;
};

PsiDensities solve_psi(const BoundaryBasis& basis, const QuasiMomentum& alpha);
PsiDensities solve_psi(const KernelTable& static_table);

/// C_ij = -integral over bubble j of psi_i. 2x2 for the honeycomb dimer, 1x1 for the square cell.
struct CapacitanceMatrix {
  CMatrix values;

  cplx c11() const { return values(0, 0); }
  cplx c12() const { return values.cols() > 1 ? values(0, 1) : cplx(0.0); }
  cplx c21() const { return values.rows() > 1 ? values(1, 0) : cplx(0.0); }
  cplx c22() const { return values.rows() > 1 ? values(1, 1) : values(0, 0); }
  double c1() const { return c11().real(); }
  cplx c2() const { return c12(); }
  /// Ascending eigenvalues of the Hermitian part.
  std::vector<double> eigenvalues() const;
};

CapacitanceMatrix capacitance(const BoundaryBasis& basis, const QuasiMomentum& alpha);
CapacitanceMatrix capacitance_from(const BoundaryBasis& basis, const PsiDensities& psi);

/// omega_j = sqrt(delta lambda_j / |D1|) v_b for the ascending capacitance eigenvalues lambda_j.
std::vector<double> asymptotic_bands(const CapacitanceMatrix& c, const Material& material, double bubble_area);

struct DiracData {
  QuasiMomentum alpha_star;
  double c1_star = 0.0;
  double c2_star_abs = 0.0;
  double omega_star = 0.0;
  /// c = d conj(c2) / d alpha_1 at alpha*.
  cplx c_dirac{0.0, 0.0};
  double lambda0 = 0.0;
  double slope = 0.0;
  /// Gradient of c1 at alpha*.
  Vec2 grad_c1 = Vec2::Zero();
  /// Gradient of c2 at alpha*.
  CVec2 grad_c2 = CVec2::Zero();
  /// (d c2 / d alpha_2) / (d c2 / d alpha_1).
  cplx pattern{0.0, 0.0};
  /// Relative change of c between steps h and h/2.
  double richardson_change = 0.0;
  double step = 0.0;
};

/// Central differences of the capacitance around the Dirac point with step h_rel |alpha*|.
DiracData dirac_velocity(const BoundaryBasis& basis, const Material& material, double h_rel = 1e-3);

struct CharacteristicResult {
  double omega = 0.0;
  /// sigma_min / sigma_max of the equilibrated operator at omega.
  double residual = 1.0;
  bool found = false;
  int evaluations = 0;
};

struct SolverOptions {
  /// Relative tolerance on omega.
  double omega_tol = 1e-10;
  /// Acceptance threshold for sigma_min / sigma_max.
  double residual_tol = 1e-6;
  /// Relative half-width of the search bracket around a guess.
  double bracket = 0.3;
  /// Lattice-sum truncation for the kernel tables.
  EwaldOptions ewald;
};

/// Characteristic-value search for a fixed quasi-momentum.
class BandSolver {
 public:
  BandSolver(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha, double omega_max,
             const SolverOptions& options = {});

  /// Smallest singular value of the equilibrated operator at omega.
  double sigma(double omega);
  SigmaResult svd(double omega) const;
  /// Minimises sigma over [lo, hi]; found only for an interior minimum below the residual threshold.
  CharacteristicResult minimize(double lo, double hi);

  const KernelTable& table() const { return table_; }
  const Material& material() const { return material_; }
  const SolverOptions& options() const { return options_; }
  int evaluations() const { return evaluations_; }

 private:
  KernelTable table_;
  Material material_;
  SolverOptions options_;
  CVector warm_;
  int evaluations_ = 0;
};

CharacteristicResult find_characteristic(const BoundaryBasis& basis, const Material& material,
                                         const QuasiMomentum& alpha, double omega_guess,
                                         const SolverOptions& options = {});

struct BandPoint {
  QuasiMomentum alpha;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double residual1 = 1.0;
  double residual2 = 1.0;
  double omega1_asym = 0.0;
  double omega2_asym = 0.0;
  bool found1 = false;
  bool found2 = false;
  /// Both bands meet in a double characteristic value.
  bool degenerate = false;
};

/// Bands at one quasi-momentum, bracketed around the capacitance asymptotics. The square
/// lattice has one sub-wavelength band and reports omega2 as NaN.
BandPoint solve_bands(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                      const SolverOptions& options = {});

struct BandStructure {
  std::vector<QuasiMomentum> path;
  std::vector<double> arclength;
  std::vector<BandPoint> points;
  std::size_t failures = 0;
};

/// Independent per-point solves; the result is identical for any thread count.
BandStructure band_sweep(const BoundaryBasis& basis, const Material& material, const PathSamples& path,
                         int threads = 1, const SolverOptions& options = {});

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DiracFit {
  double omega_star_fit = 0.0;
  double slope_plus = 0.0;
  double slope_minus = 0.0;
  double r2_plus = 0.0;
  double r2_minus = 0.0;
  bool conical = false;
};

/// Fits omega2 - omega* and omega* - omega1 against the radius t. Slopes are the t -> 0
/// intercepts of the difference quotients, which removes the common curvature.
DiracFit dirac_fit(const std::vector<double>& t, const std::vector<double>& lower, const std::vector<double>& upper,
                   double omega_star);

struct ConeDirection {
  double theta = 0.0;
  /// Absolute radii |alpha - alpha*|.
  std::vector<double> t;
  std::vector<double> lower;
  std::vector<double> upper;
  DiracFit fit;
};

struct ConeScan {
  QuasiMomentum alpha_star;
  /// Characteristic values at alpha* itself.
  BandPoint at_star;
  std::vector<ConeDirection> directions;
  double slope_mean = 0.0;
  /// (max - min) / mean over every per-direction slope of both bands.
  double isotropy_spread = 0.0;
  /// max |slope_plus - slope_minus| / mean over directions.
  double pm_mismatch = 0.0;
  double r2_min = 0.0;
};

/// Bands along n_directions rays theta_j = 2 pi j / n from the Dirac point, at samples >= 5
/// log-spaced radii in [t_min_rel, t_max_rel] |alpha*|, each fitted with dirac_fit.
ConeScan cone_scan(const BoundaryBasis& basis, const Material& material, int n_directions, double t_min_rel,
                   double t_max_rel, int samples, int threads = 1, const SolverOptions& options = {});

}  // namespace bubbly
