#pragma once

#include <memory>
#include <vector>

#include "bubbly/spectral.hpp"

namespace bubbly {

/// Null vector (phi, psi) of the block operator at a characteristic pair.
struct EigenDensities {
  CVector phi;  // interior density, wavenumber k_b
  CVector psi;  // exterior density, wavenumber k
  double omega = 0.0;
  QuasiMomentum alpha;
  Material material;
  double sigma_ratio = 0.0;
};

/// Right singular vector of the smallest singular value, normalised to |phi| = 1 with the
/// first component of phi real and positive. Throws when sigma_min/sigma_max > 1e-6.
EigenDensities kernel_densities(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                                double omega);

/// Both null directions at a double characteristic value; the second is orthogonalised
/// against the first. Throws when either singular value ratio exceeds 1e-6.
std::vector<EigenDensities> kernel_densities_pair(const BoundaryBasis& basis, const Material& material,
                                                  const QuasiMomentum& alpha, double omega);

/// Single-layer potential S^{alpha,k}[density] at arbitrary points, extended quasi-periodically.
/// Points near a circle use the exact Laplace single layer of the trigonometric interpolant plus
/// a trapezoid rule for the smooth remainder.
class LayerPotential {
 public:
  LayerPotential(const BoundaryBasis& basis, const Vec2& alpha, double k, CVector density);

  cplx operator()(const Vec2& x) const;

  const BoundaryBasis& basis() const { return basis_; }

 private:
  cplx circle_value(int bubble, const Vec2& x) const;

  BoundaryBasis basis_;
  Vec2 alpha_;
  double k_;
  CVector density_;
  std::shared_ptr<const EwaldSum> ewald_;
  std::vector<CVector> fourier_;  // per circle, FFT ordering
  double near_distance_;
};

struct FieldSample {
  Vec2 point;
  cplx value{0.0, 0.0};
  bool inside = false;
  bool nudged = false;
};

struct FieldGrid {
  std::vector<FieldSample> samples;
  /// Grid shape for rectangle samples (row-major in y, then x); 0 for scattered samples.
  int nx = 0;
  int ny = 0;
};

/// Index of the bubble containing x (after lattice reduction), or -1.
int bubble_containing(const BoundaryBasis& basis, const Vec2& x);

/// u = S^{alpha,k}[psi] outside the bubbles and S^{alpha,k_b}[phi] inside.
FieldGrid eval_field(const BoundaryBasis& basis, const EigenDensities& densities, const std::vector<Vec2>& points,
                     int threads = 1);

std::vector<Vec2> rectangle_points(const Vec2& lower, const Vec2& upper, int nx, int ny);
/// Uniform samples on the x-axis over n_cells periods of length `period`, `per_cell` each.
std::vector<Vec2> line_points(double period, int n_cells, int per_cell);
/// Cell-centred samples over an n x n block of unit cells starting at the origin.
std::vector<Vec2> cell_block_points(const Lattice& lattice, int n_cells, int per_cell);

/// S_j = S^{alpha*,0}[psi_j^{alpha*}] evaluated at the given points (one entry per bubble).
struct MicroModes {
  std::vector<FieldGrid> modes;
  QuasiMomentum alpha_star;
};

MicroModes micro_modes(const BoundaryBasis& basis, const std::vector<Vec2>& points, int threads = 1);

struct CoeffPair {
  cplx A{0.0, 0.0};
  cplx B{0.0, 0.0};
  double residual = 0.0;
};

/// Least-squares fit phi ~ A psi1 + B psi2, normalised to |A|^2+|B|^2 = 1 with B real and
/// nonnegative. Throws when the relative residual exceeds 0.1.
CoeffPair project_coeffs(const EigenDensities& densities, const CVector& psi1, const CVector& psi2);

/// Relative l2 distance between u and (A S1 + B S2) e^{i alpha_tilde.x} after the optimal complex
/// scalar alignment. With a single micro mode (square lattice) u is compared with S e^{i alpha_tilde.x}.
double two_scale_residual(const FieldGrid& field, const CoeffPair& coeffs, const MicroModes& micro,
                          const Vec2& alpha_tilde);

}  // namespace bubbly
