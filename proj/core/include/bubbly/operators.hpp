#pragma once

#include <memory>
#include <vector>

#include "bubbly/boundary.hpp"
#include "bubbly/greens.hpp"

namespace bubbly {

/// Bulk (rho, kappa) and bubble (rho_b, kappa_b) parameters.
struct Material {
  double rho = 1000.0;
  double kappa = 1000.0;
  double rho_b = 1.0;
  double kappa_b = 1.0;

  double delta() const { return rho_b / rho; }
  double v() const;
  double v_b() const;
  /// Throws unless all parameters are positive and 0 < delta < 1.
  void validate() const;
};

enum class LayerKind { SingleLayer, NeumannPoincare };

struct LayerOperator {
  CMatrix matrix;
  LayerKind kind = LayerKind::SingleLayer;
  QuasiMomentum alpha;
  double k = 0.0;
};

struct BlockOperator {
  CMatrix matrix;
  double delta = 0.0;
  double omega = 0.0;
  double v = 1.0;
  double v_b = 1.0;
  QuasiMomentum alpha;
};

/// Nystrom discretisation of S^{alpha,k} and (K^{-alpha,k})* for one (basis, alpha) and any
/// 0 <= k <= k_max. The k-independent lattice sums are tabulated once, so each new k costs a
/// few dense linear combinations. Self-circle entries use product quadrature for the
/// logarithmic singularity.
class KernelTable {
 public:
  KernelTable(const BoundaryBasis& basis, const Vec2& alpha, double k_max = 1.0, const EwaldOptions& options = {});

  CMatrix single_layer(double k) const;
  CMatrix neumann_poincare(double k) const;

  const BoundaryBasis& basis() const { return basis_; }
  const Vec2& alpha() const { return alpha_; }
  double k_max() const { return ewald_.k_max(); }

 private:
  CMatrix lattice_part(double k, bool normal) const;

  BoundaryBasis basis_;
  Vec2 alpha_;
  EwaldSum ewald_;
  std::vector<CMatrix> real_val_;
  std::vector<CMatrix> real_grad_;
  CMatrix phase_;         // e^{i p.x_i}
  CMatrix phase_normal_;  // i (p.nu_i) e^{i p.x_i}
  std::vector<double> kress_;     // product weights by node offset
  std::vector<double> log_fac_;   // log(4 sin^2(dt/2)) by node offset
};

LayerOperator assemble_single_layer(const BoundaryBasis& basis, const QuasiMomentum& alpha, double k);
LayerOperator assemble_np(const BoundaryBasis& basis, const QuasiMomentum& alpha, double k);

/// [[S^{k_b}, -S^{k}], [-I/2 + K*^{k_b}, -delta (I/2 + K*^{k})]] with k = omega/v, k_b = omega/v_b.
BlockOperator assemble_A(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                         double omega);
BlockOperator assemble_A(const KernelTable& table, const Material& material, double omega);

/// Scales each row to unit max-norm in place; returns the applied factors (1 for zero rows).
Eigen::VectorXd equilibrate_rows(CMatrix& m);

struct SigmaResult {
  double sigma_min = 0.0;
  double sigma_second = 0.0;
  double sigma_max = 0.0;
  Eigen::VectorXd row_scale;
  /// Right singular vectors for the two smallest singular values.
  CVector v_min;
  CVector v_second;
};

/// Full SVD of the row-equilibrated matrix.
SigmaResult sigma_min(const BlockOperator& op);
SigmaResult sigma_min(const CMatrix& m);

/// Fast estimate of the smallest singular value of an (already equilibrated) square matrix by
/// inverse iteration on A^H A. The start vector is deterministic; pass warm to reuse the
/// previous singular vector.
double sigma_min_estimate(const CMatrix& m, CVector* warm = nullptr);

}  // namespace bubbly
