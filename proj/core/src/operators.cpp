#include "bubbly/operators.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "bubbly/special.hpp"

namespace bubbly {

double Material::v() const { return std::sqrt(kappa / rho); }
double Material::v_b() const { return std::sqrt(kappa_b / rho_b); }

void Material::validate() const {
  for (double p : {rho, kappa, rho_b, kappa_b})
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("material parameters must be positive");
  if (!(delta() > 0.0 && delta() < 1.0)) throw std::invalid_argument("density contrast must lie in (0,1)");
}

KernelTable::KernelTable(const BoundaryBasis& basis, const Vec2& alpha, double k_max, const EwaldOptions& options)
    : basis_(basis), alpha_(alpha), ewald_(basis.lattice(), alpha, k_max, options) {
  const int n = basis.size();
  const int orders = ewald_.n_orders();
  real_val_.assign(orders, CMatrix(n, n));
  real_grad_.assign(orders, CMatrix(n, n));
  std::vector<cplx> val(orders);
  std::vector<CVec2> grad(orders);
  for (int i = 0; i < n; ++i) {
    const BoundaryNode& xi = basis.node(i);
    const CVec2 nu = xi.normal.cast<cplx>();
    for (int j = 0; j < n; ++j) {
      const BoundaryNode& yj = basis.node(j);
      const bool same = xi.bubble == yj.bubble;
      ewald_.real_terms(xi.point - yj.point, same, val.data(), grad.data());
      for (int o = 0; o < orders; ++o) {
        real_val_[o](i, j) = val[o];
        real_grad_[o](i, j) = grad[o].transpose() * nu;
      }
    }
  }
  const std::vector<Vec2>& recip = ewald_.recip_vectors();
  const int nr = static_cast<int>(recip.size());
  phase_.resize(n, nr);
  phase_normal_.resize(n, nr);
  for (int i = 0; i < n; ++i) {
    const BoundaryNode& xi = basis.node(i);
    for (int r = 0; r < nr; ++r) {
      const cplx e = std::exp(kI * recip[r].dot(xi.point));
      phase_(i, r) = e;
      phase_normal_(i, r) = kI * recip[r].dot(xi.normal) * e;
    }
  }
  const int nq = basis.n_quad();
  kress_.resize(nq);
  log_fac_.resize(nq);
  for (int d = 0; d < nq; ++d) {
    const double s = kTwoPi * d / nq;
    kress_[d] = special::kress_weight(nq / 2, s);
    const double sn = std::sin(0.5 * s);
    log_fac_[d] = d == 0 ? 0.0 : std::log(4.0 * sn * sn);
  }
}

CMatrix KernelTable::lattice_part(double k, bool normal) const {
  const std::vector<CMatrix>& real = normal ? real_grad_ : real_val_;
  CMatrix out = ewald_.real_coeff(k, 0) * real[0];
  for (int o = 1; o < ewald_.n_orders(); ++o) out += ewald_.real_coeff(k, o) * real[o];
  const std::vector<cplx> w = ewald_.recip_weights(k);
  const Eigen::Map<const CVector> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  const CMatrix& left = normal ? phase_normal_ : phase_;
  out.noalias() += (left * wv.asDiagonal()) * phase_.adjoint();
  return out;
}

CMatrix KernelTable::single_layer(double k) const {
  const CMatrix g = lattice_part(k, false);
  const int n = basis_.size();
  const int nq = basis_.n_quad();
  const double R = basis_.radius();
  const double h = kTwoPi / nq;
  const double logR = std::log(R);
  std::vector<double> j0(nq), logr(nq);
  for (int d = 0; d < nq; ++d) {
    const double r = 2.0 * R * std::abs(std::sin(kPi * d / nq));
    j0[d] = std::cyl_bessel_j(0.0, k * r);
    logr[d] = d == 0 ? 0.0 : std::log(r);
  }
  CMatrix s(n, n);
  for (int i = 0; i < n; ++i) {
    const BoundaryNode& xi = basis_.node(i);
    for (int j = 0; j < n; ++j) {
      const BoundaryNode& yj = basis_.node(j);
      if (xi.bubble != yj.bubble) {
        s(i, j) = R * h * g(i, j);
        continue;
      }
      const int d = ((xi.local - yj.local) % nq + nq) % nq;
      cplx smooth = g(i, j) + logR / kTwoPi;
      double l1 = 1.0 / (4.0 * kPi);
      if (d != 0) {
        smooth = g(i, j) + ((1.0 - j0[d]) * logr[d] + j0[d] * logR) / kTwoPi;
        l1 = j0[d] / (4.0 * kPi);
      }
      s(i, j) = R * (l1 * kress_[d] + h * smooth);
    }
  }
  return s;
}

CMatrix KernelTable::neumann_poincare(double k) const {
  const CMatrix g = lattice_part(k, true);
  const int n = basis_.size();
  const int nq = basis_.n_quad();
  const double R = basis_.radius();
  const double h = kTwoPi / nq;
  const double jump = 1.0 / (4.0 * kPi * R);
  std::vector<double> l1(nq);
  for (int d = 0; d < nq; ++d) {
    const double r = 2.0 * R * std::abs(std::sin(kPi * d / nq));
    l1[d] = -k * r * std::cyl_bessel_j(1.0, k * r) / (8.0 * kPi * R);
  }
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const BoundaryNode& xi = basis_.node(i);
    for (int j = 0; j < n; ++j) {
      const BoundaryNode& yj = basis_.node(j);
      if (xi.bubble != yj.bubble) {
        m(i, j) = R * h * g(i, j);
        continue;
      }
      const int d = ((xi.local - yj.local) % nq + nq) % nq;
      const cplx smooth = g(i, j) + jump - l1[d] * log_fac_[d];
      m(i, j) = R * (l1[d] * kress_[d] + h * smooth);
    }
  }
  return m;
}

LayerOperator assemble_single_layer(const BoundaryBasis& basis, const QuasiMomentum& alpha, double k) {
  const KernelTable table(basis, alpha.alpha, k);
  return {table.single_layer(k), LayerKind::SingleLayer, alpha, k};
}

LayerOperator assemble_np(const BoundaryBasis& basis, const QuasiMomentum& alpha, double k) {
  const KernelTable table(basis, alpha.alpha, k);
  return {table.neumann_poincare(k), LayerKind::NeumannPoincare, alpha, k};
}

BlockOperator assemble_A(const KernelTable& table, const Material& material, double omega) {
  material.validate();
  if (!(omega >= 0.0)) throw std::invalid_argument("frequency must be nonnegative");
  const double k = omega / material.v();
  const double kb = omega / material.v_b();
  const CMatrix sb = table.single_layer(kb);
  const CMatrix kbm = table.neumann_poincare(kb);
  const bool same = k == kb;
  const CMatrix s = same ? sb : table.single_layer(k);
  const CMatrix km = same ? kbm : table.neumann_poincare(k);
  const int n = table.basis().size();
  const double delta = material.delta();
  BlockOperator op;
  op.matrix.resize(2 * n, 2 * n);
  op.matrix.topLeftCorner(n, n) = sb;
  op.matrix.topRightCorner(n, n) = -s;
  op.matrix.bottomLeftCorner(n, n) = kbm;
  op.matrix.bottomLeftCorner(n, n).diagonal().array() -= 0.5;
  op.matrix.bottomRightCorner(n, n) = -delta * km;
  op.matrix.bottomRightCorner(n, n).diagonal().array() -= 0.5 * delta;
  op.delta = delta;
  op.omega = omega;
  op.v = material.v();
  op.v_b = material.v_b();
  op.alpha = {table.alpha()};
  return op;
}

BlockOperator assemble_A(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                         double omega) {
  const double kmax = omega / std::min(material.v(), material.v_b());
  const KernelTable table(basis, alpha.alpha, kmax);
  return assemble_A(table, material, omega);
}

Eigen::VectorXd equilibrate_rows(CMatrix& m) {
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).cwiseAbs().maxCoeff();
    if (mx > 0.0) {
      scale[i] = 1.0 / mx;
      m.row(i) *= scale[i];
    }
  }
  return scale;
}

SigmaResult sigma_min(const CMatrix& matrix) {
  CMatrix m = matrix;
  SigmaResult out;
  out.row_scale = equilibrate_rows(m);
  const Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index n = s.size();
  out.sigma_max = s[0];
  out.sigma_min = s[n - 1];
  out.sigma_second = n > 1 ? s[n - 2] : s[n - 1];
  out.v_min = svd.matrixV().col(n - 1);
  out.v_second = svd.matrixV().col(n > 1 ? n - 2 : n - 1);
  return out;
}

SigmaResult sigma_min(const BlockOperator& op) { return sigma_min(op.matrix); }

double sigma_min_estimate(const CMatrix& m, CVector* warm) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) throw std::invalid_argument("sigma_min_estimate needs a square matrix");
  const Eigen::PartialPivLU<CMatrix> lu(m);
  const auto& u = lu.matrixLU();
  for (Eigen::Index i = 0; i < n; ++i)
    if (u(i, i) == cplx(0.0)) return 0.0;
  // Block inverse iteration on (A^H A)^{-1} with two vectors resolves near-double roots.
  CMatrix x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = cplx(1.0 + 0.5 * std::sin(0.7 * i), 0.3 * std::cos(1.3 * i));
    x(i, 1) = cplx(std::cos(0.37 * i), 1.0 - 0.4 * std::sin(2.1 * i));
  }
  if (warm != nullptr && warm->size() == n) x.col(0) = *warm;
  Eigen::HouseholderQR<CMatrix> qr(x);
  x = qr.householderQ() * CMatrix::Identity(n, 2);
  double prev = -1.0;
  double sigma = 0.0;
  for (int it = 0; it < 300; ++it) {
    const CMatrix y = lu.adjoint().solve(x);
    const Eigen::Matrix2cd b = y.adjoint() * y;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(b);
    const double mu = es.eigenvalues()[1];
    sigma = mu > 0.0 ? 1.0 / std::sqrt(mu) : 0.0;
    CMatrix z = lu.solve(y);
    // Rotate to Ritz vectors so column 0 tracks the smallest singular value.
    z = z * es.eigenvectors().rowwise().reverse();
    Eigen::HouseholderQR<CMatrix> q2(z);
    CMatrix xq = q2.householderQ() * CMatrix::Identity(n, 2);
    x = xq;
    if (it > 0 && std::abs(sigma - prev) <= 1e-13 * sigma) break;
    prev = sigma;
  }
  if (warm != nullptr) *warm = x.col(0);
  return sigma;
}

}  // namespace bubbly
