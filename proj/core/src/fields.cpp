#include "bubbly/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "bubbly/parallel.hpp"

namespace bubbly {

namespace {

constexpr double kNudge = 1e-6;
// Equilibrated sigma_min / sigma_max accepted as a null direction; matches the solver acceptance.
constexpr double kPairThreshold = 1e-6;

EigenDensities gauge_fixed(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                           double omega, const CVector& v, double ratio) {
  const int n = basis.size();
  EigenDensities d;
  d.phi = v.head(n);
  d.psi = v.tail(n);
  const double norm = d.phi.norm();
  if (!(norm > 0.0)) throw std::runtime_error("null vector has no interior component");
  cplx g = 1.0 / norm;
  if (std::abs(d.phi[0]) > 0.0) g *= std::conj(d.phi[0]) / std::abs(d.phi[0]);
  d.phi *= g;
  d.psi *= g;
  d.phi[0] = cplx(d.phi[0].real(), 0.0);
  d.omega = omega;
  d.alpha = alpha;
  d.material = material;
  d.sigma_ratio = ratio;
  return d;
}

}  // namespace

EigenDensities kernel_densities(const BoundaryBasis& basis, const Material& material, const QuasiMomentum& alpha,
                                double omega) {
  const SigmaResult s = sigma_min(assemble_A(basis, material, alpha, omega));
  const double ratio = s.sigma_min / s.sigma_max;
  if (ratio > kPairThreshold) throw std::runtime_error("not a characteristic pair: sigma ratio too large");
  return gauge_fixed(basis, material, alpha, omega, s.v_min, ratio);
}

std::vector<EigenDensities> kernel_densities_pair(const BoundaryBasis& basis, const Material& material,
                                                  const QuasiMomentum& alpha, double omega) {
  const SigmaResult s = sigma_min(assemble_A(basis, material, alpha, omega));
  const double r1 = s.sigma_min / s.sigma_max;
  const double r2 = s.sigma_second / s.sigma_max;
  if (r1 > kPairThreshold || r2 > kPairThreshold) throw std::runtime_error("no two-dimensional kernel at this pair");
  return {gauge_fixed(basis, material, alpha, omega, s.v_min, r1),
          gauge_fixed(basis, material, alpha, omega, s.v_second, r2)};
}

LayerPotential::LayerPotential(const BoundaryBasis& basis, const Vec2& alpha, double k, CVector density)
    : basis_(basis), alpha_(alpha), k_(k), density_(std::move(density)) {
  if (density_.size() != basis.size()) throw std::invalid_argument("density size does not match the basis");
  ewald_ = std::make_shared<const EwaldSum>(basis.lattice(), alpha, k);
  const int nq = basis.n_quad();
  for (int b = 0; b < basis.n_bubbles(); ++b) {
    CVector c = CVector::Zero(nq);
    for (int n = 0; n < nq; ++n) {
      for (int m = 0; m < nq; ++m) c[n] += density_[basis.index(b, m)] * std::exp(-kI * (kTwoPi * n * m / nq));
      c[n] /= static_cast<double>(nq);
    }
    fourier_.push_back(std::move(c));
  }
  near_distance_ = 0.0;
}

cplx LayerPotential::circle_value(int bubble, const Vec2& x) const {
  const Lattice& lat = basis_.lattice();
  const Vec2& center = basis_.dimer().centers[bubble];
  const Eigen::Vector2i ip = lat.nearest_point(x - center);
  const Vec2 shift = lat.point(ip.x(), ip.y());
  const Vec2 xb = x - shift;
  const cplx phase = std::exp(kI * alpha_.dot(shift));
  const double R = basis_.radius();
  const int nq = basis_.n_quad();

  // Laplace single layer of the trigonometric interpolant, exact off and on the circle.
  const Vec2 d = xb - center;
  const double rho = d.norm();
  const double theta = std::atan2(d.y(), d.x());
  const double r_out = std::max(rho, R);
  const double ratio = std::min(rho, R) / r_out;
  const CVector& c = fourier_[bubble];
  cplx lap = c[0] * std::log(r_out);
  double pw = 1.0;
  for (int n = 1; n < nq / 2; ++n) {
    pw *= ratio;
    if (pw < 1e-18) break;
    const cplx e = std::exp(kI * (n * theta));
    lap -= (pw / (2.0 * n)) * (c[n] * e + c[nq - n] * std::conj(e));
  }
  lap *= R;

  std::vector<cplx> weights = ewald_->recip_weights(k_);
  cplx smooth = 0.0;
  for (int m = 0; m < nq; ++m) {
    const BoundaryNode& y = basis_.node(basis_.index(bubble, m));
    smooth += y.weight * ewald_->evaluate(k_, weights, xb - y.point, true).value * density_[basis_.index(bubble, m)];
  }
  return phase * (lap + smooth);
}

cplx LayerPotential::operator()(const Vec2& x) const {
  cplx sum = 0.0;
  for (int b = 0; b < basis_.n_bubbles(); ++b) sum += circle_value(b, x);
  return sum;
}

int bubble_containing(const BoundaryBasis& basis, const Vec2& x) {
  const Lattice& lat = basis.lattice();
  for (int b = 0; b < basis.n_bubbles(); ++b) {
    const Vec2& c = basis.dimer().centers[b];
    const Eigen::Vector2i ip = lat.nearest_point(x - c);
    if ((x - lat.point(ip.x(), ip.y()) - c).norm() < basis.radius()) return b;
  }
  return -1;
}

FieldGrid eval_field(const BoundaryBasis& basis, const EigenDensities& densities, const std::vector<Vec2>& points,
                     int threads) {
  const double k = densities.omega / densities.material.v();
  const double kb = densities.omega / densities.material.v_b();
  const LayerPotential outside(basis, densities.alpha.alpha, k, densities.psi);
  const LayerPotential inside(basis, densities.alpha.alpha, kb, densities.phi);
  const Lattice& lat = basis.lattice();
  FieldGrid grid;
  grid.samples.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    FieldSample s;
    s.point = points[i];
    Vec2 x = points[i];
    for (const BoundaryNode& nd : basis.nodes()) {
      const Eigen::Vector2i ip = lat.nearest_point(x - nd.point);
      const Vec2 rel = x - nd.point - lat.point(ip.x(), ip.y());
      if (rel.norm() < kNudge) {
        x += kNudge * nd.normal;
        s.nudged = true;
        break;
      }
    }
    s.inside = bubble_containing(basis, x) >= 0;
    s.value = s.inside ? inside(x) : outside(x);
    grid.samples[i] = s;
  });
  return grid;
}

std::vector<Vec2> rectangle_points(const Vec2& lower, const Vec2& upper, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid resolution must be positive");
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const double y = ny == 1 ? lower.y() : lower.y() + (upper.y() - lower.y()) * j / (ny - 1.0);
    for (int i = 0; i < nx; ++i) {
      const double x = nx == 1 ? lower.x() : lower.x() + (upper.x() - lower.x()) * i / (nx - 1.0);
      out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<Vec2> line_points(double period, int n_cells, int per_cell) {
  if (n_cells < 1 || per_cell < 1) throw std::invalid_argument("line sampling must be positive");
  std::vector<Vec2> out;
  const double h = period / per_cell;
  for (int i = 0; i < n_cells * per_cell; ++i) out.emplace_back((i + 0.5) * h, 0.0);
  return out;
}

std::vector<Vec2> cell_block_points(const Lattice& lattice, int n_cells, int per_cell) {
  std::vector<Vec2> out;
  const int m = n_cells * per_cell;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) out.push_back(lattice.point((i + 0.5) / per_cell, (j + 0.5) / per_cell));
  return out;
}

MicroModes micro_modes(const BoundaryBasis& basis, const std::vector<Vec2>& points, int threads) {
  MicroModes out;
  out.alpha_star = dirac_point(basis.lattice());
  const PsiDensities psi = solve_psi(basis, out.alpha_star);
  for (const CVector& density : psi.psi) {
    const LayerPotential pot(basis, out.alpha_star.alpha, 0.0, density);
    FieldGrid grid;
    grid.samples.resize(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
      FieldSample s;
      s.point = points[i];
      s.inside = bubble_containing(basis, points[i]) >= 0;
      s.value = pot(points[i]);
      grid.samples[i] = s;
    });
    out.modes.push_back(std::move(grid));
  }
  return out;
}

CoeffPair project_coeffs(const EigenDensities& densities, const CVector& psi1, const CVector& psi2) {
  CMatrix m(psi1.size(), 2);
  m.col(0) = psi1;
  m.col(1) = psi2;
  const CVector coef = m.colPivHouseholderQr().solve(densities.phi);
  CoeffPair out;
  out.residual = (densities.phi - m * coef).norm() / densities.phi.norm();
  if (out.residual > 0.1) throw std::runtime_error("density is not in the span of psi_1, psi_2");
  cplx a = coef[0];
  cplx b = coef[1];
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  a /= norm;
  b /= norm;
  if (std::abs(b) > 0.0) {
    const cplx g = std::conj(b) / std::abs(b);
    a *= g;
    b = std::abs(b);
  }
  out.A = a;
  out.B = b;
  return out;
}

double two_scale_residual(const FieldGrid& field, const CoeffPair& coeffs, const MicroModes& micro,
                          const Vec2& alpha_tilde) {
  const std::size_t n = field.samples.size();
  const std::size_t m = micro.modes.size();
  if (m < 1 || m > 2) throw std::invalid_argument("expected one or two micro modes");
  for (const FieldGrid& g : micro.modes)
    if (g.samples.size() != n) throw std::invalid_argument("micro modes do not match the field samples");
  // A single mode (square lattice) carries the whole envelope; B is ignored.
  const cplx coef[2] = {m == 1 ? cplx(1.0) : coeffs.A, coeffs.B};
  CVector u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& x = field.samples[i].point;
    u[i] = field.samples[i].value;
    cplx micro_value = 0.0;
    for (std::size_t j = 0; j < m; ++j) micro_value += coef[j] * micro.modes[j].samples[i].value;
    v[i] = std::exp(kI * alpha_tilde.dot(x)) * micro_value;
  }
  const cplx s = v.dot(u) / v.squaredNorm();
  return (u - s * v).norm() / u.norm();
}

}  // namespace bubbly
