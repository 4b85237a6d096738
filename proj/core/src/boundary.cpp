#include "bubbly/boundary.hpp"

#include <cmath>
#include <stdexcept>

namespace bubbly {

BoundaryBasis::BoundaryBasis(const Lattice& lattice, const BubbleDimer& dimer) : lattice_(lattice), dimer_(dimer) {
  const int n = dimer.n_quad;
  const double w = kTwoPi * dimer.radius / n;
  nodes_.reserve(static_cast<std::size_t>(n) * dimer.centers.size());
  for (int b = 0; b < dimer.n_bubbles(); ++b) {
    for (int m = 0; m < n; ++m) {
      const double t = kTwoPi * m / n;
      const Vec2 dir(std::cos(t), std::sin(t));
      nodes_.push_back({dimer.centers[b] + dimer.radius * dir, dir, w, t, b, m});
    }
  }
}

std::vector<int> BoundaryBasis::modes() const {
  std::vector<int> out;
  for (int n = -dimer_.n_modes; n <= dimer_.n_modes; ++n) out.push_back(n);
  return out;
}

CMatrix BoundaryBasis::mode_coefficients(const CVector& density) const {
  if (density.size() != size()) throw std::invalid_argument("density size does not match the basis");
  const std::vector<int> idx = modes();
  CMatrix out = CMatrix::Zero(n_bubbles(), static_cast<Eigen::Index>(idx.size()));
  for (const BoundaryNode& nd : nodes_) {
    const int i = index(nd.bubble, nd.local);
    for (std::size_t c = 0; c < idx.size(); ++c)
      out(nd.bubble, c) += density[i] * std::exp(-kI * (idx[c] * nd.angle)) * (nd.weight / (kTwoPi * radius()));
  }
  return out;
}

cplx BoundaryBasis::integrate(const CVector& density, int bubble) const {
  cplx sum = 0.0;
  for (int m = 0; m < n_quad(); ++m) sum += density[index(bubble, m)] * nodes_[index(bubble, m)].weight;
  return sum;
}

DimerGeometry make_dimer(const Lattice& lattice, double R, int n_modes, int n_quad) {
  if (!(R > 0.0)) throw std::invalid_argument("bubble radius must be positive");
  if (n_modes < 1) throw std::invalid_argument("multipole order must be at least 1");
  if (n_quad < 4 * n_modes + 4) throw std::invalid_argument("n_quad must be at least 4N+4");
  if (n_quad % 2 != 0) throw std::invalid_argument("n_quad must be even");
  BubbleDimer dimer;
  dimer.radius = R;
  dimer.n_modes = n_modes;
  dimer.n_quad = n_quad;
  if (lattice.kind == LatticeKind::Honeycomb) {
    dimer.centers = {honeycomb_x1(lattice), honeycomb_x2(lattice)};
  } else {
    dimer.centers = {cell_center(lattice)};
  }
  for (const Vec2& a : dimer.centers) {
    for (const Vec2& b : dimer.centers) {
      for (int m = -2; m <= 2; ++m) {
        for (int n = -2; n <= 2; ++n) {
          const Vec2 d = a - b - lattice.point(m, n);
          if (d.norm() < 1e-12) continue;
          if (d.norm() <= 2.0 * R + 1e-9) throw std::invalid_argument("bubbles touch or overlap");
        }
      }
    }
  }
  BoundaryBasis basis(lattice, dimer);
  return {dimer, basis};
}

CVector indicator_rhs(const BoundaryBasis& basis, int j) {
  if (j < 1 || j > basis.n_bubbles()) throw std::invalid_argument("indicator index out of range");
  CVector v = CVector::Zero(basis.size());
  for (int m = 0; m < basis.n_quad(); ++m) v[basis.index(j - 1, m)] = 1.0;
  return v;
}

std::vector<int> r3_permutation(const BoundaryBasis& basis) {
  if (basis.lattice().kind != LatticeKind::Honeycomb || basis.n_bubbles() != 2)
    throw std::invalid_argument("R3 node permutation needs the honeycomb dimer");
  const int n = basis.n_quad();
  std::vector<int> perm(basis.size());
  // Reflection x -> -x about the vertical axis sends angle t to pi - t.
  for (int b = 0; b < 2; ++b)
    for (int m = 0; m < n; ++m) perm[basis.index(b, m)] = basis.index(1 - b, ((n / 2 - m) % n + n) % n);
  return perm;
}

}  // namespace bubbly
