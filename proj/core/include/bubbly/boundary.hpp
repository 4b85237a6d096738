#pragma once

#include <vector>

#include "bubbly/lattice.hpp"

namespace bubbly {

/// Circular bubbles in the unit cell: two at x1, x2 for the honeycomb, one at the cell centre
/// for the square lattice.
struct BubbleDimer {
  std::vector<Vec2> centers;
  double radius = 0.0;
  int n_modes = 0;
  int n_quad = 0;

  int n_bubbles() const { return static_cast<int>(centers.size()); }
  double bubble_area() const { return kPi * radius * radius; }
};

struct BoundaryNode {
  Vec2 point;
  Vec2 normal;  // outward
  double weight = 0.0;
  double angle = 0.0;
  int bubble = 0;
  int local = 0;
};

/// Equispaced Nystrom nodes with trapezoid weights on every circle, bubble-major ordering.
class BoundaryBasis {
 public:
  BoundaryBasis(const Lattice& lattice, const BubbleDimer& dimer);

  const Lattice& lattice() const { return lattice_; }
  const BubbleDimer& dimer() const { return dimer_; }
  const std::vector<BoundaryNode>& nodes() const { return nodes_; }
  const BoundaryNode& node(int i) const { return nodes_[i]; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int n_bubbles() const { return dimer_.n_bubbles(); }
  int n_quad() const { return dimer_.n_quad; }
  double radius() const { return dimer_.radius; }
  int index(int bubble, int local) const { return bubble * dimer_.n_quad + local; }

  /// Fourier indices -N..N used for diagnostics.
  std::vector<int> modes() const;
  /// Row b holds (1/2pi R) * integral over circle b of density * e^{-i n theta}, for n = -N..N.
  CMatrix mode_coefficients(const CVector& density) const;
  /// Integral of a density over one bubble boundary.
  cplx integrate(const CVector& density, int bubble) const;

 private:
  Lattice lattice_;
  BubbleDimer dimer_;
  std::vector<BoundaryNode> nodes_;
};

struct DimerGeometry {
  BubbleDimer dimer;
  BoundaryBasis basis;
};

/// Builds the bubble configuration and its node set; rejects touching bubbles and
/// n_quad below 4N+4 or odd.
DimerGeometry make_dimer(const Lattice& lattice, double R, int n_modes = 6, int n_quad = 64);

/// Ones on the nodes of bubble j (1-based), zeros elsewhere.
CVector indicator_rhs(const BoundaryBasis& basis, int j);

/// Honeycomb: perm[i] is the node index of R3 applied to node i.
std::vector<int> r3_permutation(const BoundaryBasis& basis);

}  // namespace bubbly
