#pragma once

#include <cmath>
#include <random>

#include "bubbly/homogenize.hpp"

namespace bubbly::testing {

inline const Lattice& honeycomb() {
  static const Lattice lat = make_lattice(LatticeKind::Honeycomb, 1.0);
  return lat;
}

inline const Lattice& square() {
  static const Lattice lat = make_lattice(LatticeKind::Square, 1.0);
  return lat;
}

/// R = 0.2, N = 6, 64 nodes per circle.
inline const BoundaryBasis& honeycomb_basis() {
  static const DimerGeometry geo = make_dimer(honeycomb(), 0.2);
  return geo.basis;
}

inline const BoundaryBasis& square_basis() {
  static const DimerGeometry geo = make_dimer(square(), 0.2);
  return geo.basis;
}

inline Material material_with_delta(double delta) {
  Material m;
  m.rho = m.kappa = 1.0 / delta;
  return m;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Uniform point of the quasi-momentum zone, kept at least `margin` (relative) away from Gamma.
inline Vec2 random_alpha(std::mt19937_64& rng, const Lattice& lat, double margin = 0.05) {
  std::uniform_real_distribution<double> u(margin, 1.0 - margin);
  return lat.dual_point(u(rng), u(rng));
}

inline Vec2 unit_dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace bubbly::testing
