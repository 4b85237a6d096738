#pragma once

#include <string>
#include <vector>

#include "bubbly/types.hpp"

namespace bubbly {

enum class LatticeKind { Honeycomb, Square };

const char* to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& name);

/// Direct basis l1, l2 and dual basis a1, a2 with a_i . l_j = 2 pi delta_ij.
struct Lattice {
  LatticeKind kind = LatticeKind::Honeycomb;
  double L = 1.0;
  Vec2 l1, l2;
  Vec2 a1, a2;
  double cell_area = 0.0;

  Vec2 point(double m, double n) const { return m * l1 + n * l2; }
  Vec2 dual_point(double m, double n) const { return m * a1 + n * a2; }
  double dual_cell_area() const { return kTwoPi * kTwoPi / cell_area; }

  /// Fractional coordinates (s, t) with x = s l1 + t l2.
  Vec2 fractional(const Vec2& x) const;
  /// Nearest lattice point to x, as integer coordinates.
  Eigen::Vector2i nearest_point(const Vec2& x) const;
  /// Distance from x to the closest point of the direct lattice.
  double distance_to_lattice(const Vec2& x) const;
};

Lattice make_lattice(LatticeKind kind, double L);

struct QuasiMomentum {
  Vec2 alpha = Vec2::Zero();
};

/// Reduces alpha into {s a1 + t a2 : 0 <= s, t < 1}.
QuasiMomentum reduce_to_zone(const Lattice& lattice, const QuasiMomentum& q);

/// Distance from alpha to the dual lattice; zero means alpha is equivalent to Gamma.
double distance_to_dual_lattice(const Lattice& lattice, const Vec2& alpha);

QuasiMomentum gamma_point(const Lattice& lattice);
/// Honeycomb: (2 a1 + a2)/3. Square: (pi/L, pi/L).
QuasiMomentum dirac_point(const Lattice& lattice);
/// Honeycomb: (a1 + 2 a2)/3.
QuasiMomentum second_dirac_point(const Lattice& lattice);
/// Honeycomb: (a1 + a2)/2, midpoint of the hexagon edge through K. Square: (pi/L, pi/L).
QuasiMomentum m_point(const Lattice& lattice);
/// Square: (pi/L, 0). Honeycomb: same as m_point.
QuasiMomentum x_point(const Lattice& lattice);

struct PathSamples {
  std::vector<QuasiMomentum> points;
  std::vector<double> arclength;
  /// Index into points of each waypoint.
  std::vector<std::size_t> waypoint_index;
};

PathSamples bz_path(const std::vector<QuasiMomentum>& waypoints, int n_per_segment);

enum class SymmetryTag { R0, R1, R2, R3 };

/// Affine map x -> matrix x + offset.
struct SymmetryOp {
  SymmetryTag tag = SymmetryTag::R0;
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Identity();
  Vec2 offset = Vec2::Zero();
};

/// Honeycomb only. R0: point reflection through x0. R1, R2: rotations by -2pi/3
/// about x1, x2. R3: reflection across the vertical line through x0.
SymmetryOp symmetry_op(const Lattice& lattice, SymmetryTag tag);

Vec2 apply_symmetry(const SymmetryOp& op, const Vec2& x);

/// Honeycomb reference points x0 = (l1+l2)/2, x1 = (l1+l2)/3, x2 = 2(l1+l2)/3.
Vec2 cell_center(const Lattice& lattice);
Vec2 honeycomb_x1(const Lattice& lattice);
Vec2 honeycomb_x2(const Lattice& lattice);

}  // namespace bubbly
