#include "bubbly/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bubbly {

const char* to_string(LatticeKind kind) {
  return kind == LatticeKind::Honeycomb ? "honeycomb" : "square";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
  if (name == "honeycomb") return LatticeKind::Honeycomb;
  if (name == "square") return LatticeKind::Square;
  throw std::invalid_argument("unknown lattice kind: " + name);
}

Lattice make_lattice(LatticeKind kind, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("lattice constant must be positive");
  Lattice lat;
  lat.kind = kind;
  lat.L = L;
  if (kind == LatticeKind::Honeycomb) {
    lat.l1 = L * Vec2(std::sqrt(3.0) / 2.0, 0.5);
    lat.l2 = L * Vec2(std::sqrt(3.0) / 2.0, -0.5);
  } else {
    lat.l1 = L * Vec2(1.0, 0.0);
    lat.l2 = L * Vec2(0.0, 1.0);
  }
  // Rows of the dual matrix D satisfy D * [l1 l2] = 2 pi I.
  Eigen::Matrix2d direct;
  direct.col(0) = lat.l1;
  direct.col(1) = lat.l2;
  const Eigen::Matrix2d dual = kTwoPi * direct.inverse();
  lat.a1 = dual.row(0).transpose();
  lat.a2 = dual.row(1).transpose();
  lat.cell_area = std::abs(lat.l1.x() * lat.l2.y() - lat.l1.y() * lat.l2.x());
  return lat;
}

Vec2 Lattice::fractional(const Vec2& x) const {
  return Vec2(a1.dot(x), a2.dot(x)) / kTwoPi;
}

Eigen::Vector2i Lattice::nearest_point(const Vec2& x) const {
  const Vec2 f = fractional(x);
  const int m0 = static_cast<int>(std::floor(f.x()));
  const int n0 = static_cast<int>(std::floor(f.y()));
  Eigen::Vector2i best(m0, n0);
  double best_d = std::numeric_limits<double>::infinity();
  for (int dm = -1; dm <= 2; ++dm) {
    for (int dn = -1; dn <= 2; ++dn) {
      const double d = (x - point(m0 + dm, n0 + dn)).norm();
      if (d < best_d) {
        best_d = d;
        best = Eigen::Vector2i(m0 + dm, n0 + dn);
      }
    }
  }
  return best;
}

double Lattice::distance_to_lattice(const Vec2& x) const {
  const Eigen::Vector2i p = nearest_point(x);
  return (x - point(p.x(), p.y())).norm();
}

QuasiMomentum reduce_to_zone(const Lattice& lattice, const QuasiMomentum& q) {
  Vec2 f = Vec2(lattice.l1.dot(q.alpha), lattice.l2.dot(q.alpha)) / kTwoPi;
  f.x() -= std::floor(f.x());
  f.y() -= std::floor(f.y());
  // Guard against f == 1 after rounding.
  if (f.x() >= 1.0) f.x() = 0.0;
  if (f.y() >= 1.0) f.y() = 0.0;
  return {lattice.dual_point(f.x(), f.y())};
}

double distance_to_dual_lattice(const Lattice& lattice, const Vec2& alpha) {
  const Vec2 f = Vec2(lattice.l1.dot(alpha), lattice.l2.dot(alpha)) / kTwoPi;
  const double m0 = std::floor(f.x());
  const double n0 = std::floor(f.y());
  double best = std::numeric_limits<double>::infinity();
  for (int dm = -1; dm <= 2; ++dm)
    for (int dn = -1; dn <= 2; ++dn)
      best = std::min(best, (alpha - lattice.dual_point(m0 + dm, n0 + dn)).norm());
  return best;
}

QuasiMomentum gamma_point(const Lattice&) { return {Vec2::Zero()}; }

QuasiMomentum dirac_point(const Lattice& lattice) {
  if (lattice.kind == LatticeKind::Square) return {Vec2(kPi / lattice.L, kPi / lattice.L)};
  return {(2.0 * lattice.a1 + lattice.a2) / 3.0};
}

QuasiMomentum second_dirac_point(const Lattice& lattice) {
  if (lattice.kind == LatticeKind::Square) return dirac_point(lattice);
  return {(lattice.a1 + 2.0 * lattice.a2) / 3.0};
}

QuasiMomentum m_point(const Lattice& lattice) {
  if (lattice.kind == LatticeKind::Square) return {Vec2(kPi / lattice.L, kPi / lattice.L)};
  return {(lattice.a1 + lattice.a2) / 2.0};
}

QuasiMomentum x_point(const Lattice& lattice) {
  if (lattice.kind == LatticeKind::Square) return {Vec2(kPi / lattice.L, 0.0)};
  return m_point(lattice);
}

PathSamples bz_path(const std::vector<QuasiMomentum>& waypoints, int n_per_segment) {
  if (waypoints.size() < 2) throw std::invalid_argument("bz_path needs at least two waypoints");
  if (n_per_segment < 1) throw std::invalid_argument("bz_path needs n_per_segment >= 1");
  PathSamples out;
  out.points.push_back(waypoints.front());
  out.arclength.push_back(0.0);
  out.waypoint_index.push_back(0);
  double s = 0.0;
  for (std::size_t w = 0; w + 1 < waypoints.size(); ++w) {
    const Vec2 a = waypoints[w].alpha;
    const Vec2 b = waypoints[w + 1].alpha;
    const double seg = (b - a).norm();
    for (int i = 1; i <= n_per_segment; ++i) {
      const double t = static_cast<double>(i) / n_per_segment;
      out.points.push_back({i == n_per_segment ? b : Vec2(a + t * (b - a))});
      out.arclength.push_back(s + t * seg);
    }
    s += seg;
    out.waypoint_index.push_back(out.points.size() - 1);
  }
  return out;
}

Vec2 cell_center(const Lattice& lattice) { return (lattice.l1 + lattice.l2) / 2.0; }
Vec2 honeycomb_x1(const Lattice& lattice) { return (lattice.l1 + lattice.l2) / 3.0; }
Vec2 honeycomb_x2(const Lattice& lattice) { return 2.0 * (lattice.l1 + lattice.l2) / 3.0; }

SymmetryOp symmetry_op(const Lattice& lattice, SymmetryTag tag) {
  if (lattice.kind != LatticeKind::Honeycomb)
    throw std::invalid_argument("symmetry operators are defined for the honeycomb lattice");
  SymmetryOp op;
  op.tag = tag;
  const double c = std::cos(-kTwoPi / 3.0);
  const double s = std::sin(-kTwoPi / 3.0);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const Vec2 x0 = cell_center(lattice);
  switch (tag) {
    case SymmetryTag::R0:
      op.matrix = -Eigen::Matrix2d::Identity();
      op.offset = 2.0 * x0;
      break;
    case SymmetryTag::R1:
      op.matrix = rot;
      op.offset = lattice.l1;
      break;
    case SymmetryTag::R2:
      op.matrix = rot;
      op.offset = 2.0 * lattice.l1;
      break;
    case SymmetryTag::R3:
      op.matrix << -1.0, 0.0, 0.0, 1.0;
      op.offset = Vec2(2.0 * x0.x(), 0.0);
      break;
  }
  return op;
}

Vec2 apply_symmetry(const SymmetryOp& op, const Vec2& x) { return op.matrix * x + op.offset; }

}  // namespace bubbly
