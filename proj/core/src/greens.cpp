#include "bubbly/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bubbly/special.hpp"

namespace bubbly {

const char* to_string(GreensMethod method) {
  return method == GreensMethod::Spectral ? "spectral" : "ewald";
}

GreensMethod greens_method_from_string(const std::string& name) {
  if (name == "spectral") return GreensMethod::Spectral;
  if (name == "ewald") return GreensMethod::Ewald;
  throw std::invalid_argument("unknown greens method: " + name);
}

namespace {

constexpr double kResonanceGuard = 1e-12;
constexpr double kSingularGuard = 1e-10;
constexpr int kMaxOrders = 60;

void require_nonzero_alpha(const Lattice& lattice, const Vec2& alpha) {
  if (distance_to_dual_lattice(lattice, alpha) < 1e-12 * kTwoPi / lattice.L)
    throw std::invalid_argument("quasi-momentum equivalent to zero is not supported");
}

// Integer box that contains every m l1 + n l2 (or m a1 + n a2) of norm <= radius.
int index_bound(double radius, const Vec2& dual_of_axis) {
  return static_cast<int>(std::ceil(radius * dual_of_axis.norm() / kTwoPi)) + 1;
}

}  // namespace

EwaldSum::EwaldSum(const Lattice& lattice, const Vec2& alpha, double k_max, const EwaldOptions& options)
    : lattice_(lattice), alpha_(alpha), k_max_(k_max) {
  if (!(k_max >= 0.0)) throw std::invalid_argument("k_max must be nonnegative");
  if (!(options.tolerance > 0.0 && options.tolerance < 1.0)) throw std::invalid_argument("tolerance must lie in (0,1)");
  require_nonzero_alpha(lattice, alpha);
  eta_ = options.split > 0.0 ? options.split : std::sqrt(kPi) / lattice.L;
  const double log_tol = -std::log(options.tolerance);
  const double kk = k_max * k_max / (4.0 * eta_ * eta_);

  // Orders: (k^2/4eta^2)^J / J! below tolerance; E_{J+1} <= 1/J.
  n_orders_ = 2;
  {
    double term = 1.0;
    for (int j = 1; j < kMaxOrders; ++j) {
      term *= kk / j;
      n_orders_ = std::max(n_orders_, j + 1);
      if (term / j < options.tolerance) break;
    }
  }

  real_cut_ = options.real_shells > 0 ? options.real_shells * lattice.L
                                      : std::sqrt(log_tol + kk + 2.0) / eta_;
  const double image_radius = real_cut_ + lattice.L;
  const int mb = index_bound(image_radius, lattice.a1);
  const int nb = index_bound(image_radius, lattice.a2);
  for (int m = -mb; m <= mb; ++m) {
    for (int n = -nb; n <= nb; ++n) {
      const Vec2 l = lattice.point(m, n);
      if (l.norm() <= image_radius) {
        images_.push_back(l);
        image_phase_.push_back(std::exp(kI * alpha.dot(l)));
      }
    }
  }

  const double p_cut = options.recip_shells > 0
                           ? options.recip_shells * kTwoPi / lattice.L
                           : std::sqrt(k_max * k_max + 4.0 * eta_ * eta_ * (log_tol + 2.0));
  const double q_radius = p_cut + alpha.norm();
  const int qm = index_bound(q_radius, lattice.l1);
  const int qn = index_bound(q_radius, lattice.l2);
  for (int m = -qm; m <= qm; ++m) {
    for (int n = -qn; n <= qn; ++n) {
      const Vec2 p = alpha + lattice.dual_point(m, n);
      if (p.norm() <= p_cut) recip_.push_back(p);
    }
  }
}

void EwaldSum::check_k(double k) const {
  if (!(k >= 0.0) || k > k_max_ * (1.0 + 1e-12))
    throw std::invalid_argument("wavenumber outside the range this Ewald table was built for");
}

double EwaldSum::real_coeff(double k, int j) const {
  const double x = k * k / (4.0 * eta_ * eta_);
  double c = -1.0 / (4.0 * kPi);
  for (int i = 1; i <= j; ++i) c *= x / i;
  return c;
}

std::vector<cplx> EwaldSum::recip_weights(double k) const {
  check_k(k);
  std::vector<cplx> w(recip_.size());
  const double four_eta2 = 4.0 * eta_ * eta_;
  for (std::size_t i = 0; i < recip_.size(); ++i) {
    const double d = k * k - recip_[i].squaredNorm();
    if (std::abs(d) < kResonanceGuard) throw ResonanceError("k^2 resonates with |alpha+q|^2");
    w[i] = std::exp(d / four_eta2) / (lattice_.cell_area * d);
  }
  return w;
}

void EwaldSum::real_terms(const Vec2& x, bool regular, cplx* val, CVec2* grad) const {
  const Eigen::Vector2i ip = lattice_.nearest_point(x);
  const Vec2 l0 = lattice_.point(ip.x(), ip.y());
  // Far from the origin the log term is subtracted after the plain sum.
  const bool subtract_after = regular && (ip.x() != 0 || ip.y() != 0);
  if (subtract_after) regular = false;
  const Vec2 xr = x - l0;
  const cplx phase0 = std::exp(kI * alpha_.dot(l0));
  const double eta2 = eta_ * eta_;
  const double cut2 = real_cut_ * real_cut_;

  for (int j = 0; j < n_orders_; ++j) {
    val[j] = 0.0;
    grad[j].setZero();
  }
  std::array<double, kMaxOrders + 1> table{};
  const std::span<double> e(table.data(), n_orders_ + 1);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const Vec2 d = xr - images_[i];
    const double r2 = d.squaredNorm();
    if (r2 > cut2) continue;
    const double z = r2 * eta2;
    const cplx ph = image_phase_[i];
    const bool origin = images_[i].x() == 0.0 && images_[i].y() == 0.0;
    if (regular && origin) {
      special::expint_table(z, e);
      val[0] += special::ein(z) - kEulerGamma - 2.0 * std::log(eta_);
      const double ratio = z > 0.0 ? -std::expm1(-z) / z : 1.0;
      grad[0] += CVec2((2.0 * eta2 * ratio) * d.cast<cplx>());
      for (int j = 1; j < n_orders_; ++j) {
        val[j] += e[j + 1];
        if (z > 0.0) grad[j] += CVec2((-e[j] * 2.0 * eta2) * d.cast<cplx>());
      }
      continue;
    }
    special::expint_table(z, e);
    for (int j = 0; j < n_orders_; ++j) {
      val[j] += ph * e[j + 1];
      grad[j] += CVec2((ph * (-e[j] * 2.0 * eta2)) * d.cast<cplx>());
    }
  }
  for (int j = 0; j < n_orders_; ++j) {
    val[j] *= phase0;
    grad[j] *= phase0;
  }
  if (subtract_after) {
    // -(1/4pi) * 2 log|x| = -(1/2pi) log|x|
    val[0] += 2.0 * std::log(x.norm());
    grad[0] += (2.0 / x.squaredNorm()) * x.cast<cplx>();
  }
}

GreenValue EwaldSum::evaluate(double k, const std::vector<cplx>& w, const Vec2& x, bool regular) const {
  check_k(k);
  if (w.size() != recip_.size()) throw std::invalid_argument("reciprocal weight table has the wrong size");
  if (regular) {
    const Eigen::Vector2i ip = lattice_.nearest_point(x);
    if ((ip.x() != 0 || ip.y() != 0) && lattice_.distance_to_lattice(x) <= kSingularGuard * lattice_.L)
      throw SingularPointError("evaluation point lies on a nonzero lattice point");
  }
  if (!regular && lattice_.distance_to_lattice(x) <= kSingularGuard * lattice_.L)
    throw SingularPointError("evaluation point lies on the source lattice");
  std::array<cplx, kMaxOrders> val{};
  std::array<CVec2, kMaxOrders> grad{};
  real_terms(x, regular, val.data(), grad.data());
  GreenValue out;
  for (int j = 0; j < n_orders_; ++j) {
    const double c = real_coeff(k, j);
    out.value += c * val[j];
    out.grad += c * grad[j];
  }
  for (std::size_t i = 0; i < recip_.size(); ++i) {
    const cplx t = w[i] * std::exp(kI * recip_[i].dot(x));
    out.value += t;
    out.grad += (kI * t) * recip_[i].cast<cplx>();
  }
  return out;
}

GreenValue EwaldSum::eval(double k, const Vec2& x) const { return evaluate(k, recip_weights(k), x, false); }

GreenValue EwaldSum::eval_regular(double k, const Vec2& x) const {
  return evaluate(k, recip_weights(k), x, true);
}

cplx EwaldSum::static_correction(const Vec2& x) const {
  std::array<cplx, kMaxOrders> val{};
  std::array<CVec2, kMaxOrders> grad{};
  const bool at_origin_cell = x.norm() < 0.5 * lattice_.L;
  // The regular variant avoids the infinite E_1 at lattice points; only order 1 is used.
  real_terms(x, at_origin_cell, val.data(), grad.data());
  const double four_eta2 = 4.0 * eta_ * eta_;
  cplx out = -val[1] / (4.0 * kPi * four_eta2);
  for (const Vec2& p : recip_) {
    const double p2 = p.squaredNorm();
    const double f = std::exp(-p2 / four_eta2) * (-1.0 / (four_eta2 * p2) - 1.0 / (p2 * p2));
    out += f * std::exp(kI * p.dot(x)) / lattice_.cell_area;
  }
  return out;
}

namespace {

struct SeriesTerm {
  cplx t;
  cplx dt;
};

// Closed form of sum_m e^{i m theta} / ((m+a)^2 + c^2) and its theta-derivative, 0 <= theta < 2pi.
SeriesTerm inner_sum_raw(double theta, double a, cplx c) {
  const cplx e2 = std::exp(-kTwoPi * c);
  const cplx ph_minus = std::exp(-kI * kTwoPi * a);
  const cplx ph_plus = std::exp(kI * kTwoPi * a);
  const cplx lead = (kPi / c) * std::exp(-kI * a * theta);
  const cplx first = std::exp(-c * theta) / (1.0 - e2 * ph_minus);
  const cplx second = std::exp(-c * (kTwoPi - theta)) * ph_plus / (1.0 - e2 * ph_plus);
  SeriesTerm out;
  out.t = lead * (first + second);
  out.dt = lead * ((-kI * a - c) * first + (-kI * a + c) * second);
  return out;
}

SeriesTerm inner_sum(double theta, double a, double c2) {
  const auto root = [](double s) { return s >= 0.0 ? cplx(std::sqrt(s), 0.0) : cplx(0.0, std::sqrt(-s)); };
  if (std::abs(c2) >= 1e-12) return inner_sum_raw(theta, a, root(c2));
  // The closed form cancels as c -> 0; it is analytic in c^2, so interpolate linearly in c^2.
  const double s1 = 1e-6;
  const double s2 = 4e-6;
  const SeriesTerm f1 = inner_sum_raw(theta, a, root(s1));
  const SeriesTerm f2 = inner_sum_raw(theta, a, root(s2));
  const double w = (c2 - s1) / (s2 - s1);
  return {f1.t + w * (f2.t - f1.t), f1.dt + w * (f2.dt - f1.dt)};
}

}  // namespace

SpectralDetail green_spectral(const GreensParams& params, const Vec2& x) {
  const Lattice& lat = params.lattice;
  const Vec2& alpha = params.alpha.alpha;
  const double k = params.k;
  if (!(k >= 0.0)) throw std::invalid_argument("wavenumber must be nonnegative");
  require_nonzero_alpha(lat, alpha);
  if (lat.distance_to_lattice(x) <= kSingularGuard * lat.L)
    throw SingularPointError("evaluation point lies on the source lattice");

  const Eigen::Vector2i ip = lat.nearest_point(x);
  const Vec2 l0 = lat.point(ip.x(), ip.y());
  const Vec2 xr = x - l0;
  const cplx phase0 = std::exp(kI * alpha.dot(l0));

  // Inner direction u is summed exactly; pick the one with the fastest outer decay.
  const std::array<std::pair<Vec2, Vec2>, 4> bases = {{{lat.a1, lat.a2},
                                                       {lat.a2, lat.a1},
                                                       {lat.a1 + lat.a2, lat.a2},
                                                       {lat.a1 - lat.a2, lat.a2}}};
  const double dual_area = lat.dual_cell_area();
  Vec2 u = bases[0].first;
  Vec2 w = bases[0].second;
  double best_rate = -1.0;
  for (const auto& [cu, cw] : bases) {
    double th = std::fmod(cu.dot(xr), kTwoPi);
    if (th < 0.0) th += kTwoPi;
    const double rate = dual_area * std::min(th, kTwoPi - th) / cu.squaredNorm();
    if (rate > best_rate) {
      best_rate = rate;
      u = cu;
      w = cw;
    }
  }
  const double u2 = u.squaredNorm();
  double theta = std::fmod(u.dot(xr), kTwoPi);
  if (theta < 0.0) theta += kTwoPi;

  const cplx pref = -1.0 / (lat.cell_area * u2);
  const auto term = [&](int n, GreenValue& acc) {
    const Vec2 p = alpha + n * w;
    const double a = p.dot(u) / u2;
    const Vec2 b = p - a * u;
    const double c2 = (b.squaredNorm() - k * k) / u2;
    // Resonance: some m makes (m+a)^2 + c^2 vanish.
    const double m_near = std::round(a);
    if (std::abs(u2 * ((m_near - a) * (m_near - a) + c2)) < kResonanceGuard)
      throw ResonanceError("k^2 resonates with |alpha+q|^2");
    const SeriesTerm s = inner_sum(theta, a, c2);
    const cplx e = pref * std::exp(kI * p.dot(xr));
    const CVec2 g = e * (kI * s.t * p.cast<cplx>() + s.dt * u.cast<cplx>());
    acc.value += e * s.t;
    acc.grad += g;
    return std::max(std::abs(e * s.t), g.norm());
  };

  SpectralDetail out;
  GreenValue acc;
  term(0, acc);
  const int cap = 200000;
  const int fixed = params.spectral_radius;
  const double wperp = std::abs(u.x() * w.y() - u.y() * w.x()) / std::sqrt(u2);
  int quiet = 0;
  int n = 1;
  for (; n <= (fixed > 0 ? fixed : cap); ++n) {
    const double mag = std::max(term(n, acc), term(-n, acc));
    if (fixed > 0) continue;
    const double scale = std::max(std::abs(acc.value), acc.grad.norm());
    // Terms decay monotonically only once |b_n| exceeds k.
    const bool evanescent = n * wperp > k + wperp;
    quiet = (evanescent && mag <= params.tolerance * std::max(scale, 1e-300)) ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  out.radius_used = fixed > 0 ? fixed : std::min(n, cap);
  out.value.value = phase0 * acc.value;
  out.value.grad = phase0 * acc.grad;
  return out;
}

GreenValue green_value(const GreensParams& params, const Vec2& x) {
  if (params.method == GreensMethod::Spectral) return green_spectral(params, x).value;
  EwaldOptions opts;
  opts.split = params.ewald_split;
  opts.real_shells = params.ewald_real_shells;
  opts.recip_shells = params.ewald_recip_shells;
  opts.tolerance = params.tolerance;
  const EwaldSum sum(params.lattice, params.alpha.alpha, params.k, opts);
  return sum.eval(params.k, x);
}

cplx green(const GreensParams& params, const Vec2& x) { return green_value(params, x).value; }

CVec2 green_grad(const GreensParams& params, const Vec2& x) { return green_value(params, x).grad; }

cplx green_static_correction(const Lattice& lattice, const QuasiMomentum& alpha, const Vec2& x) {
  const EwaldSum sum(lattice, alpha.alpha, 0.0);
  return sum.static_correction(x);
}

}  // namespace bubbly
