#pragma once

#include <stdexcept>
#include <vector>

#include "bubbly/lattice.hpp"

namespace bubbly {

/// Thrown when k^2 comes within 1e-12 of some |alpha+q|^2.
class ResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the evaluation point lies on the source lattice.
class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GreensMethod { Spectral, Ewald };

const char* to_string(GreensMethod method);
GreensMethod greens_method_from_string(const std::string& name);

/// Parameters of G^{alpha,k}. Zero-valued truncations select automatic choices.
struct GreensParams {
  Lattice lattice;
  QuasiMomentum alpha;
  double k = 0.0;
  GreensMethod method = GreensMethod::Ewald;
  /// Spectral: cutoff on the outer dual-lattice index after the inner sum is done in closed form.
  int spectral_radius = 0;
  /// Ewald splitting parameter; 0 means sqrt(pi)/L.
  double ewald_split = 0.0;
  /// Ewald real-space and reciprocal shell radii in units of L and 2pi/L.
  int ewald_real_shells = 0;
  int ewald_recip_shells = 0;
  /// Target magnitude of the first neglected term.
  double tolerance = 1e-15;
};

struct GreenValue {
  cplx value{0.0, 0.0};
  CVec2 grad = CVec2::Zero();
};

/// G^{alpha,k}(x) = (1/|Y|) sum_q exp(i(alpha+q).x) / (k^2 - |alpha+q|^2).
cplx green(const GreensParams& params, const Vec2& x);
CVec2 green_grad(const GreensParams& params, const Vec2& x);
GreenValue green_value(const GreensParams& params, const Vec2& x);

/// k^2-coefficient of the small-k expansion: -(1/|Y|) sum_q exp(i(alpha+q).x) / |alpha+q|^4,
/// so that (G^{alpha,k} - G^{alpha,0}) / k^2 -> this value as k -> 0.
cplx green_static_correction(const Lattice& lattice, const QuasiMomentum& alpha, const Vec2& x);

struct SpectralDetail {
  GreenValue value;
  int radius_used = 0;
};

/// Spectral evaluation: the inner dual-lattice index is summed in closed form, the outer one is
/// truncated at params.spectral_radius (or adaptively when it is 0).
SpectralDetail green_spectral(const GreensParams& params, const Vec2& x);

struct EwaldOptions {
  double split = 0.0;
  int real_shells = 0;
  int recip_shells = 0;
  double tolerance = 1e-15;
};

/// Ewald splitting for fixed (lattice, alpha), valid for 0 <= k <= k_max.
///
/// G = -(1/4pi) sum_l e^{i alpha.l} sum_j (k/2eta)^{2j}/j! E_{j+1}(|x-l|^2 eta^2)
///     + (1/|Y|) sum_q e^{i p.x} e^{(k^2-p^2)/(4eta^2)} / (k^2-p^2),  p = alpha+q.
class EwaldSum {
 public:
  EwaldSum(const Lattice& lattice, const Vec2& alpha, double k_max, const EwaldOptions& options = {});

  GreenValue eval(double k, const Vec2& x) const;
  /// G - log|x|/(2pi) and its gradient; finite at x = 0.
  GreenValue eval_regular(double k, const Vec2& x) const;
  cplx static_correction(const Vec2& x) const;

  const Lattice& lattice() const { return lattice_; }
  const Vec2& alpha() const { return alpha_; }
  double split() const { return eta_; }
  double k_max() const { return k_max_; }
  int n_orders() const { return n_orders_; }
  std::size_t n_images() const { return images_.size(); }

  /// -(1/4pi) (k/2eta)^{2j} / j!
  double real_coeff(double k, int j) const;
  /// val[j] = sum_l e^{i alpha.l} E_{j+1}(z_l), grad[j] = its gradient, for j < n_orders().
  /// With regular set, the l = 0, j = 0 contribution is replaced by its log-subtracted form.
  void real_terms(const Vec2& x, bool regular, cplx* val, CVec2* grad) const;

  /// alpha + q for the retained reciprocal vectors.
  const std::vector<Vec2>& recip_vectors() const { return recip_; }
  /// e^{(k^2-p^2)/(4eta^2)} / (|Y| (k^2-p^2)) for each retained p; throws ResonanceError.
  std::vector<cplx> recip_weights(double k) const;
  void check_k(double k) const;

  /// eval / eval_regular with reciprocal weights precomputed by recip_weights(k).
  GreenValue evaluate(double k, const std::vector<cplx>& weights, const Vec2& x, bool regular) const;

 private:

  Lattice lattice_;
  Vec2 alpha_;
  double k_max_;
  double eta_;
  double real_cut_;
  int n_orders_;
  std::vector<Vec2> images_;
  std::vector<cplx> image_phase_;
  std::vector<Vec2> recip_;
};

}  // namespace bubbly
