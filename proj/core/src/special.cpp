#include "bubbly/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bubbly/types.hpp"

namespace bubbly::special {
namespace {

// Alternating series sum_{k>=1} (-1)^{k+1} x^k / (k k!), accurate for x <= 2.
double ein_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= x / k;
    const double add = (k % 2 == 1 ? term : -term) / k;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz continued fraction for E_n, n >= 1, x > 1.
double en_continued_fraction(int n, double x) {
  constexpr double tiny = 1e-300;
  double b = x + n;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

double e1_continued_fraction(double x) { return en_continued_fraction(1, x); }

}  // namespace

double expint_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1: argument must be positive");
  if (x <= 1.0) return ein_series(x) - std::log(x) - kEulerGamma;
  return e1_continued_fraction(x);
}

double ein(double x) {
  if (x < 0.0) throw std::domain_error("ein: argument must be nonnegative");
  if (x <= 2.0) return ein_series(x);
  return e1_continued_fraction(x) + std::log(x) + kEulerGamma;
}

void expint_table(double x, std::span<double> out) {
  if (out.empty()) return;
  const double inf = std::numeric_limits<double>::infinity();
  if (x == 0.0) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = n < 2 ? inf : 1.0 / (n - 1.0);
    return;
  }
  const double ex = std::exp(-x);
  out[0] = ex / x;
  if (out.size() == 1) return;
  const std::size_t top = out.size() - 1;
  if (x <= 1.0) {
    // Upward recurrence amplifies errors by x / n <= 1 here.
    out[1] = expint_e1(x);
    for (std::size_t n = 1; n < top; ++n) out[n + 1] = (ex - x * out[n]) / n;
    return;
  }
  // Start at the order nearest x: downward steps amplify by n / x < 1, upward steps by x / n < 1.
  const std::size_t m = std::min(top, static_cast<std::size_t>(x));
  out[m] = en_continued_fraction(static_cast<int>(m), x);
  for (std::size_t n = m; n > 1; --n) out[n - 1] = (ex - (n - 1.0) * out[n]) / x;
  for (std::size_t n = m; n < top; ++n) out[n + 1] = (ex - x * out[n]) / n;
}

double kress_weight(int m, double s) {
  double sum = 0.0;
  for (int p = 1; p < m; ++p) sum += std::cos(p * s) / p;
  return -(kTwoPi / m) * sum - (kPi / (static_cast<double>(m) * m)) * std::cos(m * s);
}

}  // namespace bubbly::special
