#pragma once

#include <span>

namespace bubbly::special {

/// Exponential integral E_1(x) for x > 0.
double expint_e1(double x);

/// Entire function Ein(x) = E_1(x) + log(x) + gamma, finite at x = 0.
double ein(double x);

/// Fills out[n] = E_n(x) for n = 0 .. out.size()-1.
/// E_0(x) = exp(-x)/x is left as +inf at x = 0, and E_1(0) likewise.
void expint_table(double x, std::span<double> out);

/// Trigonometric product-quadrature weight for the kernel log(4 sin^2(s/2))
/// on 2m equispaced nodes, evaluated at offset s = t - t_j.
double kress_weight(int m, double s);

}  // namespace bubbly::special
