#include <cmath>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include "bubbly/special.hpp"
#include "bubbly/types.hpp"

using namespace bubbly;

TEST(Special, E1MatchesReference) {
  for (double x : {1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 60.0}) {
    const double ref = boost::math::expint(1, x);
    EXPECT_NEAR(special::expint_e1(x), ref, 1e-14 * std::abs(ref)) << x;
  }
}

TEST(Special, EinSeriesAndLargeArgument) {
  for (double x : {0.0, 1e-10, 1e-4, 0.3, 1.0, 3.0, 10.0, 40.0}) {
    double ref = 0.0;
    if (x < 2.0) {
      double term = 1.0;
      for (int k = 1; k < 60; ++k) {
        term *= -x / k;
        ref -= term / k;
      }
    } else {
      ref = boost::math::expint(1, x) + std::log(x) + kEulerGamma;
    }
    EXPECT_NEAR(special::ein(x), ref, 1e-14 * std::max(1.0, std::abs(ref))) << x;
  }
}

TEST(Special, ExpintTableMatchesOrders) {
  for (double x : {1e-3, 0.2, 1.7, 4.5, 9.0, 25.0}) {
    std::vector<double> table(12);
    special::expint_table(x, table);
    EXPECT_NEAR(table[0], std::exp(-x) / x, 1e-15 * table[0]);
    for (int n = 1; n < 12; ++n) {
      const double ref = boost::math::expint(n, x);
      EXPECT_NEAR(table[n], ref, 1e-13 * ref) << "n=" << n << " x=" << x;
    }
  }
}

TEST(Special, ExpintTableAtZero) {
  std::vector<double> table(5);
  special::expint_table(0.0, table);
  EXPECT_TRUE(std::isinf(table[0]));
  EXPECT_TRUE(std::isinf(table[1]));
  for (int n = 2; n < 5; ++n) EXPECT_DOUBLE_EQ(table[n], 1.0 / (n - 1));
}

// The weights integrate log(4 sin^2((t - s)/2)) e^{i n s} exactly for |n| < m:
// the result is -2 pi e^{i n t} / |n| for n != 0 and 0 for n = 0.
TEST(Special, KressWeightsIntegrateLogKernel) {
  const int m = 16;
  const double t = 0.7;
  for (int n = -m + 1; n < m; ++n) {
    cplx sum = 0.0;
    for (int j = 0; j < 2 * m; ++j) {
      const double tj = kPi * j / m;
      sum += special::kress_weight(m, t - tj) * std::exp(kI * static_cast<double>(n) * tj);
    }
    const cplx ref = n == 0 ? cplx(0.0) : -kTwoPi / std::abs(n) * std::exp(kI * static_cast<double>(n) * t);
    EXPECT_LT(std::abs(sum - ref), 1e-12) << n;
  }
}
