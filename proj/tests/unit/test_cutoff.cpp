#include "rmtlab/cutoff.hpp"
#include "rmtlab/density.hpp"
#include "rmtlab/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rmtlab;

TEST(Cutoff, ValuesAndSupport) {
  EXPECT_EQ(cutoff_h(0.5), 0.0);
  EXPECT_EQ(cutoff_h(3.0), 1.0);
  EXPECT_NEAR(cutoff_h(1.5), 0.5, 1e-15);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(cutoff_h(0.9, k), 0.0);
    EXPECT_EQ(cutoff_h(2.1, k), 0.0);
  }
  double prev = 0.0;
  for (double x = 1.0; x <= 2.0; x += 0.01) {
    EXPECT_GE(cutoff_h(x), prev);
    prev = cutoff_h(x);
  }
}

TEST(Cutoff, DerivativeOracles) {
  EXPECT_NEAR(cutoff_h(1.25), 0.064969169128664062, 1e-14);
  EXPECT_NEAR(cutoff_h(1.5, 1), 2.0, 1e-12);
  EXPECT_NEAR(cutoff_h(1.3, 2), 6.7562698930600446, 1e-10);
  EXPECT_NEAR(cutoff_h(1.7, 3), -55.668474801295217, 1e-9);
  EXPECT_NEAR(cutoff_h(1.2, 4), -1671.6387182946605, 1e-7);
}

TEST(Cutoff, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (double x : {1.1, 1.37, 1.5, 1.82}) {
    for (int k = 1; k <= 4; ++k) {
      const double fd = (cutoff_h(x + h, k - 1) - cutoff_h(x - h, k - 1)) / (2.0 * h);
      EXPECT_NEAR(cutoff_h(x, k), fd, 1e-5 * std::max(1.0, std::abs(fd))) << x << " " << k;
    }
  }
}

TEST(Cutoff, EvenSymmetry) {
  for (double x : {1.2, 1.6}) {
    EXPECT_EQ(cutoff_h(-x), cutoff_h(x));
    EXPECT_EQ(cutoff_h(-x, 1), -cutoff_h(x, 1));
    EXPECT_EQ(cutoff_h(-x, 2), cutoff_h(x, 2));
  }
  EXPECT_THROW(cutoff_h(1.5, 5), InvalidArgument);
}

TEST(Cutoff, Chi) {
  EXPECT_EQ(cutoff_chi(0.3), 1.0);
  EXPECT_EQ(cutoff_chi(-0.5), 1.0);
  EXPECT_EQ(cutoff_chi(1.0), 0.0);
  EXPECT_NEAR(cutoff_chi(0.75), 0.5, 1e-15);
}

TEST(Cutoff, PhiMatchesLogInTheMiddle) {
  const CutoffKit kit{0.05, 1000};
  const double lp = lambda_pm(0.5).lambda_plus;
  const double shoulder = 2.0 * std::pow(1000.0, -2.0 + 0.1);
  for (double x : {shoulder, 1e-3, 0.5, 2.0 * lp}) EXPECT_NEAR(kit.phi(x, lp), std::log(x), 1e-14) << x;
  EXPECT_EQ(kit.phi(4.0 * lp, lp), 0.0);
  EXPECT_EQ(kit.phi(0.5 * std::pow(1000.0, -2.0 + 0.1), lp), 0.0);
  EXPECT_NEAR(kit.phi(0.5, std::complex<double>(0.5)), std::log(0.5), 1e-14);
}

TEST(Cutoff, PhiPrimeMatchesFiniteDifference) {
  const CutoffKit kit{0.1, 50};
  const double lp = 5.0;
  for (double x : {1.5 * std::pow(50.0, -1.8), 0.3, 15.0, 17.5}) {
    const double h = 1e-6 * x;
    const double fd = (kit.phi(x + h, lp) - kit.phi(x - h, lp)) / (2.0 * h);
    EXPECT_NEAR(kit.phi_prime(x, lp), fd, 1e-5 * std::max(1.0, std::abs(fd))) << x;
  }
}

TEST(Cutoff, DomainNodesSatisfyConstraint) {
  const IntegrationDomain d{300, 0.05, 48, 32};
  const double c = std::pow(300.0, 1.0 - 0.05);
  const auto nodes = d.nodes();
  EXPECT_EQ(nodes.size(), 48U * 32U);
  for (const auto& n : nodes) {
    EXPECT_LE(std::sqrt(std::abs(std::complex<double>(n.e, n.eta))), 2.0 * c * n.eta * (1.0 + 1e-12));
    EXPECT_LE(n.eta, 1.0);
    EXPECT_GT(n.weight, 0.0);
    EXPECT_TRUE(d.contains({n.e, n.eta}));
  }
}
