#include "rmtlab/density.hpp"
#include "rmtlab/ensemble.hpp"
#include "rmtlab/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace rmtlab;

namespace {

cplx random_w(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {-1.0 + 8.0 * u(g), std::pow(10.0, -4.0 + 4.0 * u(g))};
}

cplx random_z(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(2.0 * u(g), 2.0 * std::numbers::pi * u(g));
}

}  // namespace

TEST(Density, SolverResidualRandom) {
  std::mt19937_64 g(1);
  for (int i = 0; i < 1000; ++i) {
    const cplx w = random_w(g);
    const cplx z = random_z(g);
    const auto p = mc_solve(w, z);
    EXPECT_LE(std::abs(self_consistent_lhs(p.m, w, z)), 1e-10) << w << " " << z;
    EXPECT_GT(p.m.imag(), 0.0);
  }
}

TEST(Density, CubicFactorsAtOrigin) {
  std::mt19937_64 g(2);
  for (int i = 0; i < 100; ++i) {
    const cplx w = random_w(g);
    const auto c = mc_cubic(w, 0.0);
    for (const cplx m : {cplx(0.3, 0.1), cplx(-1.2, 0.7), cplx(2.0, -0.4)}) {
      const cplx poly = ((c[0] * m + c[1]) * m + c[2]) * m + c[3];
      const cplx factored = (m + 1.0) * (w * m * m + w * m + 1.0);
      EXPECT_NEAR(std::abs(poly / c[0] - factored / w), 0.0, 1e-12 * (1.0 + std::abs(factored / w)));
    }
  }
}

TEST(Density, OriginMatchesMarchenkoPastur) {
  std::mt19937_64 g(3);
  for (int i = 0; i < 100; ++i) {
    const cplx w = random_w(g);
    EXPECT_NEAR(std::abs(mc_solve(w, 0.0).m - mp_stieltjes(w)), 0.0, 1e-12 * std::max(1.0, std::abs(mp_stieltjes(w))));
  }
  const cplx oracle(-0.24497693688925685, 0.78424279577079067);
  EXPECT_NEAR(std::abs(mp_stieltjes({1.0, 0.5}) - oracle), 0.0, 1e-14);
}

TEST(Density, MarchenkoPasturDensityAtTwo) {
  EXPECT_NEAR(mc_solve({2.0, 1e-6}, 0.0).m.imag() / std::numbers::pi, 1.0 / (2.0 * std::numbers::pi), 1e-3);
  EXPECT_NEAR(rho_c(2.0, 0.0), 1.0 / (2.0 * std::numbers::pi), 1e-3);
  EXPECT_NEAR(mp_density(2.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
}

TEST(Density, CubicRootsAreRoots) {
  const std::array<cplx, 4> c{cplx(1.0), cplx(-6.0), cplx(11.0), cplx(-6.0)};
  for (const cplx r : cubic_roots(c)) EXPECT_NEAR(std::abs(((r - 6.0) * r + 11.0) * r - 6.0), 0.0, 1e-12);
}

TEST(Density, SolverRejectsRealAxis) { EXPECT_THROW(mc_solve({1.0, 0.0}, 0.5), InvalidArgument); }

TEST(Density, Edges) {
  const auto e1 = lambda_pm(1.0);
  EXPECT_NEAR(e1.alpha, 3.0, 1e-15);
  EXPECT_NEAR(e1.lambda_plus, 27.0 / 4.0, 1e-12);
  EXPECT_NEAR(e1.lambda_minus, 0.0, 1e-12);
  const auto e0 = lambda_pm(0.0);
  EXPECT_NEAR(e0.lambda_plus, 4.0, 1e-12);
  EXPECT_TRUE(std::isinf(e0.lambda_minus) && e0.lambda_minus < 0.0);
  EXPECT_EQ(e0.support_lower(), 0.0);
  const auto eh = lambda_pm({0.3, 0.4});
  EXPECT_NEAR(eh.lambda_minus, -0.34807621135331594, 1e-13);
  EXPECT_NEAR(eh.lambda_plus, 4.8480762113533159, 1e-13);
}

TEST(Density, EdgeSignFollowsModulus) {
  for (int i = 1; i <= 100; ++i) {
    const double r = 2.0 * i / 101.0;
    const double lm = lambda_pm(r).lambda_minus;
    EXPECT_EQ(lm > 0.0, r > 1.0) << r;
  }
}

TEST(Density, MassIsOne) {
  for (double z : {0.0, 0.5, 1.0, 1.2}) EXPECT_NEAR(rho_c_mass(z), 1.0, 1e-3) << z;
}

TEST(Density, VanishesOffSupport) {
  for (double z : {0.0, 0.5, 1.2}) {
    const auto e = lambda_pm(z);
    EXPECT_LE(rho_c(e.lambda_plus + 0.2, z), 1e-3);
    if (e.lambda_minus > 0.15) EXPECT_LE(rho_c(e.lambda_minus - 0.15, z), 1e-3);
  }
}

TEST(Density, CdfMonotone) {
  const DensityCdf cdf(0.7);
  double prev = 0.0;
  for (double x = 0.0; x < 6.0; x += 0.05) {
    EXPECT_GE(cdf(x), prev - 1e-15);
    prev = cdf(x);
  }
  EXPECT_NEAR(cdf(100.0), 1.0, 1e-12);
}

TEST(Density, KolmogorovOfExactQuantilesIsSmall) {
  const DensityCdf cdf(0.0);
  std::vector<double> x;
  for (double u = 1e-5; u <= 1.0; u += 1e-5) x.push_back(4.0 * u * u);
  std::vector<double> quantiles;
  std::size_t j = 0;
  for (int i = 0; i < 500; ++i) {
    const double target = (i + 0.5) / 500.0;
    while (j + 1 < x.size() && cdf(x[j]) < target) ++j;
    quantiles.push_back(x[j]);
  }
  EXPECT_LE(kolmogorov_distance(quantiles, cdf), 0.01);
}

TEST(Density, EmpiricalDegenerateInput) {
  EnsembleSpec s;
  s.dimension = 20;
  const auto x = sample_from_matrix(Eigen::MatrixXcd::Zero(20, 20), s);
  const auto r = empirical_vs_rho(x, 0.5);
  EXPECT_TRUE(r.degenerate_input);
}

TEST(Density, CurveAndTableCsv) {
  const auto curve = rho_c_curve({0.5, 1.0, 2.0}, 0.0);
  std::ostringstream out;
  write_density_csv(out, curve, true);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "x,rho,rho_mp_reference");
  std::ostringstream t;
  write_mc_table_csv(t, {mc_solve({1.0, 0.1}, 0.3)});
  EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "re_w,im_w,re_mc,im_mc,residual");
}
