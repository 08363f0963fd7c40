#pragma once

#include "rmtlab/ensemble.hpp"

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace rmtlab {

using cplx = std::complex<double>;

/// Solution of m^{-1} + w(1 + m) - |z|^2 (1 + m)^{-1} = 0 with Im m > 0.
struct SelfConsistentPoint {
  cplx w;
  cplx z;
  cplx m;
  /// |m^{-1} + w(1+m) - |z|^2 (1+m)^{-1}| at m.
  double residual = 0.0;
  /// All three roots of the cubic w m^3 + 2w m^2 + (w + 1 - |z|^2) m + 1 = 0.
  std::array<cplx, 3> roots;
  int selected = -1;
  std::string branch_note;
};

/// Left side of the self-consistent equation.
cplx self_consistent_lhs(cplx m, cplx w, cplx z);

/// Coefficients (c3, c2, c1, c0) of the cubic cleared of denominators.
std::array<cplx, 4> mc_cubic(cplx w, cplx z);

/// Roots of c3 x^3 + c2 x^2 + c1 x + c0 by Cardano's formula, each polished by Newton steps.
std::array<cplx, 3> cubic_roots(const std::array<cplx, 4>& c);

/// Throws InvalidArgument for Im w <= 0 and SolveError when the Herglotz root is not unique.
SelfConsistentPoint mc_solve(cplx w, cplx z);

/// Edge data; lambda_minus is -infinity at z = 0.
struct EdgeData {
  cplx z;
  double alpha = 1.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;

  double support_lower() const { return lambda_minus > 0.0 ? lambda_minus : 0.0; }
  double support_upper() const { return lambda_plus; }
};

EdgeData lambda_pm(cplx z);

/// pi^{-1} Im m_c(x + i0, z) by two-point Richardson extrapolation from eta and eta/2, restricted to
/// the support. Below x = 100 eta the step is shrunk to x/100 so that eta stays small against x.
double rho_c(double x, cplx z, double eta = 1e-5);

struct DensityCurve {
  cplx z;
  double eta = 1e-5;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<bool> valid;
};

DensityCurve rho_c_curve(const std::vector<double>& x, cplx z, double eta = 1e-5);

/// int rho_c dx over the support by the trapezoid rule in u with x = lower + (upper - lower) u^3,
/// which absorbs the inverse square and cube root singularities at x = 0.
double rho_c_mass(cplx z, int nodes = 2000, double eta = 1e-5);

/// Tabulated CDF of rho_c on the support, normalized to end at 1.
class DensityCdf {
 public:
  explicit DensityCdf(cplx z, int nodes = 4000, double eta = 1e-5);
  double operator()(double x) const;
  double mass() const { return mass_; }

 private:
  std::vector<double> x_;
  std::vector<double> cdf_;
  double mass_ = 0.0;
};

/// Square Marchenko-Pastur reference: Stieltjes transform and density (z = 0 case).
cplx mp_stieltjes(cplx w);
double mp_density(double x);

/// Kolmogorov distance between the empirical CDF of `lambda` (ascending) and `cdf`.
double kolmogorov_distance(const std::vector<double>& lambda, const DensityCdf& cdf);

struct EmpiricalComparison {
  double ks = 0.0;
  std::vector<cplx> w;
  std::vector<cplx> m_empirical;
  std::vector<cplx> m_c;
  /// Set when the sample is deterministic (all singular squares equal).
  bool degenerate_input = false;
};

EmpiricalComparison empirical_vs_rho(const MatrixSample& sample, cplx z,
                                     const std::vector<cplx>& w_grid = {});

/// CSV with header "x,rho" and optionally a third "rho_mp_reference" column.
void write_density_csv(std::ostream& out, const DensityCurve& curve, bool mp_reference = false);
/// CSV with header "re_w,im_w,re_mc,im_mc,residual".
void write_mc_table_csv(std::ostream& out, const std::vector<SelfConsistentPoint>& points);

}  // namespace rmtlab
