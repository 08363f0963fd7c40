#pragma once

#include "rmtlab/ensemble.hpp"
#include "rmtlab/test_function.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace rmtlab {

/// Singular-value squares of Y_z = X - z at one z, ascending.
struct SingularRecord {
  std::complex<double> z;
  std::vector<double> lambda;
};

struct SpectralData {
  std::vector<std::complex<double>> mu;
  std::vector<SingularRecord> records;
};

/// Eigenvalues of X (with multiplicity).
std::vector<std::complex<double>> eigenvalues(const MatrixSample& sample);

/// Eigenvalues of Y_z^* Y_z, ascending; values within 1e-12 of zero are clamped to 0.
std::vector<double> singular_squares(const MatrixSample& sample, std::complex<double> z);
std::vector<double> singular_squares(const Eigen::MatrixXcd& x, std::complex<double> z);

/// N^{-1} sum_j f_{z0}(mu_j).
double girko_lhs(const TestFunctionSpec& f, const std::vector<std::complex<double>>& mu);

struct GirkoGrid {
  /// Midpoint nodes per side on the bounding square of supp f_{z0}.
  int nodes_per_side = 200;
  /// Node is rejected when lambda_min < threshold * lambda_max.
  double singular_threshold = 1e-14;
};

/// One quadrature node of girko_rhs; refined nodes are replaced by their four children.
struct GirkoNode {
  std::complex<double> z;
  double weight = 0.0;
  double lambda_min = 0.0;
  double log_det = 0.0;  // sum_j log lambda_j(z)
  bool refined = false;
};

struct GirkoResult {
  double value = 0.0;
  int rejected_nodes = 0;
  std::vector<GirkoNode> nodes;
};

/// (4 pi N)^{-1} int Laplacian f_{z0}(z) sum_j log lambda_j(z) dA(z) by the midpoint rule, with one
/// level of dyadic refinement around nodes where Y_z is numerically singular. Throws
/// QuadratureError when a refined child is still singular.
GirkoResult girko_rhs(const TestFunctionSpec& f, const MatrixSample& sample,
                      const GirkoGrid& grid = {}, bool keep_nodes = false);

/// CSV with header "re_mu,im_mu".
void write_eigenvalues_csv(std::ostream& out, const std::vector<std::complex<double>>& mu);
/// CSV with header "re_z,im_z,lambda_min,sum_log_lambda".
void write_girko_nodes_csv(std::ostream& out, const std::vector<GirkoNode>& nodes);

}  // namespace rmtlab
