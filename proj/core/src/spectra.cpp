#include "rmtlab/spectra.hpp"

#include "rmtlab/errors.hpp"
#include "rmtlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace rmtlab {
namespace {

struct NodeEval {
  double lambda_min;
  double lambda_max;
  double log_det;
};

NodeEval evaluate_node(const Eigen::MatrixXcd& x, std::complex<double> z) {
  const auto lambda = singular_squares(x, z);
  NodeEval e{lambda.front(), lambda.back(), 0.0};
  for (double l : lambda) e.log_det += std::log(l);
  return e;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const MatrixSample& sample) {
  const Eigen::VectorXcd mu = sample.is_real() ? linalg::eigenvalues(sample.real_entries())
                                               : linalg::eigenvalues(sample.entries);
  return {mu.data(), mu.data() + mu.size()};
}

std::vector<double> singular_squares(const Eigen::MatrixXcd& x, std::complex<double> z) {
  Eigen::MatrixXcd y = x;
  y.diagonal().array() -= z;
  const Eigen::VectorXd sv = linalg::singular_values(y);
  std::vector<double> lambda(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index j = 0; j < sv.size(); ++j) lambda[static_cast<std::size_t>(j)] = sv[j] * sv[j];
  std::sort(lambda.begin(), lambda.end());
  for (double& l : lambda)
    if (l < 1e-12 && l > -1e-12) l = std::max(l, 0.0);
  return lambda;
}

std::vector<double> singular_squares(const MatrixSample& sample, std::complex<double> z) {
  return singular_squares(sample.entries, z);
}

double girko_lhs(const TestFunctionSpec& f, const std::vector<std::complex<double>>& mu) {
  if (mu.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& m : mu) sum += f.value(m);
  return sum / static_cast<double>(mu.size());
}

GirkoResult girko_rhs(const TestFunctionSpec& f, const MatrixSample& sample, const GirkoGrid& grid,
                      bool keep_nodes) {
  if (grid.nodes_per_side < 1) throw InvalidArgument("girko grid needs at least one node");
  GirkoResult result;
  const double radius = f.support_radius();
  const int n = grid.nodes_per_side;
  const double h = 2.0 * radius / n;
  const double n_dim = static_cast<double>(sample.dimension());
  double sum = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const std::complex<double> z =
          f.z0 + std::complex<double>(-radius + (ix + 0.5) * h, -radius + (iy + 0.5) * h);
      const double lap = f.laplacian(z);
      if (lap == 0.0) continue;
      const NodeEval e = evaluate_node(sample.entries, z);
      if (e.lambda_min >= grid.singular_threshold * e.lambda_max) {
        sum += lap * e.log_det * h * h;
        if (keep_nodes) result.nodes.push_back({z, h * h, e.lambda_min, e.log_det, false});
        continue;
      }
      ++result.rejected_nodes;
      const double hc = h / 2.0;
      for (int c = 0; c < 4; ++c) {
        const std::complex<double> zc =
            z + std::complex<double>((c % 2 == 0 ? -0.5 : 0.5) * hc, (c < 2 ? -0.5 : 0.5) * hc);
        const NodeEval ec = evaluate_node(sample.entries, zc);
        if (ec.lambda_min < grid.singular_threshold * ec.lambda_max)
          throw QuadratureError("girko_rhs: refined node is still numerically singular");
        sum += f.laplacian(zc) * ec.log_det * hc * hc;
        if (keep_nodes) result.nodes.push_back({zc, hc * hc, ec.lambda_min, ec.log_det, true});
      }
    }
  }
  result.value = sum / (4.0 * std::numbers::pi * n_dim);
  return result;
}

void write_eigenvalues_csv(std::ostream& out, const std::vector<std::complex<double>>& mu) {
  out.precision(17);
  out << "re_mu,im_mu\n";
  for (const auto& m : mu) out << m.real() << ',' << m.imag() << '\n';
}

void write_girko_nodes_csv(std::ostream& out, const std::vector<GirkoNode>& nodes) {
  out.precision(17);
  out << "re_z,im_z,lambda_min,sum_log_lambda\n";
  for (const auto& n : nodes)
    out << n.z.real() << ',' << n.z.imag() << ',' << n.lambda_min << ',' << n.log_det << '\n';
}

}  // namespace rmtlab
