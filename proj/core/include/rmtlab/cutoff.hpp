#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace rmtlab {

/// Smooth step S(t) = psi(t) / (psi(t) + psi(1 - t)) with psi(t) = exp(-1/t) for t > 0.
/// S = 0 on (-inf, 0], S = 1 on [1, inf). Returns the derivative of the given order (0..4).
double smooth_step(double t, int order = 0);

/// h(x) = S(|x| - 1): even, 0 on [-1, 1], 1 for |x| >= 2, increasing on [1, 2]. order 0..4.
double cutoff_h(double x, int order = 0);

/// chi(y) = 1 - S(2|y| - 1): 1 on [-1/2, 1/2], 0 outside (-1, 1).
double cutoff_chi(double y);

/// Cutoff functions tied to a dimension N and a small epsilon.
struct CutoffKit {
  double epsilon = 0.05;
  std::size_t dimension = 1;

  /// phi(x) = h(N^{2-2eps} x) log(x) (1 - h(x / (2 lambda_plus))), zero for x <= 0.
  double phi(double x, std::complex<double> z) const;
  double phi_prime(double x, std::complex<double> z) const;
  double phi(double x, double lambda_plus) const;
  double phi_prime(double x, double lambda_plus) const;
};

/// Node of the log-uniform midpoint grid on I_eps; weight already contains the dE deta Jacobian.
struct DomainNode {
  double e = 0.0;
  double eta = 0.0;
  double weight = 0.0;
};

/// I_eps = { w = E + i eta : N^{-1+eps} sqrt(E) <= eta, E >= N^{-2+2eps}, |w| <= eps }.
struct IntegrationDomain {
  std::size_t dimension = 1;
  double epsilon = 0.05;
  int e_nodes = 48;
  int eta_nodes = 32;

  double e_min() const;
  double e_max() const;
  double eta_min(double e) const;
  double eta_max(double e) const;
  bool contains(std::complex<double> w) const;
  std::vector<DomainNode> nodes() const;
};

}  // namespace rmtlab
