#include "rmtlab/cutoff.hpp"

#include "rmtlab/density.hpp"
#include "rmtlab/errors.hpp"

#include <cmath>

namespace rmtlab {
namespace {

// psi(t) = exp(-1/t) and its derivatives up to order 4, as psi(t) times a polynomial in 1/t.
std::array<double, 5> psi_derivatives(double t) {
  std::array<double, 5> d{};
  if (t < 1e-3) return d;
  const double p = std::exp(-1.0 / t);
  const double u = 1.0 / t;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u, u6 = u5 * u, u7 = u6 * u,
               u8 = u7 * u;
  d[0] = p;
  d[1] = p * u2;
  d[2] = p * (u4 - 2.0 * u3);
  d[3] = p * (u6 - 6.0 * u5 + 6.0 * u4);
  d[4] = p * (u8 - 12.0 * u7 + 36.0 * u6 - 24.0 * u5);
  return d;
}

constexpr std::array<std::array<double, 5>, 5> kBinomial{{{1, 0, 0, 0, 0},
                                                          {1, 1, 0, 0, 0},
                                                          {1, 2, 1, 0, 0},
                                                          {1, 3, 3, 1, 0},
                                                          {1, 4, 6, 4, 1}}};

}  // namespace

double smooth_step(double t, int order) {
  if (order < 0 || order > 4) throw InvalidArgument("smooth_step supports derivatives 0..4");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return order == 0 ? 1.0 : 0.0;
  const auto a = psi_derivatives(t);
  auto b = psi_derivatives(1.0 - t);
  for (int k = 1; k <= 4; k += 2) b[k] = -b[k];
  std::array<double, 5> den{};
  for (int k = 0; k <= 4; ++k) den[k] = a[k] + b[k];
  // Leibniz: a^{(n)} = sum_k C(n,k) den^{(k)} s^{(n-k)}
  std::array<double, 5> s{};
  for (int n = 0; n <= order; ++n) {
    double acc = a[n];
    for (int k = 1; k <= n; ++k) acc -= kBinomial[n][k] * den[k] * s[n - k];
    s[n] = acc / den[0];
  }
  return s[order];
}

double cutoff_h(double x, int order) {
  const double v = smooth_step(std::abs(x) - 1.0, order);
  return (x < 0.0 && order % 2 == 1) ? -v : v;
}

double cutoff_chi(double y) { return 1.0 - smooth_step(2.0 * std::abs(y) - 1.0); }

double CutoffKit::phi(double x, double lambda_plus) const {
  if (x <= 0.0) return 0.0;
  const double c = std::pow(static_cast<double>(dimension), 2.0 - 2.0 * epsilon);
  return cutoff_h(c * x) * std::log(x) * (1.0 - cutoff_h(x / (2.0 * lambda_plus)));
}

double CutoffKit::phi_prime(double x, double lambda_plus) const {
  if (x <= 0.0) return 0.0;
  const double c = std::pow(static_cast<double>(dimension), 2.0 - 2.0 * epsilon);
  const double lo = cutoff_h(c * x);
  const double lo_d = c * cutoff_h(c * x, 1);
  const double hi = 1.0 - cutoff_h(x / (2.0 * lambda_plus));
  const double hi_d = -cutoff_h(x / (2.0 * lambda_plus), 1) / (2.0 * lambda_plus);
  const double l = std::log(x);
  return lo_d * l * hi + lo * hi / x + lo * l * hi_d;
}

double CutoffKit::phi(double x, std::complex<double> z) const {
  return phi(x, lambda_pm(z).lambda_plus);
}

double CutoffKit::phi_prime(double x, std::complex<double> z) const {
  return phi_prime(x, lambda_pm(z).lambda_plus);
}

double IntegrationDomain::e_min() const {
  return std::pow(static_cast<double>(dimension), -2.0 + 2.0 * epsilon);
}

double IntegrationDomain::e_max() const {
  // largest E with eta_min(E) <= eta_max(E): E^2 + N^{-2+2eps} E = eps^2
  const double c = e_min();
  return (-c + std::sqrt(c * c + 4.0 * epsilon * epsilon)) / 2.0;
}

double IntegrationDomain::eta_min(double e) const {
  return std::pow(static_cast<double>(dimension), -1.0 + epsilon) * std::sqrt(e);
}

double IntegrationDomain::eta_max(double e) const {
  return std::sqrt(std::max(0.0, epsilon * epsilon - e * e));
}

bool IntegrationDomain::contains(std::complex<double> w) const {
  const double e = w.real();
  const double eta = w.imag();
  return e >= e_min() && eta >= eta_min(e) && std::abs(w) <= epsilon;
}

std::vector<DomainNode> IntegrationDomain::nodes() const {
  if (e_nodes < 1 || eta_nodes < 1) throw InvalidArgument("integration domain needs nodes");
  if (e_min() >= e_max()) return {};
  std::vector<DomainNode> out;
  out.reserve(static_cast<std::size_t>(e_nodes) * static_cast<std::size_t>(eta_nodes));
  const double log_e0 = std::log(e_min());
  const double d_log_e = (std::log(e_max()) - log_e0) / e_nodes;
  for (int i = 0; i < e_nodes; ++i) {
    const double e = std::exp(log_e0 + (i + 0.5) * d_log_e);
    const double log_eta0 = std::log(eta_min(e));
    const double d_log_eta = (std::log(eta_max(e)) - log_eta0) / eta_nodes;
    for (int j = 0; j < eta_nodes; ++j) {
      const double eta = std::exp(log_eta0 + (j + 0.5) * d_log_eta);
      out.push_back({e, eta, e * eta * d_log_e * d_log_eta});
    }
  }
  return out;
}

}  // namespace rmtlab
