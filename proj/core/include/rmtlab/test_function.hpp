#pragma once

#include <complex>
#include <cstddef>

namespace rmtlab {

/// Radial mollifier f(zeta) = A exp(-1/(1 - |zeta/r|^2)) on |zeta| < r, zero elsewhere.
struct Bump {
  double radius = 1.0;
  double amplitude = 1.0;

  double value(std::complex<double> zeta) const;
  /// Closed-form Laplacian of value().
  double laplacian(std::complex<double> zeta) const;
  /// Integral of f over the plane.
  double integral() const;
  /// Integral of |Laplacian f| over the plane.
  double laplacian_l1() const;
};

/// The rescaled test function f_{z0}(mu) = N^{2s} f(N^s (mu - z0)).
struct TestFunctionSpec {
  Bump f;
  std::complex<double> z0{0.0, 0.0};
  double s = 0.0;
  std::size_t dimension = 1;

  double scale() const;  // N^s
  double support_radius() const { return f.radius / scale(); }
  double value(std::complex<double> mu) const;
  double laplacian(std::complex<double> mu) const;
};

}  // namespace rmtlab
