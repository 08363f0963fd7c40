#include "rmtlab/linalg.hpp"

#include "rmtlab/errors.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>

extern "C" void openblas_set_num_threads(int);

namespace rmtlab::linalg {
namespace {

using Index = Eigen::Index;

void check(const char* routine, lapack_int info) {
  if (info != 0) throw EigensolverError(routine, static_cast<int>(info));
}

void require_square(const auto& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix must be square");
}

bool is_real(const Eigen::MatrixXcd& a) {
  for (Index k = 0; k < a.size(); ++k)
    if (a.data()[k].imag() != 0.0) return false;
  return true;
}

}  // namespace

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a) {
  require_square(a);
  const auto n = static_cast<lapack_int>(a.rows());
  if (n == 0) return {};
  Eigen::MatrixXd work = a;
  Eigen::VectorXd wr(n), wi(n);
  check("dgeev", LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(),
                               nullptr, 1, nullptr, 1));
  Eigen::VectorXcd out(n);
  for (lapack_int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& a) {
  require_square(a);
  if (is_real(a)) return eigenvalues(Eigen::MatrixXd(a.real()));
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXcd work = a;
  Eigen::VectorXcd out(n);
  check("zgeev", LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, out.data(), nullptr, 1,
                               nullptr, 1));
  return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  Eigen::MatrixXd work = a;
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  check("dgesdd", LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1,
                                 nullptr, 1));
  return s;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
  if (is_real(a)) return singular_values(Eigen::MatrixXd(a.real()));
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  Eigen::MatrixXcd work = a;
  Eigen::VectorXd s(std::min(m, n));
  check("zgesdd", LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1,
                                 nullptr, 1));
  return s;
}

Svd svd(const Eigen::MatrixXcd& a) {
  require_square(a);
  const auto n = static_cast<lapack_int>(a.rows());
  Svd out;
  out.s.resize(n);
  if (n == 0) return out;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    Eigen::MatrixXd u(n, n), vt(n, n);
    check("dgesdd", LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, out.s.data(),
                                   u.data(), n, vt.data(), n));
    out.u = u.cast<std::complex<double>>();
    out.v = vt.transpose().cast<std::complex<double>>();
    return out;
  }
  Eigen::MatrixXcd work = a;
  Eigen::MatrixXcd u(n, n), vh(n, n);
  check("zgesdd", LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, out.s.data(), u.data(),
                                 n, vh.data(), n));
  out.u = std::move(u);
  out.v = vh.adjoint();
  return out;
}

void set_blas_threads(int n) { openblas_set_num_threads(std::max(1, n)); }

}  // namespace rmtlab::linalg
