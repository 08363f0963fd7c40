#pragma once

#include <Eigen/Dense>

namespace rmtlab::linalg {

/// Eigenvalues of a general real or complex square matrix (LAPACK geev, no vectors).
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a);
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& a);

/// Singular values in descending order (LAPACK gesdd, no vectors).
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

/// Full SVD a = U diag(s) V^*, s descending.
struct Svd {
  Eigen::MatrixXcd u;
  Eigen::VectorXd s;
  Eigen::MatrixXcd v;
};

/// Uses the real routine when every imaginary part is exactly zero.
Svd svd(const Eigen::MatrixXcd& a);

/// Number of threads used for BLAS work; set to 1 when trials run concurrently.
void set_blas_threads(int n);

}  // namespace rmtlab::linalg
