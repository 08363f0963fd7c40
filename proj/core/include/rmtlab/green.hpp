#pragma once

#include "rmtlab/ensemble.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace rmtlab {

using cplx = std::complex<double>;
using IndexSet = std::vector<std::size_t>;

/// Removed columns T and removed rows U of Y = X - z (0-based labels, labels are kept).
struct MinorIndex {
  IndexSet cols;  // T
  IndexSet rows;  // U

  void validate(std::size_t n) const;
};

/// Resolvents of the minor Y^{(T,U)}:
///   G = ((Y^{(T,U)})^* Y^{(T,U)} - w)^{-1}, indexed by surviving columns,
///   calG = (Y^{(T,U)} (Y^{(T,U)})^* - w)^{-1}, indexed by surviving rows.
/// Both are stored as N x N matrices with zero rows and columns at removed labels.
/// Traces are normalized by the original N.
struct GreenState {
  cplx w;
  cplx z;
  MinorIndex minor;
  Eigen::MatrixXcd y;  // full Y = X - z, before removal
  Eigen::MatrixXcd G;
  Eigen::MatrixXcd calG;
  cplx m_G;
  cplx m_calG;
  /// max-norm residuals of (A - w) G - I for both resolvents
  double residual = 0.0;

  std::size_t dimension() const { return static_cast<std::size_t>(y.rows()); }
};

/// Dense solve. Throws InvalidArgument for Im w <= 0 and SolveError when singular.
GreenState green(const Eigen::MatrixXcd& x, cplx z, cplx w, const MinorIndex& minor = {});
GreenState green(const MatrixSample& sample, cplx z, cplx w, const MinorIndex& minor = {});

/// Only the G trace, from the singular values of the minor.
cplx minor_trace(const Eigen::MatrixXcd& x, cplx z, cplx w, const MinorIndex& minor);

struct IdentityResidual {
  std::string name;
  double residual = 0.0;
  /// False when a denominator fell below 1e-13; residual is NaN then.
  bool defined = true;
};

using ResidualReport = std::vector<IdentityResidual>;

double max_residual(const ResidualReport& report);
bool all_defined(const ResidualReport& report);

/// Removal of column k and of row k from the minor of `state`, comparing the Schur-complement
/// and rank-one update formulas (both directions) against independently solved minors.
ResidualReport minor_identity_residual(const GreenState& state, std::size_t k);

/// Diagonal and off-diagonal Schur-complement identities for G^{(0,T)} and calG^{(T,0)}, at
/// diagonal index i and off-diagonal pair (i, j). `state` must have no removals; it supplies Y, w, z.
ResidualReport schur_identity_residual(const GreenState& state, const IndexSet& t, std::size_t i,
                                       std::size_t j);

/// Trace relation m_G - m_calG = (|T| - |U|)/(N w) for the minor of `state`.
double trace_relation_residual(const GreenState& state);

/// Centered quadratic forms
///   Z_i^{(T)}    = (1 - E_{row i}) y_i^{(T)} G^{(T,i)} y_i^{(T)*},
///   calZ_i^{(T)} = (1 - E_{col i}) y_i^{(T)*} calG^{(i,T)} y_i^{(T)},
/// with E(y A y^*) = |z|^2 A_ii + N^{-1} tr A.
struct QuadraticForms {
  cplx Z;
  cplx calZ;
};

QuadraticForms quadratic_forms(const Eigen::MatrixXcd& x, cplx z, cplx w, std::size_t i,
                               const IndexSet& t = {});

/// One evaluated inequality at one node.
struct ProbeRow {
  std::size_t dimension = 0;
  cplx w;
  cplx z;
  std::string probe;
  double statistic = 0.0;
  double bound = 0.0;
  bool deterministic = false;

  double ratio() const { return statistic / bound; }
  bool violated() const { return statistic > bound; }
};

struct ProbeSummary {
  std::string probe;
  std::size_t evaluations = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;
  bool deterministic = false;

  double frequency() const { return evaluations ? double(violations) / double(evaluations) : 0.0; }
};

struct ProbeGridNode {
  cplx w;
  cplx z;
};

struct BoundProbeOptions {
  /// Constant of the deterministic minor-trace bound |m^{(T,U)} - m| + ... <= C(|T|+|U|)/(N eta).
  double crude_constant = 4.0;
  /// Exponent C of the slack phi^C with phi = (log N)^{log log N}.
  double slack_exponent = 3.0;
  /// Constant of the off-diagonal bound C (log N)^2 |w|^{-1/2}.
  double offdiag_constant = 1.0;
  MinorIndex crude_minor{{0}, {1}};
};

struct BoundProbeResult {
  std::vector<ProbeRow> rows;
  std::vector<ProbeSummary> summary;
};

/// phi = (log N)^{log log N}.
double polylog_phi(std::size_t n);

/// Evaluates the crude minor bound and the diagonal / off-diagonal resolvent bounds at every
/// grid node for `trials` samples drawn by `draw(trial)`.
BoundProbeResult bound_probe(const std::function<MatrixSample(std::size_t)>& draw,
                             const std::vector<ProbeGridNode>& grid, std::size_t trials,
                             const BoundProbeOptions& options = {});

/// CSV "N,re_w,im_w,re_z,im_z,probe,statistic,bound,ratio,violated".
void write_probe_csv(std::ostream& out, const std::vector<ProbeRow>& rows);

}  // namespace rmtlab
