#include "rmtlab/green.hpp"

#include "rmtlab/errors.hpp"
#include "rmtlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rmtlab {
namespace {

constexpr double kGuard = 1e-13;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Index = Eigen::Index;

bool contains(const IndexSet& set, std::size_t k) {
  return std::find(set.begin(), set.end(), k) != set.end();
}

IndexSet with(IndexSet set, std::size_t k) {
  if (!contains(set, k)) set.push_back(k);
  std::sort(set.begin(), set.end());
  return set;
}

std::vector<Index> complement(const IndexSet& removed, std::size_t n) {
  std::vector<Index> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (!contains(removed, i)) keep.push_back(static_cast<Index>(i));
  return keep;
}

Eigen::MatrixXcd scatter(const Eigen::MatrixXcd& small, const std::vector<Index>& labels, Index n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t a = 0; a < labels.size(); ++a)
    for (std::size_t b = 0; b < labels.size(); ++b)
      out(labels[a], labels[b]) = small(static_cast<Index>(a), static_cast<Index>(b));
  return out;
}

// Resolvent of a Hermitian matrix h at w together with the max-norm residual of (h - w) G - I.
Eigen::MatrixXcd resolvent(const Eigen::MatrixXcd& h, cplx w, double& residual) {
  const Index n = h.rows();
  if (n == 0) return {};
  Eigen::MatrixXcd a = h;
  a.diagonal().array() -= w;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::MatrixXcd g = lu.solve(Eigen::MatrixXcd::Identity(n, n));
  if (!g.allFinite()) throw SolveError("resolvent solve produced non-finite entries");
  const Eigen::MatrixXcd check = a * g - Eigen::MatrixXcd::Identity(n, n);
  residual = std::max(residual, check.cwiseAbs().maxCoeff());
  return g;
}

GreenState solve_minor(const Eigen::MatrixXcd& y, cplx z, cplx w, const MinorIndex& minor) {
  if (!(w.imag() > 0.0)) throw InvalidArgument("green requires Im w > 0");
  const auto n = static_cast<std::size_t>(y.rows());
  minor.validate(n);
  GreenState s;
  s.w = w;
  s.z = z;
  s.minor = minor;
  s.y = y;
  const auto keep_cols = complement(minor.cols, n);
  const auto keep_rows = complement(minor.rows, n);
  const Eigen::MatrixXcd yr = y(keep_rows, keep_cols);
  const Eigen::MatrixXcd g = resolvent(yr.adjoint() * yr, w, s.residual);
  const Eigen::MatrixXcd cg = resolvent(yr * yr.adjoint(), w, s.residual);
  s.G = scatter(g, keep_cols, y.rows());
  s.calG = scatter(cg, keep_rows, y.rows());
  s.m_G = s.G.trace() / static_cast<double>(n);
  s.m_calG = s.calG.trace() / static_cast<double>(n);
  return s;
}

Eigen::MatrixXcd shifted(const Eigen::MatrixXcd& x, cplx z) {
  Eigen::MatrixXcd y = x;
  y.diagonal().array() -= z;
  return y;
}

// Row k of Y with the columns in `cols` set to zero.
Eigen::RowVectorXcd masked_row(const Eigen::MatrixXcd& y, std::size_t k, const IndexSet& cols) {
  Eigen::RowVectorXcd r = y.row(static_cast<Index>(k));
  for (auto c : cols) r[static_cast<Index>(c)] = 0.0;
  return r;
}

Eigen::VectorXcd masked_col(const Eigen::MatrixXcd& y, std::size_t k, const IndexSet& rows) {
  Eigen::VectorXcd c = y.col(static_cast<Index>(k));
  for (auto r : rows) c[static_cast<Index>(r)] = 0.0;
  return c;
}

double max_abs_over(const Eigen::MatrixXcd& diff, const IndexSet& skip) {
  double out = 0.0;
  for (Index i = 0; i < diff.rows(); ++i) {
    if (contains(skip, static_cast<std::size_t>(i))) continue;
    for (Index j = 0; j < diff.cols(); ++j) {
      if (contains(skip, static_cast<std::size_t>(j))) continue;
      out = std::max(out, std::abs(diff(i, j)));
    }
  }
  return out;
}

IdentityResidual undefined(std::string name) { return {std::move(name), kNaN, false}; }

}  // namespace

void MinorIndex::validate(std::size_t n) const {
  for (auto c : cols)
    if (c >= n) throw InvalidArgument("removed column index out of range");
  for (auto r : rows)
    if (r >= n) throw InvalidArgument("removed row index out of range");
  auto unique = [](IndexSet v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (!unique(cols) || !unique(rows)) throw InvalidArgument("repeated index in minor");
}

GreenState green(const Eigen::MatrixXcd& x, cplx z, cplx w, const MinorIndex& minor) {
  if (x.rows() != x.cols()) throw InvalidArgument("green requires a square matrix");
  return solve_minor(shifted(x, z), z, w, minor);
}

GreenState green(const MatrixSample& sample, cplx z, cplx w, const MinorIndex& minor) {
  return green(sample.entries, z, w, minor);
}

cplx minor_trace(const Eigen::MatrixXcd& x, cplx z, cplx w, const MinorIndex& minor) {
  if (!(w.imag() > 0.0)) throw InvalidArgument("minor_trace requires Im w > 0");
  const auto n = static_cast<std::size_t>(x.rows());
  minor.validate(n);
  const auto keep_cols = complement(minor.cols, n);
  const auto keep_rows = complement(minor.rows, n);
  const Eigen::MatrixXcd yr = shifted(x, z)(keep_rows, keep_cols);
  const Eigen::VectorXd sv = linalg::singular_values(yr);
  cplx tr = 0.0;
  for (Index j = 0; j < sv.size(); ++j) tr += 1.0 / (sv[j] * sv[j] - w);
  tr += static_cast<double>(keep_cols.size() - static_cast<std::size_t>(sv.size())) * (-1.0 / w);
  return tr / static_cast<double>(n);
}

double max_residual(const ResidualReport& report) {
  double out = 0.0;
  for (const auto& r : report)
    if (r.defined) out = std::max(out, r.residual);
  return out;
}

bool all_defined(const ResidualReport& report) {
  return std::all_of(report.begin(), report.end(), [](const auto& r) { return r.defined; });
}

ResidualReport minor_identity_residual(const GreenState& s, std::size_t k) {
  const std::size_t n = s.dimension();
  if (k >= n) throw InvalidArgument("minor index out of range");
  if (contains(s.minor.cols, k) || contains(s.minor.rows, k))
    throw InvalidArgument("index already removed from the minor");
  const MinorIndex col_minor{with(s.minor.cols, k), s.minor.rows};
  const MinorIndex row_minor{s.minor.cols, with(s.minor.rows, k)};
  const GreenState gc = solve_minor(s.y, s.z, s.w, col_minor);
  const GreenState gr = solve_minor(s.y, s.z, s.w, row_minor);
  const auto ki = static_cast<Index>(k);
  ResidualReport report;

  // Schur complement for a removed column (G) and a removed row (calG).
  if (std::abs(s.G(ki, ki)) < kGuard) {
    report.push_back(undefined("G column removal"));
  } else {
    const Eigen::MatrixXcd pred = s.G - s.G.col(ki) * s.G.row(ki) / s.G(ki, ki);
    report.push_back({"G column removal", max_abs_over(gc.G - pred, col_minor.cols), true});
  }
  if (std::abs(s.calG(ki, ki)) < kGuard) {
    report.push_back(undefined("calG row removal"));
  } else {
    const Eigen::MatrixXcd pred = s.calG - s.calG.col(ki) * s.calG.row(ki) / s.calG(ki, ki);
    report.push_back({"calG row removal", max_abs_over(gr.calG - pred, row_minor.rows), true});
  }

  // Rank-one updates for a removed row (G) and a removed column (calG), both directions.
  const Eigen::RowVectorXcd yr = masked_row(s.y, k, s.minor.cols);
  {
    const cplx d = 1.0 - (yr * s.G * yr.adjoint())(0, 0);
    if (std::abs(d) < kGuard) {
      report.push_back(undefined("G row removal"));
    } else {
      const Eigen::MatrixXcd pred = s.G + (s.G * yr.adjoint()) * (yr * s.G) / d;
      report.push_back({"G row removal", (gr.G - pred).cwiseAbs().maxCoeff(), true});
    }
    const cplx d2 = 1.0 + (yr * gr.G * yr.adjoint())(0, 0);
    if (std::abs(d2) < kGuard) {
      report.push_back(undefined("G row restoration"));
    } else {
      const Eigen::MatrixXcd pred = gr.G - (gr.G * yr.adjoint()) * (yr * gr.G) / d2;
      report.push_back({"G row restoration", (s.G - pred).cwiseAbs().maxCoeff(), true});
    }
  }
  const Eigen::VectorXcd yc = masked_col(s.y, k, s.minor.rows);
  {
    const cplx d = 1.0 - (yc.adjoint() * s.calG * yc)(0, 0);
    if (std::abs(d) < kGuard) {
      report.push_back(undefined("calG column removal"));
    } else {
      const Eigen::MatrixXcd pred = s.calG + (s.calG * yc) * (yc.adjoint() * s.calG) / d;
      report.push_back({"calG column removal", (gc.calG - pred).cwiseAbs().maxCoeff(), true});
    }
    const cplx d2 = 1.0 + (yc.adjoint() * gc.calG * yc)(0, 0);
    if (std::abs(d2) < kGuard) {
      report.push_back(undefined("calG column restoration"));
    } else {
      const Eigen::MatrixXcd pred = gc.calG - (gc.calG * yc) * (yc.adjoint() * gc.calG) / d2;
      report.push_back({"calG column restoration", (s.calG - pred).cwiseAbs().maxCoeff(), true});
    }
  }
  return report;
}

QuadraticForms quadratic_forms(const Eigen::MatrixXcd& x, cplx z, cplx w, std::size_t i,
                               const IndexSet& t) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (i >= n) throw InvalidArgument("quadratic form index out of range");
  const Eigen::MatrixXcd y = shifted(x, z);
  const auto ii = static_cast<Index>(i);
  const double z2 = std::norm(z);
  QuadraticForms q;
  {
    // row i of Y^{(T,.)} against G^{(T,i)}
    const GreenState g = solve_minor(y, z, w, {t, with({}, i)});
    const Eigen::RowVectorXcd r = masked_row(y, i, t);
    const cplx raw = (r * g.G * r.adjoint())(0, 0);
    q.Z = raw - (z2 * g.G(ii, ii) + g.m_G);
  }
  {
    // column i of Y^{(.,T)} against calG^{(i,T)}
    const GreenState g = solve_minor(y, z, w, {with({}, i), t});
    const Eigen::VectorXcd c = masked_col(y, i, t);
    const cplx raw = (c.adjoint() * g.calG * c)(0, 0);
    q.calZ = raw - (z2 * g.calG(ii, ii) + g.m_calG);
  }
  return q;
}

ResidualReport schur_identity_residual(const GreenState& s, const IndexSet& t, std::size_t i,
                                       std::size_t j) {
  const std::size_t n = s.dimension();
  if (!s.minor.cols.empty() || !s.minor.rows.empty())
    throw InvalidArgument("schur_identity_residual expects the unremoved state");
  if (i >= n || j >= n) throw InvalidArgument("index out of range");
  const auto ii = static_cast<Index>(i);
  const auto ji = static_cast<Index>(j);
  const cplx w = s.w;
  const cplx z = s.z;
  const Eigen::MatrixXcd x = s.y + z * Eigen::MatrixXcd::Identity(s.y.rows(), s.y.cols());
  const QuadraticForms q = quadratic_forms(x, z, w, i, t);
  const double z2 = std::norm(z);
  ResidualReport report;

  // G^{(0,T)}: rows T removed.
  const GreenState g_rows = solve_minor(s.y, z, w, {{}, t});
  const GreenState cg_i = solve_minor(s.y, z, w, {with({}, i), t});
  {
    const cplx d = 1.0 + cg_i.m_calG + z2 * cg_i.calG(ii, ii) + q.calZ;
    if (std::abs(d) < kGuard) report.push_back(undefined("G diagonal"));
    else report.push_back({"G diagonal", std::abs(g_rows.G(ii, ii) + 1.0 / (w * d)), true});
  }
  // calG^{(T,0)}: columns T removed.
  const GreenState cg_cols = solve_minor(s.y, z, w, {t, {}});
  const GreenState g_i = solve_minor(s.y, z, w, {t, with({}, i)});
  {
    const cplx d = 1.0 + g_i.m_G + z2 * g_i.G(ii, ii) + q.Z;
    if (std::abs(cg_cols.calG(ii, ii)) < kGuard) report.push_back(undefined("calG diagonal"));
    else report.push_back({"calG diagonal", std::abs(1.0 / cg_cols.calG(ii, ii) + w * d), true});
  }
  if (i != j) {
    {
      const GreenState g_ti = solve_minor(s.y, z, w, {with({}, i), t});
      const GreenState cg_ij = solve_minor(s.y, z, w, {with(with({}, i), j), t});
      const cplx form = (masked_col(s.y, i, t).adjoint() * cg_ij.calG * masked_col(s.y, j, t))(0, 0);
      const cplx pred = w * g_rows.G(ii, ii) * g_ti.G(ji, ji) * form;
      report.push_back({"G off-diagonal", std::abs(g_rows.G(ii, ji) - pred), true});
    }
    {
      const GreenState cg_ti = solve_minor(s.y, z, w, {t, with({}, i)});
      const GreenState g_ij = solve_minor(s.y, z, w, {t, with(with({}, i), j)});
      const cplx form = (masked_row(s.y, i, t) * g_ij.G * masked_row(s.y, j, t).adjoint())(0, 0);
      const cplx pred = w * cg_cols.calG(ii, ii) * cg_ti.calG(ji, ji) * form;
      report.push_back({"calG off-diagonal", std::abs(cg_cols.calG(ii, ji) - pred), true});
    }
  }
  return report;
}

double trace_relation_residual(const GreenState& s) {
  const double n = static_cast<double>(s.dimension());
  const double dt = static_cast<double>(s.minor.cols.size());
  const double du = static_cast<double>(s.minor.rows.size());
  return std::abs(s.m_G - s.m_calG - (dt - du) / (n * s.w));
}

double polylog_phi(std::size_t n) {
  const double l = std::log(static_cast<double>(n));
  return std::pow(l, std::log(l));
}

BoundProbeResult bound_probe(const std::function<MatrixSample(std::size_t)>& draw,
                             const std::vector<ProbeGridNode>& grid, std::size_t trials,
                             const BoundProbeOptions& options) {
  BoundProbeResult result;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const MatrixSample sample = draw(trial);
    const std::size_t n = sample.dimension();
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);
    for (const auto& node : grid) {
      const cplx w = node.w;
      const cplx z = node.z;
      const double eta = w.imag();
      const GreenState s = green(sample, z, w);
      auto push = [&](const char* name, double stat, double bound, bool det) {
        result.rows.push_back({n, w, z, name, stat, bound, det});
      };

      const MinorIndex& mi = options.crude_minor;
      const cplx m_tu = minor_trace(sample.entries, z, w, mi);
      const double dt = static_cast<double>(mi.cols.size());
      const double du = static_cast<double>(mi.rows.size());
      const cplx m_cal_tu = m_tu - (dt - du) / (nd * w);
      push("crude_minor_trace", std::abs(m_tu - s.m_G) + std::abs(m_cal_tu - s.m_G),
           options.crude_constant * (dt + du) / (nd * eta), true);

      double max_diag = 0.0;
      double max_off = 0.0;
      for (Eigen::Index a = 0; a < s.G.rows(); ++a) {
        max_diag = std::max(max_diag, std::abs(s.G(a, a)));
        for (Eigen::Index b = 0; b < s.G.cols(); ++b)
          if (a != b) max_off = std::max(max_off, std::abs(s.G(a, b)));
      }
      const double root_w = std::sqrt(std::abs(w));
      push("diagonal_max", max_diag, 2.0 * log_n / root_w, false);
      push("offdiagonal_max", max_off, options.offdiag_constant * log_n * log_n / root_w, false);
      push("offdiagonal_typical", max_off,
           std::pow(polylog_phi(n), options.slack_exponent) * std::sqrt(std::abs(s.m_G) / (nd * eta)),
           false);

      const QuadraticForms q = quadratic_forms(sample.entries, z, w, 0);
      const GreenState g0 = solve_minor(s.y, z, w, {{}, {0}});
      const double var = std::max(0.0, g0.m_G.imag() + std::norm(z) * g0.G(0, 0).imag());
      push("large_deviation_Z", std::abs(q.Z), std::pow(nd, 0.1) * std::sqrt(var / (nd * eta)), false);
    }
  }
  for (const auto& row : result.rows) {
    auto it = std::find_if(result.summary.begin(), result.summary.end(),
                           [&](const auto& s) { return s.probe == row.probe; });
    if (it == result.summary.end()) {
      result.summary.push_back({row.probe, 0, 0, 0.0, row.deterministic});
      it = std::prev(result.summary.end());
    }
    ++it->evaluations;
    if (row.violated()) ++it->violations;
    it->max_ratio = std::max(it->max_ratio, row.ratio());
  }
  return result;
}

void write_probe_csv(std::ostream& out, const std::vector<ProbeRow>& rows) {
  out.precision(17);
  out << "N,re_w,im_w,re_z,im_z,probe,statistic,bound,ratio,violated\n";
  for (const auto& r : rows)
    out << r.dimension << ',' << r.w.real() << ',' << r.w.imag() << ',' << r.z.real() << ','
        << r.z.imag() << ',' << r.probe << ',' << r.statistic << ',' << r.bound << ',' << r.ratio()
        << ',' << (r.violated() ? 1 : 0) << '\n';
}

}  // namespace rmtlab
