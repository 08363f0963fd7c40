#include "rmtlab/comparison.hpp"

#include "rmtlab/density.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/green.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace rmtlab {
namespace {

using Index = Eigen::Index;
using Mat2 = Eigen::Matrix2cd;

Eigen::MatrixXcd hermitian_resolvent(const Eigen::MatrixXcd& y, cplx w) {
  const Index n = y.cols();
  Eigen::MatrixXcd a = y.adjoint() * y;
  a.diagonal().array() -= w;
  Eigen::MatrixXcd g = a.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
  if (!g.allFinite()) throw SolveError("swap resolvent solve produced non-finite entries");
  return g;
}

Eigen::MatrixXcd co_resolvent(const Eigen::MatrixXcd& y, cplx w) {
  return hermitian_resolvent(y.adjoint(), w);
}

void require_real(const Eigen::MatrixXcd& x, const char* what) {
  if (x.imag().cwiseAbs().maxCoeff() > 0.0)
    throw InvalidArgument(std::string(what) + ": the swap expansion needs real entries");
}

std::vector<cplx> xi_grid(const Bump& f, int n, double& cell_area) {
  if (n < 1) throw InvalidArgument("xi grid needs at least one node");
  const double h = 2.0 * f.radius / n;
  cell_area = h * h;
  std::vector<cplx> out;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const cplx xi(-f.radius + (ix + 0.5) * h, -f.radius + (iy + 0.5) * h);
      if (f.laplacian(xi) != 0.0) out.push_back(xi);
    }
  return out;
}

}  // namespace

double t_statistic(cplx m, std::size_t n, double epsilon, double eta) {
  const double nd = static_cast<double>(n);
  return std::pow(nd, -epsilon) * nd * eta * m.real();
}

double t_statistic(const MatrixSample& sample, double epsilon, cplx w, cplx z) {
  const auto lambda = singular_squares(sample, z);
  cplx m = 0.0;
  for (double l : lambda) m += 1.0 / (l - w);
  m /= static_cast<double>(lambda.size());
  return t_statistic(m, sample.dimension(), epsilon, w.imag());
}

int chi_a_indicator(const MatrixSample& sample, std::size_t a, double epsilon, cplx w, cplx z) {
  const std::size_t n = sample.dimension();
  if (a >= n) throw InvalidArgument("chi_a index out of range");
  const cplx m_aa = minor_trace(sample.entries, z, w, {{a}, {a}});
  const double nd = static_cast<double>(n);
  return std::abs(m_aa.real()) >= 0.5 * std::pow(nd, epsilon) / (nd * w.imag()) ? 1 : 0;
}

FunctionalResult evaluate_functionals(const Eigen::MatrixXcd& x, const FunctionalConfig& config,
                                      bool keep_audit) {
  const auto n = static_cast<std::size_t>(x.rows());
  const double nd = static_cast<double>(n);
  const IntegrationDomain domain{n, config.epsilon, config.e_nodes, config.eta_nodes};
  const auto w_nodes = domain.nodes();
  const CutoffKit kit{config.epsilon, n};
  double cell = 0.0;
  const auto xis = xi_grid(config.f, config.xi_nodes, cell);
  const double shrink = std::pow(nd, -config.s);
  const double slack = 2.0 * std::pow(nd, config.epsilon) / nd;

  FunctionalResult r;
  std::size_t saturated = 0;
  for (const cplx& xi : xis) {
    const cplx z = config.z0 + shrink * xi;
    const double lap = config.f.laplacian(xi);
    const double lambda_plus = lambda_pm(z).lambda_plus;
    const auto lambda = singular_squares(x, z);
    for (const auto& node : w_nodes) {
      ++r.nodes;
      const cplx w(node.e, node.eta);
      const double weight = node.weight * cell;
      const double kernel = lap * cutoff_chi(node.eta) * kit.phi_prime(node.e, lambda_plus);
      r.budget += std::abs(kernel) * slack / node.eta * weight;
      cplx m = 0.0;
      for (double l : lambda) m += 1.0 / (l - w);
      m /= nd;
      double mc_re = 0.0;
      try {
        mc_re = mc_solve(w, z).m.real();
      } catch (const SolveError&) {
        ++r.invalid_nodes;
        continue;
      }
      const double ht = cutoff_h(t_statistic(m, n, config.epsilon, node.eta));
      if (ht == 1.0) ++saturated;
      const double ia = kernel * (ht * m.real() - mc_re);
      const double iz = kernel * (m.real() - mc_re);
      r.a += ia * weight;
      r.z += iz * weight;
      if (keep_audit) r.audit.push_back({xi, node.e, node.eta, weight, nd * ia, nd * iz});
    }
  }
  if (r.nodes > 0 && double(r.invalid_nodes) > config.max_invalid_fraction * double(r.nodes))
    throw SolveError("functional quadrature: " + std::to_string(r.invalid_nodes) + " of " +
                     std::to_string(r.nodes) + " nodes failed the self-consistent solve");
  r.a *= nd;
  r.z *= nd;
  r.budget *= nd;
  r.saturated_fraction = r.nodes ? double(saturated) / double(r.nodes) : 0.0;
  return r;
}

double A_functional(const MatrixSample& sample, const FunctionalConfig& config) {
  return evaluate_functionals(sample.entries, config).a;
}

double Z_functional(const MatrixSample& sample, const FunctionalConfig& config) {
  return evaluate_functionals(sample.entries, config).z;
}

Eigen::MatrixXcd interpolate(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& x_prime, std::size_t k) {
  if (x.rows() != x_prime.rows() || x.cols() != x_prime.cols() || x.rows() != x.cols())
    throw InvalidArgument("interpolation needs two square matrices of the same size");
  const auto n = static_cast<std::size_t>(x.rows());
  if (k > n * n) throw InvalidArgument("swap counter beyond N^2");
  Eigen::MatrixXcd out = x_prime;
  for (std::size_t e = 0; e < k; ++e) {
    const auto a = static_cast<Index>(e / n);
    const auto b = static_cast<Index>(e % n);
    out(a, b) = x(a, b);
  }
  return out;
}

SwapState swap_setup(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& x_prime, std::size_t k,
                     cplx w, cplx z) {
  if (!(w.imag() > 0.0)) throw InvalidArgument("swap_setup requires Im w > 0");
  const auto n = static_cast<std::size_t>(x.rows());
  if (k < 1 || k > n * n) throw InvalidArgument("swap counter must lie in 1..N^2");
  require_real(x, "swap_setup");
  require_real(x_prime, "swap_setup");
  SwapState s;
  s.k = k;
  s.a = (k - 1) / n;
  s.b = (k - 1) % n;
  s.w = w;
  s.z = z;
  const auto ai = static_cast<Index>(s.a);
  const auto bi = static_cast<Index>(s.b);
  s.v = x_prime(ai, bi).real();
  s.u = x(ai, bi).real();
  s.q_tilde = interpolate(x, x_prime, k - 1);
  s.q_tilde(ai, bi) = 0.0;
  s.q = s.q_tilde;
  s.q.diagonal().array() -= z;
  s.R = hermitian_resolvent(s.q, w);
  s.calR = co_resolvent(s.q, w);
  Eigen::MatrixXcd y_prev = s.q;
  y_prev(ai, bi) += s.v;
  Eigen::MatrixXcd y_next = s.q;
  y_next(ai, bi) += s.u;
  s.S = hermitian_resolvent(y_prev, w);
  s.T = hermitian_resolvent(y_next, w);
  const double nd = static_cast<double>(n);
  s.m_R = s.R.trace() / nd;
  s.m_S = s.S.trace() / nd;
  s.m_T = s.T.trace() / nd;
  s.interlacing_ok = std::abs(s.m_S - s.m_R) <= 4.0 / (nd * w.imag());
  return s;
}

SwapEntries swap_entries(const SwapState& s) {
  const auto a = static_cast<Index>(s.a);
  const auto b = static_cast<Index>(s.b);
  const Eigen::MatrixXcd& R = s.R;
  const Eigen::RowVectorXcd qa = s.q.row(a);
  const Eigen::VectorXcd r_col_b = R.col(b);
  const Eigen::RowVectorXcd r_row_b = R.row(b);
  const Eigen::VectorXcd r2_col_b = R * r_col_b;
  const Eigen::RowVectorXcd r2_row_b = r_row_b * R;
  const Eigen::VectorXcd qa_star = qa.adjoint();
  const Eigen::VectorXcd r_qa_star = R * qa_star;
  SwapEntries e;
  e.w = s.w;
  e.dimension = s.dimension();
  e.R_bb = R(b, b);
  e.R2_bb = (r_row_b * r_col_b)(0, 0);
  e.QR_ab = (qa * r_col_b)(0, 0);
  e.QR2_ab = (qa * r2_col_b)(0, 0);
  e.RQs_ba = (r_row_b * qa_star)(0, 0);
  e.R2Qs_ba = (r2_row_b * qa_star)(0, 0);
  e.QRQs_aa = (qa * r_qa_star)(0, 0);
  e.QR2Qs_aa = (qa * (R * r_qa_star))(0, 0);
  e.calR_aa = s.calR(a, a);
  e.m_R = s.m_R;
  return e;
}

SvdEntries::SvdEntries(const Eigen::MatrixXcd& q, std::size_t a, std::size_t b)
    : n_(static_cast<std::size_t>(q.rows())) {
  if (a >= n_ || b >= n_) throw InvalidArgument("swap entry index out of range");
  const linalg::Svd d = linalg::svd(q);
  const auto ai = static_cast<Index>(a);
  const auto bi = static_cast<Index>(b);
  s_ = d.s;
  s2_ = d.s.array().square();
  va2_ = d.v.row(bi).cwiseAbs2().transpose();
  ua2_ = d.u.row(ai).cwiseAbs2().transpose();
  uv_ = d.u.row(ai).transpose().cwiseProduct(d.v.row(bi).conjugate().transpose());
  vu_ = uv_.conjugate();
}

SwapEntries SvdEntries::at(cplx w) const {
  SwapEntries e;
  e.w = w;
  e.dimension = n_;
  cplx sum_d = 0.0;
  for (Index j = 0; j < s_.size(); ++j) {
    const cplx d = 1.0 / (s2_[j] - w);
    const cplx d2 = d * d;
    sum_d += d;
    e.R_bb += va2_[j] * d;
    e.R2_bb += va2_[j] * d2;
    e.QR_ab += uv_[j] * s_[j] * d;
    e.QR2_ab += uv_[j] * s_[j] * d2;
    e.RQs_ba += vu_[j] * s_[j] * d;
    e.R2Qs_ba += vu_[j] * s_[j] * d2;
    e.QRQs_aa += ua2_[j] * s2_[j] * d;
    e.QR2Qs_aa += ua2_[j] * s2_[j] * d2;
    e.calR_aa += ua2_[j] * d;
  }
  e.m_R = sum_d / static_cast<double>(n_);
  return e;
}

std::array<double, 3> p_coefficients(const SwapEntries& e, PRoute route) {
  const double nd = static_cast<double>(e.dimension);
  const cplx w = e.w;
  if (route == PRoute::explicit_real) {
    const cplx p1 = -2.0 * e.QR2_ab;
    const cplx p2 = w * e.calR_aa * e.R2_bb + 2.0 * e.QR2_ab * e.RQs_ba + e.QR2Qs_aa * e.R_bb;
    const cplx p3 = -2.0 * e.RQs_ba * e.RQs_ba * e.QR2_ab - 2.0 * e.RQs_ba * e.QR2Qs_aa * e.R_bb -
                    2.0 * e.RQs_ba * w * e.calR_aa * e.R2_bb - 2.0 * w * e.calR_aa * e.R_bb * e.QR2_ab;
    return {p1.real() / nd, p2.real() / nd, p3.real() / nd};
  }
  // Y^*Y - Q^*Q = W K(v) W^* with W = [e_b, Q^* e_a] and K(v) = v K1 + v^2 K2, so
  // tr S - tr R = -tr[(I + K M)^{-1} K M2] with M = W^* R W and M2 = W^* R^2 W.
  Mat2 m, m2, k1, k2;
  m << e.R_bb, e.RQs_ba, e.QR_ab, e.QRQs_aa;
  m2 << e.R2_bb, e.R2Qs_ba, e.QR2_ab, e.QR2Qs_aa;
  k1 << 0.0, 1.0, 1.0, 0.0;
  k2 << 1.0, 0.0, 0.0, 0.0;
  const Mat2 a1 = k1 * m;
  const Mat2 a2 = k2 * m;
  const Mat2 f1 = k1;
  const Mat2 f2 = k2 - a1 * k1;
  const Mat2 f3 = -a1 * k2 + (a1 * a1 - a2) * k1;
  return {-(f1 * m2).trace().real() / nd, -(f2 * m2).trace().real() / nd,
          -(f3 * m2).trace().real() / nd};
}

std::array<double, 3> p_coefficients(const SwapState& state, PRoute route) {
  return p_coefficients(swap_entries(state), route);
}

double exact_difference(const SwapState& s, double v) {
  if (v == 0.0) return 0.0;
  const auto a = static_cast<Index>(s.a);
  const auto b = static_cast<Index>(s.b);
  Eigen::MatrixXcd y = s.q;
  y(a, b) += v;
  const Eigen::MatrixXcd sv = hermitian_resolvent(y, s.w);
  // S - R = -S D R with D = v e_b q_a + v q_a^* e_b^T + v^2 e_b e_b^T, so that the difference
  // is formed without cancellation.
  const Eigen::MatrixXcd p = s.R * sv;
  const Eigen::RowVectorXcd qa = s.q.row(a);
  cplx tr = v * (qa * p.col(b))(0, 0) + v * (p.row(b) * qa.adjoint())(0, 0) + v * v * p(b, b);
  return -tr.real() / static_cast<double>(s.dimension());
}

std::vector<ExpansionRow> expansion_residual(const SwapState& state, const std::vector<double>& v_values,
                                             PRoute route) {
  const auto p = p_coefficients(state, route);
  std::vector<ExpansionRow> rows;
  for (double v : v_values) {
    ExpansionRow row;
    row.v = v;
    row.residual = exact_difference(state, v) - (p[0] * v + p[1] * v * v + p[2] * v * v * v);
    row.scaled = v == 0.0 ? 0.0 : row.residual / (v * v * v * v);
    rows.push_back(row);
  }
  return rows;
}

BCoefficients b_coefficients(double t, double scale) {
  BCoefficients out;
  out.t = t;
  out.scale = scale;
  double factorial = 1.0;
  double power = 1.0;
  for (int n = 1; n <= 3; ++n) {
    factorial *= n;
    out.b[n - 1] = power * (n * cutoff_h(t, n - 1) + cutoff_h(t, n) * t) / factorial;
    power *= scale;
  }
  return out;
}

BCoefficients b_coefficients(const SwapState& state, double epsilon) {
  const std::size_t n = state.dimension();
  const double eta = state.w.imag();
  return b_coefficients(t_statistic(state.m_R, n, epsilon, eta),
                        std::pow(static_cast<double>(n), 1.0 - epsilon) * eta);
}

std::array<double, 3> b_sharp_constants() {
  std::array<double, 3> out{};
  for (int i = 0; i <= 30000; ++i) {
    const auto b = b_coefficients(i * 1e-4, 1.0);
    for (int n = 0; n < 3; ++n) out[n] = std::max(out[n], std::abs(b.b[n]));
  }
  return out;
}

std::array<double, 3> script_p_all(const Eigen::MatrixXcd& q_tilde, std::size_t a, std::size_t b,
                                   const FunctionalConfig& config) {
  const auto n = static_cast<std::size_t>(q_tilde.rows());
  if (a >= n || b >= n) throw InvalidArgument("script_p index out of range");
  if (q_tilde(static_cast<Index>(a), static_cast<Index>(b)) != 0.0)
    throw InvalidArgument("script_p expects the entry (a, b) to be zero");
  const double nd = static_cast<double>(n);
  const IntegrationDomain domain{n, config.epsilon, config.e_nodes, config.eta_nodes};
  const auto w_nodes = domain.nodes();
  const CutoffKit kit{config.epsilon, n};
  double cell = 0.0;
  const auto xis = xi_grid(config.f, config.xi_nodes, cell);
  const double shrink = std::pow(nd, -config.s);
  const double scale_base = std::pow(nd, 1.0 - config.epsilon);

  std::array<double, 3> out{};
  for (const cplx& xi : xis) {
    const cplx z = config.z0 + shrink * xi;
    const double lap = config.f.laplacian(xi);
    const double lambda_plus = lambda_pm(z).lambda_plus;
    Eigen::MatrixXcd q = q_tilde;
    q.diagonal().array() -= z;
    const SvdEntries entries(q, a, b);
    for (const auto& node : w_nodes) {
      const cplx w(node.e, node.eta);
      const SwapEntries e = entries.at(w);
      const auto p = p_coefficients(e, PRoute::series);
      const auto bc = b_coefficients(t_statistic(e.m_R, n, config.epsilon, node.eta),
                                     scale_base * node.eta).b;
      const double kernel = lap * cutoff_chi(node.eta) * kit.phi_prime(node.e, lambda_plus) *
                            node.weight * cell;
      out[0] += kernel * bc[0] * p[0];
      out[1] += kernel * (bc[0] * p[1] + bc[1] * p[0] * p[0]);
      out[2] += kernel * (bc[0] * p[2] + 2.0 * bc[1] * p[0] * p[1] + bc[2] * p[0] * p[0] * p[0]);
    }
  }
  for (double& v : out) v *= nd;
  return out;
}

double script_p(const MatrixSample& sample, std::size_t a, std::size_t b, const FunctionalConfig& config,
                int n) {
  if (n < 1 || n > 3) throw InvalidArgument("script_p order must be 1, 2 or 3");
  if (a == b) throw InvalidArgument("script_p requires a != b");
  return script_p_all(sample.entries, a, b, config)[static_cast<std::size_t>(n - 1)];
}

HalfGainReport half_gain_probe(const EnsembleSpec& spec, std::size_t a, std::size_t b, cplx w, cplx z,
                               std::size_t trials, std::uint64_t seed, double epsilon,
                               std::size_t min_trials) {
  if (trials < min_trials || trials < 2)
    throw InsufficientTrials("half_gain_probe needs at least " + std::to_string(min_trials) + " trials");
  if (a == b) throw InvalidArgument("half_gain_probe requires a != b");
  if (a >= spec.dimension || b >= spec.dimension) throw InvalidArgument("index out of range");
  const std::size_t n = spec.dimension;
  const double nd = static_cast<double>(n);
  const auto ai = static_cast<Index>(a);
  const auto bi = static_cast<Index>(b);
  std::vector<double> re, im, mag, pooled_re, pooled_im;
  for (std::size_t t = 0; t < trials; ++t) {
    const MatrixSample sample = sample_matrix(spec, trial_seed(seed, t));
    Eigen::MatrixXcd y = sample.entries;
    y.diagonal().array() -= z;
    const linalg::Svd d = linalg::svd(y);
    Eigen::VectorXcd sd(d.s.size());
    cplx m = 0.0;
    for (Index j = 0; j < d.s.size(); ++j) {
      const cplx g = 1.0 / (d.s[j] * d.s[j] - w);
      m += g;
      sd[j] = d.s[j] * g;
    }
    m /= nd;
    const double ht = cutoff_h(t_statistic(m, n, epsilon, w.imag()));
    // Y G = U diag(s / (s^2 - w)) V^*
    cplx entry = 0.0;
    for (Index j = 0; j < d.s.size(); ++j) entry += d.u(ai, j) * sd[j] * std::conj(d.v(bi, j));
    entry *= ht;
    re.push_back(entry.real());
    im.push_back(entry.imag());
    mag.push_back(std::abs(entry));
    const Eigen::VectorXcd col_sum_u = d.u.colwise().sum().transpose();
    const Eigen::VectorXcd col_sum_v = d.v.colwise().sum().transpose();
    cplx total = 0.0;
    cplx trace = 0.0;
    for (Index j = 0; j < d.s.size(); ++j) {
      total += col_sum_u[j] * sd[j] * std::conj(col_sum_v[j]);
      trace += sd[j] * d.v.col(j).dot(d.u.col(j));
    }
    const cplx pooled = ht * (total - trace) / (nd * (nd - 1.0));
    pooled_re.push_back(pooled.real());
    pooled_im.push_back(pooled.imag());
  }
  HalfGainReport r;
  r.dimension = n;
  r.trials = trials;
  r.mean = {stats::mean(re), stats::mean(im)};
  r.abs_mean = std::abs(r.mean);
  r.std_error = std::hypot(stats::standard_error(re), stats::standard_error(im));
  r.median_abs = stats::median(mag);
  r.ratio = r.median_abs > 0.0 ? r.abs_mean / r.median_abs : 0.0;
  // pairs are exchangeable, so the typical size of one entry serves as the pooled scale
  r.pooled_abs_mean = std::abs(cplx(stats::mean(pooled_re), stats::mean(pooled_im)));
  r.pooled_std_error = std::hypot(stats::standard_error(pooled_re), stats::standard_error(pooled_im));
  r.pooled_median_abs = r.median_abs;
  r.pooled_ratio = r.median_abs > 0.0 ? r.pooled_abs_mean / r.median_abs : 0.0;
  return r;
}

void write_functional_nodes_csv(std::ostream& out, const std::vector<FunctionalNode>& nodes) {
  out.precision(17);
  out << "re_xi,im_xi,E,eta,weight,integrand_a,integrand_z\n";
  for (const auto& n : nodes)
    out << n.xi.real() << ',' << n.xi.imag() << ',' << n.e << ',' << n.eta << ',' << n.weight << ','
        << n.integrand_a << ',' << n.integrand_z << '\n';
}

void write_expansion_csv(std::ostream& out, const std::vector<ExpansionRow>& rows) {
  out.precision(17);
  out << "v,residual,scaled\n";
  for (const auto& r : rows) out << r.v << ',' << r.residual << ',' << r.scaled << '\n';
}

}  // namespace rmtlab
