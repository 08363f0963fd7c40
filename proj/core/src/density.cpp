#include "rmtlab/density.hpp"

#include "rmtlab/errors.hpp"
#include "rmtlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace rmtlab {
namespace {

constexpr double kHerglotzFloor = 1e-14;

cplx cubic_value(const std::array<cplx, 4>& c, cplx x) { return ((c[0] * x + c[1]) * x + c[2]) * x + c[3]; }
cplx cubic_slope(const std::array<cplx, 4>& c, cplx x) { return (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]; }

cplx polish_cubic(const std::array<cplx, 4>& c, cplx x) {
  for (int it = 0; it < 4; ++it) {
    const cplx d = cubic_slope(c, x);
    if (std::abs(d) == 0.0) break;
    const cplx step = cubic_value(c, x) / d;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::abs(x)) break;
  }
  return x;
}

// One Newton step on F(m) = m^{-1} + w(1+m) - |z|^2 (1+m)^{-1}; kept only if it lowers |F|.
cplx polish_original(cplx m, cplx w, cplx z) {
  const double z2 = std::norm(z);
  const cplx f = self_consistent_lhs(m, w, z);
  const cplx df = -1.0 / (m * m) + w + z2 / ((1.0 + m) * (1.0 + m));
  if (std::abs(df) == 0.0) return m;
  const cplx candidate = m - f / df;
  return std::abs(self_consistent_lhs(candidate, w, z)) < std::abs(f) ? candidate : m;
}

std::string describe_roots(const std::array<cplx, 3>& roots) {
  std::ostringstream out;
  out.precision(6);
  out << "roots:";
  for (const auto& r : roots) out << " (" << r.real() << (r.imag() < 0 ? "" : "+") << r.imag() << "i)";
  return out.str();
}

}  // namespace

cplx self_consistent_lhs(cplx m, cplx w, cplx z) {
  return 1.0 / m + w * (1.0 + m) - std::norm(z) / (1.0 + m);
}

std::array<cplx, 4> mc_cubic(cplx w, cplx z) {
  return {w, 2.0 * w, w + 1.0 - std::norm(z), cplx(1.0, 0.0)};
}

std::array<cplx, 3> cubic_roots(const std::array<cplx, 4>& c) {
  if (c[0] == 0.0) throw InvalidArgument("cubic_roots: leading coefficient is zero");
  const cplx a = c[1] / c[0];
  const cplx b = c[2] / c[0];
  const cplx d = c[3] / c[0];
  const cplx p = b - a * a / 3.0;
  const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -q / 2.0 + disc;
  if (const cplx alt = -q / 2.0 - disc; std::abs(alt) > std::abs(u3)) u3 = alt;
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<cplx, 3> roots;
  if (std::abs(u3) == 0.0) {
    roots.fill(-a / 3.0);
  } else {
    cplx u = std::pow(u3, 1.0 / 3.0);
    for (auto& r : roots) {
      r = u - p / (3.0 * u) - a / 3.0;
      u *= omega;
    }
  }
  for (auto& r : roots) r = polish_cubic(c, r);
  return roots;
}

SelfConsistentPoint mc_solve(cplx w, cplx z) {
  if (!(w.imag() > 0.0)) throw InvalidArgument("mc_solve requires Im w > 0");
  SelfConsistentPoint pt;
  pt.w = w;
  pt.z = z;
  pt.roots = cubic_roots(mc_cubic(w, z));
  std::vector<int> candidates;
  for (int i = 0; i < 3; ++i)
    if (pt.roots[i].imag() > kHerglotzFloor) candidates.push_back(i);
  if (candidates.size() > 1) {
    // A Stieltjes transform of a measure on [0, inf) obeys |m| <= 1/eta and Im(w m) >= 0.
    const double eta = w.imag();
    std::vector<int> kept;
    for (int i : candidates) {
      const cplx r = pt.roots[i];
      if (std::abs(r) <= (1.0 + 1e-8) / eta && (w * r).imag() >= -1e-10 * std::abs(w * r))
        kept.push_back(i);
    }
    candidates = kept;
  }
  if (candidates.size() != 1)
    throw SolveError("mc_solve: " + std::to_string(candidates.size()) +
                     " Herglotz roots, " + describe_roots(pt.roots));
  pt.selected = candidates.front();
  pt.m = polish_original(pt.roots[pt.selected], w, z);
  pt.residual = std::abs(self_consistent_lhs(pt.m, w, z));
  pt.branch_note = "selected root " + std::to_string(pt.selected) + "; " + describe_roots(pt.roots);
  return pt;
}

EdgeData lambda_pm(cplx z) {
  EdgeData e;
  e.z = z;
  e.alpha = std::sqrt(1.0 + 8.0 * std::norm(z));
  const double a = e.alpha;
  e.lambda_plus = std::pow(a + 3.0, 3) / (8.0 * (a + 1.0));
  e.lambda_minus = a == 1.0 ? -std::numeric_limits<double>::infinity()
                            : std::pow(a - 3.0, 3) / (8.0 * (a - 1.0));
  return e;
}

double rho_c(double x, cplx z, double eta) {
  const EdgeData edge = lambda_pm(z);
  if (!(x > edge.support_lower() && x < edge.support_upper())) return 0.0;
  const double h = std::min(eta, x / 100.0);
  const double coarse = mc_solve({x, h}, z).m.imag();
  const double fine = mc_solve({x, h / 2.0}, z).m.imag();
  return std::max(0.0, (2.0 * fine - coarse) / std::numbers::pi);
}

DensityCurve rho_c_curve(const std::vector<double>& x, cplx z, double eta) {
  DensityCurve curve{z, eta, x, std::vector<double>(x.size(), 0.0), std::vector<bool>(x.size(), true)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    try {
      curve.rho[i] = rho_c(x[i], z, eta);
    } catch (const SolveError&) {
      curve.valid[i] = false;
    }
  }
  return curve;
}

namespace {

// Nodes x_i = lower + (upper - lower) u_i^3 and the integrand rho(x(u)) x'(u).
void mapped_density(cplx z, int nodes, double eta, std::vector<double>& x, std::vector<double>& g,
                    double& du) {
  if (nodes < 2) throw InvalidArgument("density quadrature needs at least two nodes");
  const EdgeData edge = lambda_pm(z);
  const double lo = edge.support_lower();
  const double width = edge.support_upper() - lo;
  du = 1.0 / (nodes - 1);
  x.resize(nodes);
  g.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double u = i * du;
    x[i] = lo + width * u * u * u;
    g[i] = rho_c(x[i], z, eta) * 3.0 * width * u * u;
  }
}

}  // namespace

double rho_c_mass(cplx z, int nodes, double eta) {
  std::vector<double> x, g;
  double du = 0.0;
  mapped_density(z, nodes, eta, x, g, du);
  double sum = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) sum += 0.5 * (g[i - 1] + g[i]) * du;
  return sum;
}

DensityCdf::DensityCdf(cplx z, int nodes, double eta) {
  std::vector<double> g;
  double du = 0.0;
  mapped_density(z, nodes, eta, x_, g, du);
  cdf_.assign(x_.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) cdf_[i] = cdf_[i - 1] + 0.5 * (g[i - 1] + g[i]) * du;
  mass_ = cdf_.back();
  for (double& c : cdf_) c /= mass_;
}

double DensityCdf::operator()(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::size_t>(it - x_.begin());
  const double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
}

cplx mp_stieltjes(cplx w) {
  const cplx root = std::sqrt(1.0 - 4.0 / w);
  const cplx a = (-1.0 + root) / 2.0;
  const cplx b = (-1.0 - root) / 2.0;
  return a.imag() > b.imag() ? a : b;
}

double mp_density(double x) {
  if (!(x > 0.0 && x < 4.0)) return 0.0;
  return std::sqrt((4.0 - x) / x) / (2.0 * std::numbers::pi);
}

double kolmogorov_distance(const std::vector<double>& lambda, const DensityCdf& cdf) {
  const double n = static_cast<double>(lambda.size());
  double d = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double f = cdf(lambda[i]);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
  }
  return d;
}

EmpiricalComparison empirical_vs_rho(const MatrixSample& sample, cplx z,
                                     const std::vector<cplx>& w_grid) {
  EmpiricalComparison out;
  const auto lambda = singular_squares(sample, z);
  out.degenerate_input = lambda.back() - lambda.front() <= 1e-14 * std::max(1.0, lambda.back());
  out.ks = kolmogorov_distance(lambda, DensityCdf(z));
  const double n = static_cast<double>(lambda.size());
  for (const cplx& w : w_grid) {
    cplx m = 0.0;
    for (double l : lambda) m += 1.0 / (l - w);
    out.w.push_back(w);
    out.m_empirical.push_back(m / n);
    out.m_c.push_back(mc_solve(w, z).m);
  }
  return out;
}

void write_density_csv(std::ostream& out, const DensityCurve& curve, bool mp_reference) {
  out.precision(17);
  out << "x,rho" << (mp_reference ? ",rho_mp_reference" : "") << '\n';
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out << curve.x[i] << ',';
    if (curve.valid[i]) out << curve.rho[i];
    else out << "nan";
    if (mp_reference) out << ',' << mp_density(curve.x[i]);
    out << '\n';
  }
}

void write_mc_table_csv(std::ostream& out, const std::vector<SelfConsistentPoint>& points) {
  out.precision(17);
  out << "re_w,im_w,re_mc,im_mc,residual\n";
  for (const auto& p : points)
    out << p.w.real() << ',' << p.w.imag() << ',' << p.m.real() << ',' << p.m.imag() << ','
        << p.residual << '\n';
}

}  // namespace rmtlab
