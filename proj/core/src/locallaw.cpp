#include "rmtlab/locallaw.hpp"

#include "rmtlab/errors.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/stats.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>
#include <random>
#include <vector>

namespace rmtlab {
namespace {

using boost::math::quadrature::gauss_kronrod;
using cplx = std::complex<double>;

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Globally adaptive Gauss-Kronrod: bisects the panel with the largest error estimate until the
// summed estimate drops below abs_tol or the panel budget is spent.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol, double& error, std::size_t max_panels = 400) {
  if (!(b > a)) return 0.0;
  auto make = [&](double lo, double hi) {
    double e = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &e);
    // the non-adaptive estimate is reported on the reference interval [-1, 1]
    return Panel{lo, hi, v, e * 0.5 * (hi - lo)};
  };
  std::priority_queue<Panel> panels;
  panels.push(make(a, b));
  double value = panels.top().value;
  double total_error = panels.top().error;
  while (total_error > abs_tol && panels.size() < max_panels) {
    const Panel worst = panels.top();
    panels.pop();
    const double m = 0.5 * (worst.a + worst.b);
    const Panel left = make(worst.a, m);
    const Panel right = make(m, worst.b);
    value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  error += total_error;
  return value;
}

// Chord of the ray {rho e^{i theta} : rho >= 0} inside the disk |zeta - center| < radius,
// clipped to [0, cap].
std::pair<double, double> chord(double theta, cplx center, double radius, double cap) {
  const double b = std::real(std::polar(1.0, theta) * std::conj(center));
  const double disc = b * b - std::norm(center) + radius * radius;
  if (disc <= 0.0) return {0.0, 0.0};
  const double root = std::sqrt(disc);
  return {std::max(0.0, b - root), std::min(cap, b + root)};
}

// Directions (relative to arg(center)) where the clipped chord changes form: the ray turns
// tangent to the chord disk, passes its centre's perpendicular, or its far end meets |.| = cap.
std::vector<double> angle_breaks(double d, double radius, double cap) {
  std::vector<double> out;
  auto add = [&](double c) {
    if (c >= -1.0 && c <= 1.0) {
      out.push_back(std::acos(c));
      out.push_back(-std::acos(c));
    }
  };
  if (d > 0.0) {
    add(0.0);
    if (d >= radius) add(std::sqrt(1.0 - (radius * radius) / (d * d)));
    add((cap * cap + d * d - radius * radius) / (2.0 * cap * d));
  }
  return out;
}

}  // namespace

double disk_integral(const TestFunctionSpec& f, DiskRoute route, double tolerance) {
  if (f.f.amplitude == 0.0) return 0.0;
  const double k = f.scale();
  const double r = f.f.radius;
  // support_polar: xi = rho e^{i theta} about the bump centre, |zeta| < 1 reads |xi + k z0| < k.
  // disk_polar: zeta = rho e^{i theta} about the origin, restricted to |zeta - z0| < r / k.
  const bool support = route == DiskRoute::support_polar;
  const cplx center = support ? -k * f.z0 : f.z0;
  const double radius = support ? k : f.support_radius();
  const double cap = support ? r : 1.0;
  auto integrand = [&](double rho, double theta) {
    return (support ? f.f.value(rho) : f.value(std::polar(rho, theta))) * rho;
  };

  double t0 = -std::numbers::pi;
  double t1 = std::numbers::pi;
  const double d = std::abs(center);
  const double phi = d > 0.0 ? std::arg(center) : 0.0;
  if (d >= radius) {
    // origin outside the chord disk: only a window of directions meets it
    const double half = std::asin(std::min(1.0, radius / d));
    t0 = -half;
    t1 = half;
  }
  auto breaks = angle_breaks(d, radius, cap);
  breaks.push_back(t0);
  breaks.push_back(t1);
  std::sort(breaks.begin(), breaks.end());

  // Absolute tolerances relative to the full-plane integral, which bounds the result.
  const double total = f.f.integral();
  const double inner_tol = tolerance * total / (20.0 * std::numbers::pi);
  double inner_worst = 0.0;
  auto radial = [&](double theta) {
    const auto [lo, hi] = chord(theta + phi, center, radius, cap);
    double e = 0.0;
    const double v = integrate([&](double rho) { return integrand(rho, theta + phi); }, lo, hi, inner_tol, e);
    inner_worst = std::max(inner_worst, e);
    return v;
  };
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::max(breaks[i], t0);
    const double b = std::min(breaks[i + 1], t1);
    value += integrate(radial, a, b, tolerance * total / double(breaks.size()), error);
  }
  if (error + 2.0 * std::numbers::pi * inner_worst > 10.0 * tolerance * total)
    throw QuadratureError("disk integral did not reach its tolerance");
  return value;
}

LocalStatRecord local_statistic(const std::vector<cplx>& mu, const TestFunctionSpec& f, std::uint64_t seed,
                                const double* disk) {
  if (mu.size() != f.dimension)
    throw InvalidArgument("local_statistic: eigenvalue count differs from the test function's N");
  const double d = disk ? *disk : disk_integral(f);
  return {f.dimension, f.s, f.z0, seed, girko_lhs(f, mu) - d / std::numbers::pi};
}

LocalStatRecord local_statistic(const MatrixSample& sample, const TestFunctionSpec& f) {
  return local_statistic(eigenvalues(sample), f, sample.seed);
}

ScalingResult scaling_experiment(const EnsembleSpec& spec, const Bump& f, double s, cplx z0,
                                 const std::vector<std::size_t>& sizes, std::size_t trials, std::uint64_t seed,
                                 const ScalingOptions& options) {
  if (sizes.size() < 3) throw InsufficientTrials("scaling_experiment needs at least 3 values of N");
  if (trials < 20) throw InsufficientTrials("scaling_experiment needs at least 20 trials per N");
  ScalingResult result;
  result.level = options.level;
  std::vector<std::vector<double>> magnitudes;
  for (std::size_t n : sizes) {
    const TestFunctionSpec fs{f, z0, s, n};
    const double disk = disk_integral(fs);
    EnsembleSpec sn = spec;
    sn.dimension = n;
    sn.validate();
    std::vector<LocalStatRecord> recs(trials);
    parallel_for(trials, options.threads, [&](std::size_t t) {
      const MatrixSample sample = sample_matrix(sn, trial_seed(seed, t));
      recs[t] = local_statistic(eigenvalues(sample), fs, sample.seed, &disk);
    });
    std::vector<double> mags;
    for (const auto& r : recs) mags.push_back(std::abs(r.L));
    result.table.push_back({n, stats::quantile(mags, options.level), trials});
    magnitudes.push_back(std::move(mags));
    result.records.insert(result.records.end(), recs.begin(), recs.end());
  }
  std::vector<double> lx, ly;
  for (const auto& row : result.table) {
    lx.push_back(std::log(static_cast<double>(row.dimension)));
    ly.push_back(std::log(row.quantile));
  }
  const auto fit = stats::least_squares(lx, ly);
  result.slope = fit.slope;
  result.intercept = fit.intercept;

  std::mt19937_64 rng(seed ^ 0xB0075A9ULL);
  std::vector<double> slopes;
  for (std::size_t rep = 0; rep < options.bootstrap; ++rep) {
    std::vector<double> by;
    for (const auto& mags : magnitudes) {
      std::uniform_int_distribution<std::size_t> pick(0, mags.size() - 1);
      std::vector<double> resampled(mags.size());
      for (auto& v : resampled) v = mags[pick(rng)];
      by.push_back(std::log(stats::quantile(resampled, options.level)));
    }
    slopes.push_back(stats::least_squares(lx, by).slope);
  }
  if (!slopes.empty()) {
    result.slope_low = stats::quantile(slopes, 0.025);
    result.slope_high = stats::quantile(slopes, 0.975);
  }
  return result;
}

DominationProbeResult domination_probe(const std::function<double(std::size_t, std::size_t)>& sampler,
                                       const std::function<double(std::size_t)>& psi,
                                       const std::vector<double>& sigmas, const std::vector<std::size_t>& sizes,
                                       std::size_t trials) {
  DominationProbeResult out;
  for (std::size_t n : sizes) {
    const double p = psi(n);
    if (!(p > 0.0)) throw InvalidArgument("domination_probe requires Psi(N) > 0");
    std::vector<double> w(trials);
    for (std::size_t t = 0; t < trials; ++t) w[t] = std::abs(sampler(n, t));
    for (double sigma : sigmas) {
      DominationRow row{sigma, n, trials, 0};
      const double bound = std::pow(static_cast<double>(n), sigma) * p;
      for (double v : w)
        if (v > bound) ++row.exceedances;
      out.rows.push_back(row);
    }
  }
  return out;
}

void write_local_records_csv(std::ostream& out, const std::vector<LocalStatRecord>& records) {
  out.precision(17);
  out << "N,s,re_z0,im_z0,seed,L\n";
  for (const auto& r : records)
    out << r.dimension << ',' << r.s << ',' << r.z0.real() << ',' << r.z0.imag() << ',' << r.seed << ','
        << r.L << '\n';
}

void write_scaling_csv(std::ostream& out, const ScalingResult& result) {
  out.precision(17);
  out << "N,quantile,fitted\n";
  for (const auto& row : result.table)
    out << row.dimension << ',' << row.quantile << ','
        << std::exp(result.intercept) * std::pow(static_cast<double>(row.dimension), result.slope) << '\n';
}

void write_domination_csv(std::ostream& out, const DominationProbeResult& result) {
  out.precision(17);
  out << "sigma,N,trials,exceedances,frequency\n";
  for (const auto& r : result.rows)
    out << r.sigma << ',' << r.dimension << ',' << r.trials << ',' << r.exceedances << ',' << r.frequency()
        << '\n';
}

}  // namespace rmtlab
