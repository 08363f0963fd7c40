#include "rmtlab/experiments.hpp"

#include "rmtlab/comparison.hpp"
#include "rmtlab/density.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/green.hpp"
#include "rmtlab/locallaw.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace rmtlab {
namespace {

using ojson = nlohmann::ordered_json;

constexpr double kIdentityTolerance = 1e-8;
constexpr double kMassTolerance = 1e-3;
constexpr double kSolverTolerance = 1e-10;
constexpr double kGirkoTolerance = 1e-2;
constexpr double kDifferenceTolerance = 1e-6;

ojson cjson(cplx c) { return ojson::array({c.real(), c.imag()}); }

template <class Writer>
Table make_table(std::string name, Writer&& write) {
  std::ostringstream out;
  out.precision(17);
  write(out);
  return {std::move(name), out.str()};
}

std::string drop_header(const std::string& csv) { return csv.substr(csv.find('\n') + 1); }

cplx first_or(const std::vector<cplx>& v, cplx fallback) { return v.empty() ? fallback : v.front(); }

void check(ExperimentOutput& out, bool ok, const std::string& what) {
  if (!ok) out.failures.push_back(what);
}

ExperimentOutput identities(const ExperimentConfig& c) {
  const auto& p = c.params;
  const std::size_t n = p.sizes.front();
  if (n < 8) throw InvalidArgument("identities experiment needs N >= 8");
  ExperimentOutput out;
  std::ostringstream rows;
  rows.precision(17);
  rows << "trial,check,residual,defined\n";
  double worst = 0.0;
  std::size_t undefined = 0;
  for (std::size_t t = 0; t < p.trials; ++t) {
    const MatrixSample sample = sample_matrix(c.ensemble(n), trial_seed(p.seed, t));
    std::mt19937_64 g(trial_seed(p.seed, t) * 0x9E3779B97F4A7C15ULL + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const cplx w(0.2 + 3.8 * u(g), std::pow(10.0, -1.5 + 2.0 * u(g)));
    const cplx z = std::polar(1.5 * u(g), 2.0 * std::numbers::pi * u(g));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    const std::size_t nt = g() % 3;
    const std::size_t nu = g() % 3;
    MinorIndex minor;
    minor.cols.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nt));
    minor.rows.assign(perm.begin() + 2, perm.begin() + 2 + static_cast<std::ptrdiff_t>(nu));
    const std::size_t k = perm[4];
    const GreenState state = green(sample, z, w, minor);
    ResidualReport report = minor_identity_residual(state, k);
    report.push_back({"trace relation", trace_relation_residual(state), true});
    const GreenState plain = green(sample, z, w);
    for (auto& r : schur_identity_residual(plain, minor.cols, perm[5], perm[6])) report.push_back(r);
    for (const auto& r : report) {
      rows << t << ',' << r.name << ',' << r.residual << ',' << (r.defined ? 1 : 0) << '\n';
      if (r.defined) worst = std::max(worst, r.residual);
      else ++undefined;
    }
  }
  out.tables.push_back({"identities", rows.str()});
  ojson s;
  s["N"] = n;
  s["configurations"] = p.trials;
  s["max_residual"] = worst;
  s["tolerance"] = kIdentityTolerance;
  s["undefined_checks"] = undefined;
  check(out, worst <= kIdentityTolerance, "identity residual above tolerance");
  out.summary = s.dump();
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> x(static_cast<std::size_t>(std::max(points, 2)));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = lo + (hi - lo) * double(i) / double(x.size() - 1);
  return x;
}

ExperimentOutput density(const ExperimentConfig& c) {
  const auto& p = c.params;
  ExperimentOutput out;
  const std::vector<cplx> zs = p.z.empty() ? std::vector<cplx>{0.0} : p.z;
  const auto x = linear_grid(p.x_min, p.x_max, p.points);
  ojson s;
  s["curves"] = ojson::array();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const DensityCurve curve = rho_c_curve(x, zs[i], p.eta);
    const bool mp = zs[i] == cplx(0.0);
    out.tables.push_back(make_table(i == 0 ? "density" : "density_" + std::to_string(i),
                                    [&](std::ostream& o) { write_density_csv(o, curve, mp); }));
    const EdgeData edges = lambda_pm(zs[i]);
    const double mass = rho_c_mass(zs[i]);
    ojson e;
    e["z"] = cjson(zs[i]);
    e["mass"] = mass;
    e["lambda_minus"] = std::isfinite(edges.lambda_minus) ? ojson(edges.lambda_minus) : ojson(nullptr);
    e["lambda_plus"] = edges.lambda_plus;
    s["curves"].push_back(e);
    check(out, std::abs(mass - 1.0) <= kMassTolerance, "density mass off at z index " + std::to_string(i));
  }
  if (!p.w.empty()) {
    std::vector<SelfConsistentPoint> points;
    double worst = 0.0;
    for (cplx z : zs)
      for (cplx w : p.w) {
        points.push_back(mc_solve(w, z));
        worst = std::max(worst, points.back().residual);
      }
    out.tables.push_back(make_table("mc_table", [&](std::ostream& o) { write_mc_table_csv(o, points); }));
    s["max_solver_residual"] = worst;
    check(out, worst <= kSolverTolerance, "self-consistent residual above tolerance");
  }
  out.summary = s.dump();
  return out;
}

ExperimentOutput spectra(const ExperimentConfig& c) {
  const auto& p = c.params;
  ExperimentOutput out;
  ojson s;
  s["sizes"] = ojson::array();
  std::ostringstream ks_rows;
  ks_rows.precision(17);
  ks_rows << "N,trial,re_z,im_z,ks\n";
  for (std::size_t n : p.sizes) {
    std::vector<double> fractions;
    std::vector<double> ks;
    for (std::size_t t = 0; t < p.trials; ++t) {
      const MatrixSample sample = sample_matrix(c.ensemble(n), trial_seed(p.seed, t));
      const auto mu = eigenvalues(sample);
      if (n == p.sizes.front() && t == 0)
        out.tables.push_back(make_table("eigenvalues", [&](std::ostream& o) { write_eigenvalues_csv(o, mu); }));
      const auto inside = std::count_if(mu.begin(), mu.end(), [](cplx m) { return std::abs(m) < 0.8; });
      fractions.push_back(double(inside) / double(n));
      for (cplx z : p.z) {
        const double d = empirical_vs_rho(sample, z).ks;
        ks.push_back(d);
        ks_rows << n << ',' << t << ',' << z.real() << ',' << z.imag() << ',' << d << '\n';
      }
    }
    const double sigma = std::sqrt(0.64 * 0.36 / double(n) / double(fractions.size()));
    ojson e;
    e["N"] = n;
    e["trials"] = p.trials;
    e["headcount_fraction"] = stats::mean(fractions);
    e["expected_fraction"] = 0.64;
    e["binomial_sigma"] = sigma;
    e["z_score"] = (stats::mean(fractions) - 0.64) / sigma;
    if (!ks.empty()) e["mean_ks"] = stats::mean(ks);
    s["sizes"].push_back(e);
  }
  if (!p.z.empty()) out.tables.push_back({"ks", ks_rows.str()});
  out.summary = s.dump();
  return out;
}

ExperimentOutput girko(const ExperimentConfig& c) {
  const auto& p = c.params;
  const std::size_t n = p.sizes.front();
  ExperimentOutput out;
  const TestFunctionSpec f{Bump{}, p.z0, p.s, n};
  GirkoGrid grid;
  grid.nodes_per_side = p.grid_nodes;
  std::ostringstream rows;
  rows.precision(17);
  rows << "trial,lhs,rhs,relative_gap,rejected_nodes\n";
  double worst = 0.0;
  for (std::size_t t = 0; t < p.trials; ++t) {
    const MatrixSample sample = sample_matrix(c.ensemble(n), trial_seed(p.seed, t));
    const double lhs = girko_lhs(f, eigenvalues(sample));
    const GirkoResult rhs = girko_rhs(f, sample, grid);
    const double gap = std::abs(lhs - rhs.value) / std::max(std::abs(lhs), 1e-300);
    worst = std::max(worst, gap);
    rows << t << ',' << lhs << ',' << rhs.value << ',' << gap << ',' << rhs.rejected_nodes << '\n';
  }
  out.tables.push_back({"girko", rows.str()});
  ojson s;
  s["N"] = n;
  s["grid_nodes"] = p.grid_nodes;
  s["max_relative_gap"] = worst;
  s["tolerance"] = kGirkoTolerance;
  check(out, worst <= kGirkoTolerance, "Girko relative gap above tolerance");
  out.summary = s.dump();
  return out;
}

ExperimentOutput scaling(const ExperimentConfig& c) {
  const auto& p = c.params;
  ExperimentOutput out;
  ScalingOptions options;
  options.level = p.level;
  options.bootstrap = p.bootstrap;
  options.threads = c.threads;
  const ScalingResult r =
      scaling_experiment(c.ensemble(p.sizes.front()), Bump{}, p.s, p.z0, p.sizes, p.trials, p.seed, options);
  out.tables.push_back(make_table("records", [&](std::ostream& o) { write_local_records_csv(o, r.records); }));
  out.tables.push_back(make_table("scaling", [&](std::ostream& o) { write_scaling_csv(o, r); }));
  ojson s;
  s["level"] = r.level;
  s["slope"] = r.slope;
  s["intercept"] = r.intercept;
  s["band"] = {r.slope_low, r.slope_high};
  s["predicted_slope"] = -1.0 + 2.0 * p.s;
  s["within_0.15_of_prediction"] = std::abs(r.slope - (-1.0 + 2.0 * p.s)) <= 0.15;
  out.summary = s.dump();
  return out;
}

ExperimentOutput probes(const ExperimentConfig& c) {
  const auto& p = c.params;
  ExperimentOutput out;
  const std::vector<cplx> ws = p.w.empty() ? std::vector<cplx>{{1.0, 0.05}} : p.w;
  const std::vector<cplx> zs = p.z.empty() ? std::vector<cplx>{p.z0} : p.z;
  std::vector<ProbeGridNode> grid;
  for (cplx w : ws)
    for (cplx z : zs) grid.push_back({w, z});
  std::string csv;
  ojson s;
  s["summary"] = ojson::array();
  for (std::size_t n : p.sizes) {
    const EnsembleSpec spec = c.ensemble(n);
    const BoundProbeResult r = bound_probe(
        [&](std::size_t t) { return sample_matrix(spec, trial_seed(p.seed, t)); }, grid, p.trials);
    std::ostringstream o;
    o.precision(17);
    write_probe_csv(o, r.rows);
    csv += csv.empty() ? o.str() : drop_header(o.str());
    for (const auto& row : r.summary) {
      ojson e;
      e["N"] = n;
      e["probe"] = row.probe;
      e["evaluations"] = row.evaluations;
      e["violations"] = row.violations;
      e["frequency"] = row.frequency();
      e["max_ratio"] = row.max_ratio;
      e["deterministic_bound"] = row.deterministic;
      s["summary"].push_back(e);
    }
  }
  out.tables.push_back({"probes", csv});
  out.summary = s.dump();
  return out;
}

FunctionalConfig functional_config(const ExperimentParameters& p) {
  FunctionalConfig f;
  f.z0 = p.z0;
  f.s = p.s;
  f.epsilon = p.epsilon;
  return f;
}

ExperimentOutput functional(const ExperimentConfig& c) {
  const auto& p = c.params;
  const std::size_t n = p.sizes.front();
  ExperimentOutput out;
  const MatrixSample sample = sample_matrix(c.ensemble(n), p.seed);
  const FunctionalConfig fc = functional_config(p);
  const FunctionalResult r = evaluate_functionals(sample.entries, fc, true);
  out.tables.push_back(make_table("functional_nodes", [&](std::ostream& o) { write_functional_nodes_csv(o, r.audit); }));
  const auto ps = script_p_all(zero_entry(sample, p.a, p.b).entries, p.a, p.b, fc);
  ojson s;
  s["N"] = n;
  s["A"] = r.a;
  s["Z"] = r.z;
  s["gap"] = std::abs(r.a - r.z);
  s["budget"] = r.budget;
  s["within_budget"] = std::abs(r.a - r.z) <= r.budget;
  s["nodes"] = r.nodes;
  s["invalid_nodes"] = r.invalid_nodes;
  s["saturated_fraction"] = r.saturated_fraction;
  s["P1"] = ps[0];
  s["P2"] = ps[1];
  s["P3"] = ps[2];
  out.summary = s.dump();
  return out;
}

ExperimentOutput compare(const ExperimentConfig& c) {
  const auto& p = c.params;
  const std::size_t n = p.sizes.front();
  ExperimentOutput out;
  EnsembleSpec prime = c.ensemble(n);
  prime.law = p.law_prime;
  const MatrixSample x = sample_matrix(c.ensemble(n), p.seed);
  const MatrixSample xp = sample_matrix(prime, trial_seed(p.seed, 1));
  const std::size_t k = p.k ? p.k : p.a * n + p.b + 1;
  const cplx w = first_or(p.w, {1.0, 0.05});
  const cplx z = first_or(p.z, p.z0);
  const SwapState state = swap_setup(x.entries, xp.entries, k, w, z);
  const auto series = p_coefficients(state, PRoute::series);
  const double h = 1e-5;
  const double fd = (exact_difference(state, h) - exact_difference(state, -h)) / (2.0 * h);
  const double fd_rel = std::abs(fd - series[0]) / std::abs(series[0]);
  const std::vector<double> v = p.v.empty() ? std::vector<double>{0.0125, 0.025, 0.05, 0.1} : p.v;
  const auto rows = expansion_residual(state, v);
  out.tables.push_back(make_table("expansion", [&](std::ostream& o) { write_expansion_csv(o, rows); }));
  const BCoefficients bc = b_coefficients(state, p.epsilon);
  ojson s;
  s["N"] = n;
  s["k"] = k;
  s["a"] = state.a;
  s["b"] = state.b;
  s["w"] = cjson(w);
  s["z"] = cjson(z);
  s["P_series"] = series;
  if (z.imag() == 0.0) s["P_explicit"] = p_coefficients(state, PRoute::explicit_real);
  s["P1_finite_difference"] = fd;
  s["P1_relative_error"] = fd_rel;
  s["interlacing_ok"] = state.interlacing_ok;
  s["B"] = bc.b;
  s["t"] = bc.t;
  s["B_scale"] = bc.scale;
  check(out, fd_rel <= kDifferenceTolerance, "P1 does not match the finite difference");
  out.summary = s.dump();
  return out;
}

ExperimentOutput half_gain(const ExperimentConfig& c) {
  const auto& p = c.params;
  ExperimentOutput out;
  // near the origin the cutoff h(t_X) is switched on for typical samples
  const cplx w = first_or(p.w, {0.05, 0.05});
  const cplx z = first_or(p.z, p.z0);
  std::ostringstream rows;
  rows.precision(17);
  rows << "N,trials,abs_mean,std_error,median_abs,ratio,pooled_abs_mean,pooled_std_error,pooled_median_abs,"
          "pooled_ratio\n";
  std::vector<HalfGainReport> reports;
  for (std::size_t n : p.sizes) {
    const auto r = half_gain_probe(c.ensemble(n), p.a, p.b, w, z, p.trials, p.seed, p.epsilon);
    rows << r.dimension << ',' << r.trials << ',' << r.abs_mean << ',' << r.std_error << ',' << r.median_abs << ','
         << r.ratio << ',' << r.pooled_abs_mean << ',' << r.pooled_std_error << ',' << r.pooled_median_abs << ','
         << r.pooled_ratio << '\n';
    reports.push_back(r);
  }
  out.tables.push_back({"half_gain", rows.str()});
  ojson s;
  s["w"] = cjson(w);
  s["z"] = cjson(z);
  s["ratio_factor"] = reports.front().ratio / reports.back().ratio;
  s["pooled_ratio_factor"] = reports.front().pooled_ratio / reports.back().pooled_ratio;
  out.summary = s.dump();
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::identities: return identities(config);
    case Experiment::density: return density(config);
    case Experiment::spectra: return spectra(config);
    case Experiment::girko: return girko(config);
    case Experiment::scaling: return scaling(config);
    case Experiment::bound_probe: return probes(config);
    case Experiment::functional: return functional(config);
    case Experiment::compare: return compare(config);
    case Experiment::half_gain: return half_gain(config);
  }
  throw InvalidArgument("unknown experiment");
}

}  // namespace rmtlab
