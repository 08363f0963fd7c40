// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any criterion fails.

#include "rmtlab/comparison.hpp"
#include "rmtlab/cutoff.hpp"
#include "rmtlab/density.hpp"
#include "rmtlab/ensemble.hpp"
#include "rmtlab/experiments.hpp"
#include "rmtlab/green.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/locallaw.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/stats.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace rmtlab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

EnsembleSpec spec_of(std::size_t n, EntryLaw law = EntryLaw::gaussian) {
  EnsembleSpec s;
  s.dimension = n;
  s.law = law;
  return s;
}

Verdict identities() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c;
  c.experiment = Experiment::identities;
  c.params.sizes = {64};
  c.params.trials = 50;
  c.params.seed = 20240;
  const ExperimentOutput out = run_experiment(c);
  const auto s = nlohmann::json::parse(out.summary);
  const double worst = s["max_residual"];
  const std::size_t undefined = s["undefined_checks"];
  const double t = seconds_since(start);
  return {worst <= 1e-8 && undefined == 0 && t < 60.0,
          fmt("max residual %.3e over 50 configurations at N=64 (%zu undefined), %.1f s", worst, undefined, t)};
}

Verdict solver() {
  std::mt19937_64 g(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const cplx w(-1.0 + 9.0 * u(g), std::pow(10.0, -3.0 + 3.0 * u(g)));
    const cplx z = std::polar(1.6 * u(g), 2.0 * std::numbers::pi * u(g));
    try {
      worst = std::max(worst, mc_solve(w, z).residual);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  double mp_gap = 0.0;
  double factor_gap = 0.0;
  for (int i = 0; i < 200; ++i) {
    const cplx w(-0.5 + 5.0 * u(g), std::pow(10.0, -3.0 + 3.0 * u(g)));
    const cplx m = mc_solve(w, 0.0).m;
    const cplx ref = mp_stieltjes(w);
    mp_gap = std::max(mp_gap, std::abs(m - ref) / std::abs(ref));
    // (m + 1)(w m^2 + w m + 1) expanded
    const auto c = mc_cubic(w, 0.0);
    const std::array<cplx, 4> product{w, 2.0 * w, w + 1.0, 1.0};
    for (int k = 0; k < 4; ++k) factor_gap = std::max(factor_gap, std::abs(c[k] / c[0] - product[k] / product[0]));
  }
  std::size_t bulk_nodes = 0;
  std::size_t non_unique = 0;
  for (double r : {0.0, 0.3, 0.6, 0.9, 1.2, 1.5}) {
    const EdgeData e = lambda_pm(r);
    const double lo = e.support_lower();
    for (int j = 1; j < 50; ++j) {
      const double x = lo + (e.lambda_plus - lo) * j / 50.0;
      ++bulk_nodes;
      try {
        const auto p = mc_solve({x, 1e-3}, r);
        // admissible: Im m > 0, |m| <= 1/eta and Im(w m) >= 0, as for any measure on [0, inf)
        const auto upper = std::count_if(p.roots.begin(), p.roots.end(), [&](cplx m) {
          return m.imag() > 0.0 && std::abs(m) <= 1.0 / 1e-3 && (cplx(x, 1e-3) * m).imag() >= -1e-10 * std::abs(m);
        });
        if (upper != 1 || p.selected < 0) ++non_unique;
      } catch (const std::exception&) {
        ++non_unique;
      }
    }
  }
  return {worst <= 1e-10 && failures == 0 && mp_gap <= 1e-12 && factor_gap <= 1e-15 && non_unique == 0,
          fmt("max residual %.2e at 1000 points (%zu failed), z=0 vs Marchenko-Pastur %.2e, factorization %.1e, "
              "%zu/%zu bulk nodes without a unique admissible root",
              worst, failures, mp_gap, factor_gap, non_unique, bulk_nodes)};
}

Verdict edges() {
  const double p0 = std::abs(lambda_pm(0.0).lambda_plus - 4.0);
  const double p1 = std::abs(lambda_pm(1.0).lambda_plus - 27.0 / 4.0);
  const double m1 = std::abs(lambda_pm(1.0).lambda_minus);
  std::size_t wrong = 0;
  for (int k = 1; k <= 100; ++k) {
    const double r = 0.02 * k;
    const double lm = lambda_pm(std::polar(r, 0.7 * k)).lambda_minus;
    const int sign_l = std::abs(lm) <= 1e-12 ? 0 : (lm > 0 ? 1 : -1);
    const int sign_r = k == 50 ? 0 : (r > 1.0 ? 1 : -1);
    if (sign_l != sign_r) ++wrong;
  }
  return {std::max({p0, p1, m1}) <= 1e-12 && wrong == 0,
          fmt("|lambda+(0)-4| %.1e, |lambda+(1)-27/4| %.1e, |lambda-(1)| %.1e, %zu/100 sign mismatches", p0, p1, m1,
              wrong)};
}

Verdict masses() {
  double worst = 0.0;
  std::string list;
  for (double z : {0.0, 0.5, 1.0, 1.2}) {
    const double m = rho_c_mass(z);
    worst = std::max(worst, std::abs(m - 1.0));
    list += fmt("%.6f ", m);
  }
  const double rho = rho_c(2.0, 0.0);
  const double gap = std::abs(rho - 1.0 / (2.0 * std::numbers::pi));
  return {worst <= 1e-3 && gap <= 1e-3,
          fmt("masses %s(worst %.1e), rho(2,0)=%.6f vs 1/(2 pi) gap %.1e", list.c_str(), worst, rho, gap)};
}

Verdict spectrum_vs_density() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> ks;
  for (std::uint64_t t = 0; t < 10; ++t)
    ks.push_back(empirical_vs_rho(sample_matrix(spec_of(1000), trial_seed(5, t)), 0.5).ks);
  const double mean = stats::mean(ks);
  const double t = seconds_since(start);
  return {mean <= 0.05 && t < 300.0, fmt("mean KS %.4f over 10 Ginibre samples at N=1000, z=0.5, %.1f s", mean, t)};
}

Verdict girko() {
  const auto start = std::chrono::steady_clock::now();
  const TestFunctionSpec f{Bump{}, {0.3, 0.2}, 0.25, 100};
  const MatrixSample x = sample_matrix(spec_of(100), 31);
  const double lhs = girko_lhs(f, eigenvalues(x));
  const double coarse = std::abs(girko_rhs(f, x, {200}).value - lhs) / std::abs(lhs);
  const double fine = std::abs(girko_rhs(f, x, {400}).value - lhs) / std::abs(lhs);
  const double t = seconds_since(start);
  return {coarse <= 1e-2 && fine <= coarse / 2.0 && t < 600.0,
          fmt("relative gap %.2e at 200 nodes per side, %.2e at 400 (factor %.1f), %.1f s", coarse, fine,
              coarse / fine, t)};
}

Verdict headcount() {
  const std::size_t n = 2000;
  const auto mu = eigenvalues(sample_matrix(spec_of(n), 2000));
  const double frac = double(std::count_if(mu.begin(), mu.end(), [](cplx m) { return std::abs(m) < 0.8; })) / n;
  const double sigma = std::sqrt(0.64 * 0.36 / n);
  return {std::abs(frac - 0.64) <= 3.0 * sigma,
          fmt("fraction %.4f inside |mu|<0.8 at N=2000, %.2f binomial sigma from 0.64", frac, (frac - 0.64) / sigma)};
}

// at 30 trials the bootstrap band of the slope is as wide as the tolerance itself
constexpr std::size_t kScalingTrials = 100;

Verdict scaling() {
  const auto start = std::chrono::steady_clock::now();
  ScalingOptions options;
  options.threads = default_threads();
  bool pass = true;
  std::string detail;
  for (EntryLaw law : {EntryLaw::gaussian, EntryLaw::two_point_asymmetric}) {
    const auto r =
        scaling_experiment(spec_of(256, law), Bump{}, 0.25, 1.0, {256, 512, 1024, 2048}, kScalingTrials, 8, options);
    pass = pass && std::abs(r.slope + 0.5) <= 0.15;
    detail += fmt("%s slope %.3f [%.3f, %.3f]; ", std::string(to_string(law)).c_str(), r.slope, r.slope_low,
                  r.slope_high);
  }
  return {pass, detail + fmt("target -0.5 +- 0.15, %zu trials per N, %.0f s", kScalingTrials, seconds_since(start))};
}

Verdict expansion() {
  const auto x = sample_matrix(spec_of(40, EntryLaw::two_point_asymmetric), 1);
  const auto xp = sample_matrix(spec_of(40), 2);
  double fd_worst = 0.0;
  double lo = 1e300;
  double hi = 0.0;
  for (std::size_t k : {77, 400, 801, 1203, 1599}) {
    const SwapState s = swap_setup(x.entries, xp.entries, k, {1.0, 0.05}, 1.0);
    const double p1 = p_coefficients(s)[0];
    const double h = 1e-5;
    const double fd = (exact_difference(s, h) - exact_difference(s, -h)) / (2.0 * h);
    fd_worst = std::max(fd_worst, std::abs(fd - p1) / std::abs(p1));
    const auto rows = expansion_residual(s, {2.5e-3, 5e-3, 1e-2});
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double ratio = rows[i].scaled / rows[i - 1].scaled;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {fd_worst <= 1e-6 && lo >= 0.8 && hi <= 1.25,
          fmt("P1 vs finite difference %.2e relative, r(v)/v^4 ratios in [%.3f, %.3f] over v in [2.5e-3, 1e-2] at "
              "N=40 (5 swap positions)",
              fd_worst, lo, hi)};
}

Verdict cutoff_algebra() {
  std::mt19937_64 g(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  std::array<double, 3> worst{};
  for (int i = 0; i < 1000; ++i) {
    const double n = 40.0 + 460.0 * u(g);
    const double eta = std::pow(10.0, -3.0 + 2.0 * u(g));
    const double c = std::pow(n, 0.95) * eta;
    const double t = 3.0 * u(g);
    const auto b = b_coefficients(t, c);
    bool bad = false;
    for (int k = 0; k < 3; ++k) {
      const double ratio = std::abs(b.b[k]) / std::pow(c, k);
      worst[k] = std::max(worst[k], ratio);
      bad = bad || ratio > 1.0;
    }
    if (bad) ++violations;
  }
  const auto sharp = b_sharp_constants();
  FunctionalConfig fc;
  const auto r = evaluate_functionals(sample_matrix(spec_of(200), 200).entries, fc);
  const double gap = std::abs(r.a - r.z);
  return {violations == 0 && gap <= r.budget,
          fmt("B bound violated at %zu/1000 states, max |B_n|/c^(n-1) = %.3f %.3f %.3f (sup over t: %.3f %.3f "
              "%.3f); |A-Z| = %.3e vs budget %.3e at N=200",
              violations, worst[0], worst[1], worst[2], sharp[0], sharp[1], sharp[2], gap, r.budget)};
}

// t_X is about 4 at N=100 and 16 at N=400 here, so h(t_X) = 1 for typical samples at both sizes
constexpr cplx kHalfGainW{0.05, 0.05};

Verdict half_gain() {
  const auto lo = half_gain_probe(spec_of(100, EntryLaw::two_point_asymmetric), 0, 1, kHalfGainW, 1.0, 2000, 11);
  const auto hi = half_gain_probe(spec_of(400, EntryLaw::two_point_asymmetric), 0, 1, kHalfGainW, 1.0, 2000, 11);
  const double factor = lo.ratio / hi.ratio;
  return {factor >= 1.4 && factor <= 2.9,
          fmt("|mean|/median ratio %.4f (+- %.4f) at N=100, %.4f (+- %.4f) at N=400, factor %.2f (pooled %.2f)",
              lo.ratio, lo.std_error / lo.median_abs, hi.ratio, hi.std_error / hi.median_abs, factor,
              lo.pooled_ratio / hi.pooled_ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"exact identities", identities},
      {"self-consistent solver", solver},
      {"spectral edges", edges},
      {"density mass", masses},
      {"spectrum vs density", spectrum_vs_density},
      {"Girko identity", girko},
      {"circular law headcount", headcount},
      {"local law scaling", scaling},
      {"perturbation expansion", expansion},
      {"cutoff algebra", cutoff_algebra},
      {"half gain", half_gain},
  };
  // optional arguments select criteria by number
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[k - 1] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2zu %-24s %s  %s\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
