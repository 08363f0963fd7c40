#pragma once

#include "rmtlab/ensemble.hpp"
#include "rmtlab/test_function.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace rmtlab {

enum class DiskRoute {
  /// Polar coordinates about the bump center, radial range clipped to the unit disk.
  support_polar,
  /// Polar coordinates about the origin over the unit disk, radial range clipped to the support.
  disk_polar,
};

/// int_D f_{z0} dA over the unit disk D, by nested adaptive Gauss-Kronrod.
/// Throws QuadratureError when the error estimate stays above the tolerance.
double disk_integral(const TestFunctionSpec& f, DiskRoute route = DiskRoute::support_polar,
                     double tolerance = 1e-12);

struct LocalStatRecord {
  std::size_t dimension = 0;
  double s = 0.0;
  std::complex<double> z0;
  std::uint64_t seed = 0;
  double L = 0.0;
};

/// L = N^{-1} sum_j f_{z0}(mu_j) - pi^{-1} int_D f_{z0} dA. `disk` may carry a precomputed
/// disk integral (it depends only on f, N, s, z0).
LocalStatRecord local_statistic(const std::vector<std::complex<double>>& mu, const TestFunctionSpec& f,
                                std::uint64_t seed = 0, const double* disk = nullptr);
LocalStatRecord local_statistic(const MatrixSample& sample, const TestFunctionSpec& f);

struct ScalingRow {
  std::size_t dimension = 0;
  double quantile = 0.0;  // of |L| at the requested level
  std::size_t trials = 0;
};

struct ScalingResult {
  std::vector<LocalStatRecord> records;
  std::vector<ScalingRow> table;
  double level = 0.9;
  double slope = 0.0;
  double intercept = 0.0;
  /// 95% bootstrap band of the slope (trials resampled within each N).
  double slope_low = 0.0;
  double slope_high = 0.0;
};

struct ScalingOptions {
  double level = 0.9;
  std::size_t bootstrap = 400;
  /// Worker threads for the trials (results do not depend on it).
  unsigned threads = 1;
};

/// Draws `trials` samples per N with seeds trial_seed(seed, t), records L and fits
/// log quantile(|L|) against log N. Throws InsufficientTrials for fewer than 3 sizes or 20 trials.
ScalingResult scaling_experiment(const EnsembleSpec& spec, const Bump& f, double s, std::complex<double> z0,
                                 const std::vector<std::size_t>& sizes, std::size_t trials, std::uint64_t seed,
                                 const ScalingOptions& options = {});

struct DominationRow {
  double sigma = 0.0;
  std::size_t dimension = 0;
  std::size_t trials = 0;
  std::size_t exceedances = 0;
  double frequency() const { return trials ? double(exceedances) / double(trials) : 0.0; }
};

struct DominationProbeResult {
  std::vector<DominationRow> rows;
};

/// Frequency of |W| > N^sigma Psi(N) for each (sigma, N); W is drawn as sampler(N, trial).
DominationProbeResult domination_probe(const std::function<double(std::size_t, std::size_t)>& sampler,
                                       const std::function<double(std::size_t)>& psi,
                                       const std::vector<double>& sigmas, const std::vector<std::size_t>& sizes,
                                       std::size_t trials);

/// CSV "N,s,re_z0,im_z0,seed,L".
void write_local_records_csv(std::ostream& out, const std::vector<LocalStatRecord>& records);
/// CSV "N,quantile,fitted" (fitted = exp(intercept) N^slope).
void write_scaling_csv(std::ostream& out, const ScalingResult& result);
/// CSV "sigma,N,trials,exceedances,frequency".
void write_domination_csv(std::ostream& out, const DominationProbeResult& result);

}  // namespace rmtlab
