#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace rmtlab {

/// Entry laws for the unscaled variable x = sqrt(N) X_ij. Every law is centered with unit variance.
enum class EntryLaw { gaussian, bernoulli, laplace, uniform, two_point_asymmetric };

enum class ThirdMomentMode { generic, vanishing };

enum class ScalarField { real, complex };

std::string_view to_string(EntryLaw law);
EntryLaw entry_law_from_string(std::string_view name);

/// Analytic moments E[x^k], k = 1..4, of the unscaled law, plus the documented
/// subexponential decay exponent: P(|x| > t) <= exp(-t^theta) / theta for all t >= 0.
struct LawMoments {
  std::array<double, 4> moments;
  double theta;
};

/// two_point_asymmetric takes the value 2 with probability 1/5 and -1/2 with probability 4/5,
/// so E x = 0, E x^2 = 1, E x^3 = 3/2, E x^4 = 13/4.
LawMoments law_moments(EntryLaw law);

/// Exact tail P(|x| > t) of the unscaled law.
double law_tail(EntryLaw law, double t);

/// Entry index pair, 0-based.
struct EntryIndex {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

struct EnsembleSpec {
  std::size_t dimension = 0;
  EntryLaw law = EntryLaw::gaussian;
  ThirdMomentMode third_moment = ThirdMomentMode::generic;
  ScalarField field = ScalarField::real;
  std::optional<EntryIndex> zeroed_entry;

  /// Decay parameter of the law (metadata, see law_moments).
  double subexp_theta() const { return law_moments(law).theta; }

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Key/value text form (a flat JSON object) of a spec; law names are lowercase strings.
std::string to_text(const EnsembleSpec& spec);
EnsembleSpec ensemble_spec_from_text(std::string_view text);

/// An N x N sample with entries of variance 1/N. Real samples have zero imaginary parts.
struct MatrixSample {
  Eigen::MatrixXcd entries;
  EnsembleSpec spec;
  std::uint64_t seed = 0;

  std::size_t dimension() const { return spec.dimension; }
  bool is_real() const { return spec.field == ScalarField::real; }
  Eigen::MatrixXd real_entries() const { return entries.real(); }
};

/// Draws the unscaled value of entry (i, j) from the counter-based stream keyed by (seed, i, j).
/// Identical arguments always give identical values, independently of evaluation order.
std::complex<double> draw_entry(const EnsembleSpec& spec, std::uint64_t seed, std::size_t i,
                                std::size_t j);

MatrixSample sample_matrix(const EnsembleSpec& spec, std::uint64_t seed);

/// Wraps an explicit matrix (deterministic inputs for tests and diagnostics).
MatrixSample sample_from_matrix(Eigen::MatrixXcd entries, EnsembleSpec spec);

/// Returns a copy with entry (a, b) set to 0 and spec.zeroed_entry updated.
MatrixSample zero_entry(const MatrixSample& sample, std::size_t a, std::size_t b);

/// Redraws row i (respectively column i) with an independent stream; everything else is kept.
MatrixSample resample_row(const MatrixSample& sample, std::size_t i, std::uint64_t stream);
MatrixSample resample_column(const MatrixSample& sample, std::size_t i, std::uint64_t stream);

struct MomentReport {
  /// Empirical E[(sqrt(N) X_ij)^k], k = 1..4, pooled over all N^2 entries (real parts).
  std::array<double, 4> moments;
  /// Standard errors of the pooled means above.
  std::array<double, 4> std_errors;
  std::size_t count = 0;
};

MomentReport moment_report(const MatrixSample& sample);

/// Derives the seed of trial `index` from a base seed (seed xor index, as documented for runs).
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

}  // namespace rmtlab
