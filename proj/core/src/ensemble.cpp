#include "rmtlab/ensemble.hpp"

#include "rmtlab/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <random>

namespace rmtlab {
namespace {

constexpr std::uint64_t splitmix_step(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b * 0xD1B54A32D192ED03ULL);
  return splitmix_step(s);
}

// SplitMix64 stream addressed by (seed, N, i, j, stream); models UniformRandomBitGenerator
// so the std distributions can draw from it.
class EntryStream {
 public:
  using result_type = std::uint64_t;

  EntryStream(std::uint64_t seed, std::size_t n, std::size_t i, std::size_t j, std::uint64_t stream)
      : state_(mix(mix(mix(mix(seed, n), i), j), stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return splitmix_step(state_); }

 private:
  std::uint64_t state_;
};

double draw_unscaled(EntryLaw law, EntryStream& gen) {
  switch (law) {
    case EntryLaw::gaussian:
      return std::normal_distribution<double>{0.0, 1.0}(gen);
    case EntryLaw::bernoulli:
      return std::bernoulli_distribution{0.5}(gen) ? 1.0 : -1.0;
    case EntryLaw::laplace: {
      const double magnitude = std::exponential_distribution<double>{std::sqrt(2.0)}(gen);
      return std::bernoulli_distribution{0.5}(gen) ? magnitude : -magnitude;
    }
    case EntryLaw::uniform:
      return std::uniform_real_distribution<double>{-std::sqrt(3.0), std::sqrt(3.0)}(gen);
    case EntryLaw::two_point_asymmetric:
      return std::bernoulli_distribution{0.2}(gen) ? 2.0 : -0.5;
  }
  throw InvalidArgument("unknown entry law");
}

std::complex<double> draw_with_stream(const EnsembleSpec& spec, std::uint64_t seed, std::size_t i,
                                      std::size_t j, std::uint64_t stream) {
  EntryStream gen(seed, spec.dimension, i, j, stream);
  if (spec.field == ScalarField::real) return {draw_unscaled(spec.law, gen), 0.0};
  const double re = draw_unscaled(spec.law, gen);
  const double im = draw_unscaled(spec.law, gen);
  return std::complex<double>(re, im) / std::sqrt(2.0);
}

void check_index(const MatrixSample& sample, std::size_t i, const char* what) {
  if (i >= sample.dimension())
    throw InvalidArgument(std::string(what) + " index " + std::to_string(i) + " out of range");
}

}  // namespace

std::string_view to_string(EntryLaw law) {
  switch (law) {
    case EntryLaw::gaussian: return "gaussian";
    case EntryLaw::bernoulli: return "bernoulli";
    case EntryLaw::laplace: return "laplace";
    case EntryLaw::uniform: return "uniform";
    case EntryLaw::two_point_asymmetric: return "two_point_asymmetric";
  }
  return "unknown";
}

EntryLaw entry_law_from_string(std::string_view name) {
  for (auto law : {EntryLaw::gaussian, EntryLaw::bernoulli, EntryLaw::laplace, EntryLaw::uniform,
                   EntryLaw::two_point_asymmetric}) {
    if (to_string(law) == name) return law;
  }
  throw InvalidArgument("unknown entry law '" + std::string(name) + "'");
}

LawMoments law_moments(EntryLaw law) {
  switch (law) {
    case EntryLaw::gaussian: return {{0.0, 1.0, 0.0, 3.0}, 0.9};
    case EntryLaw::bernoulli: return {{0.0, 1.0, 0.0, 1.0}, 0.35};
    case EntryLaw::laplace: return {{0.0, 1.0, 0.0, 6.0}, 1.0};
    case EntryLaw::uniform: return {{0.0, 1.0, 0.0, 9.0 / 5.0}, 0.75};
    case EntryLaw::two_point_asymmetric: return {{0.0, 1.0, 1.5, 3.25}, 0.45};
  }
  throw InvalidArgument("unknown entry law");
}

double law_tail(EntryLaw law, double t) {
  if (t < 0) return 1.0;
  switch (law) {
    case EntryLaw::gaussian: return std::erfc(t / std::sqrt(2.0));
    case EntryLaw::bernoulli: return t < 1.0 ? 1.0 : 0.0;
    case EntryLaw::laplace: return std::exp(-std::sqrt(2.0) * t);
    case EntryLaw::uniform: return t < std::sqrt(3.0) ? 1.0 - t / std::sqrt(3.0) : 0.0;
    case EntryLaw::two_point_asymmetric: return t < 0.5 ? 1.0 : (t < 2.0 ? 0.2 : 0.0);
  }
  throw InvalidArgument("unknown entry law");
}

void EnsembleSpec::validate() const {
  if (dimension == 0) throw InvalidArgument("ensemble dimension must be positive");
  if (third_moment == ThirdMomentMode::vanishing && law_moments(law).moments[2] != 0.0)
    throw InvalidArgument("law '" + std::string(to_string(law)) +
                          "' has a nonzero third moment; third_moment_mode must be generic");
  if (zeroed_entry && (zeroed_entry->row >= dimension || zeroed_entry->col >= dimension))
    throw InvalidArgument("zeroed entry index out of range");
}

std::string to_text(const EnsembleSpec& spec) {
  nlohmann::ordered_json j;
  j["dimension"] = spec.dimension;
  j["entry_law"] = std::string(to_string(spec.law));
  j["subexp_theta"] = spec.subexp_theta();
  j["third_moment_mode"] =
      spec.third_moment == ThirdMomentMode::vanishing ? "vanishing" : "generic";
  j["scalar_field"] = spec.field == ScalarField::real ? "real" : "complex";
  if (spec.zeroed_entry)
    j["zeroed_entry"] = {spec.zeroed_entry->row, spec.zeroed_entry->col};
  else
    j["zeroed_entry"] = nullptr;
  return j.dump(2);
}

EnsembleSpec ensemble_spec_from_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", e.what());
  }
  if (!j.is_object()) throw ConfigError("", "ensemble spec must be an object");
  EnsembleSpec spec;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "dimension") {
        spec.dimension = value.get<std::size_t>();
      } else if (key == "entry_law") {
        spec.law = entry_law_from_string(value.get<std::string>());
      } else if (key == "subexp_theta") {
        // derived from the law; accepted for round trips
      } else if (key == "third_moment_mode") {
        const auto mode = value.get<std::string>();
        if (mode == "generic") spec.third_moment = ThirdMomentMode::generic;
        else if (mode == "vanishing") spec.third_moment = ThirdMomentMode::vanishing;
        else throw ConfigError(key, "expected generic|vanishing");
      } else if (key == "scalar_field") {
        const auto field = value.get<std::string>();
        if (field == "real") spec.field = ScalarField::real;
        else if (field == "complex") spec.field = ScalarField::complex;
        else throw ConfigError(key, "expected real|complex");
      } else if (key == "zeroed_entry") {
        if (!value.is_null()) {
          const auto pair = value.get<std::array<std::size_t, 2>>();
          spec.zeroed_entry = EntryIndex{pair[0], pair[1]};
        }
      } else {
        throw ConfigError(key, "unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key, e.what());
    } catch (const InvalidArgument& e) {
      throw ConfigError(key, e.what());
    }
  }
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("", e.what());
  }
  return spec;
}

std::complex<double> draw_entry(const EnsembleSpec& spec, std::uint64_t seed, std::size_t i,
                                std::size_t j) {
  return draw_with_stream(spec, seed, i, j, 0);
}

MatrixSample sample_matrix(const EnsembleSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.dimension);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dimension));
  MatrixSample sample{Eigen::MatrixXcd(n, n), spec, seed};
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      sample.entries(i, j) = scale * draw_with_stream(spec, seed, i, j, 0);
  if (spec.zeroed_entry)
    sample.entries(spec.zeroed_entry->row, spec.zeroed_entry->col) = 0.0;
  return sample;
}

MatrixSample sample_from_matrix(Eigen::MatrixXcd entries, EnsembleSpec spec) {
  if (entries.rows() != entries.cols())
    throw InvalidArgument("sample matrix must be square");
  spec.dimension = static_cast<std::size_t>(entries.rows());
  spec.validate();
  if (spec.field == ScalarField::real && entries.imag().cwiseAbs().maxCoeff() > 0.0)
    spec.field = ScalarField::complex;
  if (spec.zeroed_entry) entries(spec.zeroed_entry->row, spec.zeroed_entry->col) = 0.0;
  return MatrixSample{std::move(entries), spec, 0};
}

MatrixSample zero_entry(const MatrixSample& sample, std::size_t a, std::size_t b) {
  check_index(sample, a, "row");
  check_index(sample, b, "column");
  MatrixSample out = sample;
  out.entries(a, b) = 0.0;
  out.spec.zeroed_entry = EntryIndex{a, b};
  return out;
}

MatrixSample resample_row(const MatrixSample& sample, std::size_t i, std::uint64_t stream) {
  check_index(sample, i, "row");
  MatrixSample out = sample;
  const double scale = 1.0 / std::sqrt(static_cast<double>(sample.dimension()));
  for (std::size_t j = 0; j < sample.dimension(); ++j)
    out.entries(i, j) = scale * draw_with_stream(sample.spec, sample.seed, i, j, stream + 1);
  if (const auto& z = sample.spec.zeroed_entry; z && z->row == i) out.entries(z->row, z->col) = 0.0;
  return out;
}

MatrixSample resample_column(const MatrixSample& sample, std::size_t i, std::uint64_t stream) {
  check_index(sample, i, "column");
  MatrixSample out = sample;
  const double scale = 1.0 / std::sqrt(static_cast<double>(sample.dimension()));
  for (std::size_t r = 0; r < sample.dimension(); ++r)
    out.entries(r, i) = scale * draw_with_stream(sample.spec, sample.seed, r, i, stream + 1);
  if (const auto& z = sample.spec.zeroed_entry; z && z->col == i) out.entries(z->row, z->col) = 0.0;
  return out;
}

MomentReport moment_report(const MatrixSample& sample) {
  const double root_n = std::sqrt(static_cast<double>(sample.dimension()));
  std::array<double, 4> sum{};
  std::array<double, 4> sum_sq{};
  const auto count = static_cast<std::size_t>(sample.entries.size());
  for (Eigen::Index k = 0; k < sample.entries.size(); ++k) {
    const double x = root_n * sample.entries.data()[k].real();
    double power = 1.0;
    for (std::size_t p = 0; p < 4; ++p) {
      power *= x;
      sum[p] += power;
      sum_sq[p] += power * power;
    }
  }
  MomentReport report{};
  report.count = count;
  const double n = static_cast<double>(count);
  for (std::size_t p = 0; p < 4; ++p) {
    report.moments[p] = sum[p] / n;
    const double var = std::max(0.0, sum_sq[p] / n - report.moments[p] * report.moments[p]);
    report.std_errors[p] = std::sqrt(var / n);
  }
  return report;
}

}  // namespace rmtlab
