#pragma once

#include "rmtlab/ensemble.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rmtlab {

enum class Experiment {
  identities,
  density,
  spectra,
  girko,
  scaling,
  bound_probe,
  functional,
  compare,
  half_gain,
};

std::string_view to_string(Experiment e);
/// Throws ConfigError naming the field "experiment" for unknown names.
Experiment experiment_from_string(std::string_view name);
const std::vector<Experiment>& all_experiments();

/// Parameter block shared by every experiment; each experiment reads the fields it needs.
struct ExperimentParameters {
  std::vector<std::size_t> sizes{64};
  double s = 0.25;
  std::complex<double> z0{1.0, 0.0};
  double epsilon = 0.05;
  std::vector<std::complex<double>> w;
  std::vector<std::complex<double>> z;
  double x_min = 0.0;
  double x_max = 5.0;
  int points = 200;
  double eta = 1e-5;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::size_t a = 0;
  std::size_t b = 1;
  std::size_t k = 0;  // swap counter; 0 means derive from (a, b)
  std::vector<double> v;
  int grid_nodes = 200;
  double level = 0.9;
  std::size_t bootstrap = 400;
  EntryLaw law_prime = EntryLaw::gaussian;

  friend bool operator==(const ExperimentParameters&, const ExperimentParameters&) = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::identities;
  EntryLaw law = EntryLaw::gaussian;
  ThirdMomentMode third_moment = ThirdMomentMode::generic;
  ScalarField field = ScalarField::real;
  ExperimentParameters params;
  std::string output_dir;  // empty: the output root
  unsigned threads = 1;

  /// Ensemble at dimension n built from the law / moment / field settings.
  EnsembleSpec ensemble(std::size_t n) const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the JSON config document. Unknown keys are rejected; errors carry the field and line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Resolved config with every field present, numbers in round-trip precision.
std::string to_text(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over the resolved config text.
std::string config_hash(const ExperimentConfig& config);

struct Table {
  std::string name;
  std::string csv;  // header line plus rows, without the run-id line
};

struct ResultStore {
  std::string run_id;
  std::filesystem::path directory;
  std::vector<Table> tables;
  std::string summary;  // JSON document
  bool deterministic_ok = true;
  std::vector<std::string> failures;

  const Table* find(std::string_view name) const;
};

/// $RMTLAB_OUTPUT_ROOT, or ./rmtlab-runs when unset.
std::filesystem::path output_root();

/// Runs the experiment and persists config.json, <table>.csv and summary.json under
/// <root>/<run id>. Exit status of the CLI follows deterministic_ok.
ResultStore run(const ExperimentConfig& config);
ResultStore load_store(const std::string& run_id, const std::filesystem::path& root = output_root());
std::vector<std::string> list_runs(const std::filesystem::path& root = output_root());

/// Writes plot_<which>.csv into the store directory and returns its path. `which` is density,
/// eigenvalues, scaling, probes or any table name. Throws Error when the table is missing.
std::filesystem::path emit_plotdata(const ResultStore& store, std::string_view which);

}  // namespace rmtlab
