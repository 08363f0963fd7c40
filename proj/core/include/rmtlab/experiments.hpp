#pragma once

#include "rmtlab/harness.hpp"

#include <string>
#include <vector>

namespace rmtlab {

struct ExperimentOutput {
  std::vector<Table> tables;
  std::string summary;  // JSON object without the run id
  std::vector<std::string> failures;  // failed deterministic checks
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace rmtlab
