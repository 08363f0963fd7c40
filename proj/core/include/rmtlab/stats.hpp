#pragma once

#include <cstdint>
#include <vector>

namespace rmtlab::stats {

double mean(const std::vector<double>& x);
/// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(const std::vector<double>& x);
/// Linear-interpolation quantile (type 7); q in [0, 1].
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rmtlab::stats
