#pragma once

#include <span>

namespace tsdiff::stats {

double mean(std::span<const double> x);
/// Population variance.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
/// Population excess kurtosis m4 / m2^2 - 3; 0 when the variance vanishes.
double excess_kurtosis(std::span<const double> x);
double lag1_autocorrelation(std::span<const double> x);
double rms(std::span<const double> x);

}  // namespace tsdiff::stats
