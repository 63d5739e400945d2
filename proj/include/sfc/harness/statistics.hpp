#pragma once

#include <span>
#include <utility>

namespace sfc::harness {

double mean(std::span<const double> samples);

/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double stddev(std::span<const double> samples);

/// Two-sided quantile t(level, dof): the (1 + level) / 2 quantile of
/// Student's t with `dof` degrees of freedom.
double student_t_quantile(double level, double dof);

/// Student-t interval mean +/- t * s / sqrt(n). n = 1 gives (x, x).
/// Throws sfc::Error on empty input or a level outside (0, 1).
std::pair<double, double> compute_confidence_interval(std::span<const double> samples,
                                                      double level);

} // namespace sfc::harness
