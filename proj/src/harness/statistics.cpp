#include "sfc/harness/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "sfc/errors.hpp"

namespace sfc::harness {

namespace {

bool all_equal(std::span<const double> samples)
{
    return std::adjacent_find(samples.begin(), samples.end(), std::not_equal_to<>())
           == samples.end();
}

} // namespace

double mean(std::span<const double> samples)
{
    if (samples.empty()) return 0.0;
    if (all_equal(samples)) return samples.front();
    return std::accumulate(samples.begin(), samples.end(), 0.0)
           / static_cast<double>(samples.size());
}

double stddev(std::span<const double> samples)
{
    if (samples.size() < 2 || all_equal(samples)) return 0.0;
    const double m = mean(samples);
    double sum = 0.0;
    for (double v : samples) sum += (v - m) * (v - m);
    return std::sqrt(sum / static_cast<double>(samples.size() - 1));
}

double student_t_quantile(double level, double dof)
{
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, (1.0 + level) / 2.0);
}

std::pair<double, double> compute_confidence_interval(std::span<const double> samples,
                                                      double level)
{
    if (samples.empty()) throw Error("confidence interval of an empty sample");
    if (!(level > 0.0 && level < 1.0)) throw Error("confidence level must lie in (0, 1)");
    const double m = mean(samples);
    const double s = stddev(samples);
    if (samples.size() == 1 || s == 0.0) return {m, m};
    const double n = static_cast<double>(samples.size());
    const double half = student_t_quantile(level, n - 1.0) * s / std::sqrt(n);
    return {m - half, m + half};
}

} // namespace sfc::harness
