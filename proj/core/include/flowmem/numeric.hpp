#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flowmem {

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;
double mean(std::span<const double> xs);
/// Population variance (divisor n).
double population_variance(std::span<const double> xs);
/// Sample variance (divisor n - 1); requires n >= 2.
double sample_variance(std::span<const double> xs);

/// Linear-interpolation quantile of already sorted data (Hyndman-Fan type 7).
double quantile_sorted(std::span<const double> sorted, double q);

/// Result of regressing y on x by ordinary least squares with intercept.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double intercept_stderr = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    double residual_variance = 0.0;  ///< SSR / (n - 2)
    double sxx = 0.0;                ///< sum of squared deviations of x
    double x_mean = 0.0;
    std::size_t n = 0;
};

/// Closed-form simple regression on centred data. Requires n >= 3 and a
/// non-constant x; throws flowmem::Error otherwise.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

std::vector<double> cumulative_sum(std::span<const double> xs);

}  // namespace flowmem
