#include "flowmem/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "flowmem/error.hpp"

namespace flowmem {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error("mean of empty sequence");
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

namespace {

double sum_sq_dev(std::span<const double> xs) {
    const double m = mean(xs);
    CompensatedSum acc;
    for (double x : xs) acc.add((x - m) * (x - m));
    return acc.value();
}

}  // namespace

double population_variance(std::span<const double> xs) {
    return sum_sq_dev(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("sample variance needs at least two values");
    return sum_sq_dev(xs) / static_cast<double>(xs.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error("quantile of empty sequence");
    if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level outside [0, 1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("regression inputs differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw Error("regression needs at least 3 points");

    LineFit fit;
    fit.n = n;
    fit.x_mean = mean(x);
    const double y_mean = mean(y);

    CompensatedSum sxx, sxy, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - fit.x_mean;
        const double dy = y[i] - y_mean;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    fit.sxx = sxx.value();
    if (!(fit.sxx > 0.0)) throw Error("degenerate regressor");

    fit.slope = sxy.value() / fit.sxx;
    fit.intercept = y_mean - fit.slope * fit.x_mean;

    CompensatedSum ssr;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr.add(r * r);
    }
    const double dof = static_cast<double>(n - 2);
    fit.residual_variance = ssr.value() / dof;
    fit.slope_stderr = std::sqrt(fit.residual_variance / fit.sxx);
    fit.intercept_stderr = std::sqrt(fit.residual_variance *
                                     (1.0 / static_cast<double>(n) +
                                      fit.x_mean * fit.x_mean / fit.sxx));
    const double syy_v = syy.value();
    fit.r_squared = syy_v > 0.0 ? std::clamp(1.0 - ssr.value() / syy_v, 0.0, 1.0) : 1.0;
    return fit;
}

std::vector<double> cumulative_sum(std::span<const double> xs) {
    std::vector<double> out(xs.size());
    double run = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        run += xs[i];
        out[i] = run;
    }
    return out;
}

}  // namespace flowmem
