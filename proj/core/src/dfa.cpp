#include "flowmem/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"

namespace flowmem {

namespace {

constexpr double kFloorRatio = 1e-12;

/// Orthonormal basis (column-major, (m + 1) columns of length n) for
/// polynomials of degree <= m sampled on n equispaced points of [-1, 1].
/// Modified Gram-Schmidt, applied twice.
std::vector<double> orthonormal_basis(std::size_t n, int order) {
    const auto cols = static_cast<std::size_t>(order + 1);
    std::vector<double> q(n * cols);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = n == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1);
        double p = 1.0;
        for (std::size_t k = 0; k < cols; ++k) {
            q[k * n + j] = p;
            p *= x;
        }
    }
    for (std::size_t k = 0; k < cols; ++k) {
        double* col = &q[k * n];
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < k; ++i) {
                const double* prev = &q[i * n];
                double dot = 0.0;
                for (std::size_t j = 0; j < n; ++j) dot += prev[j] * col[j];
                for (std::size_t j = 0; j < n; ++j) col[j] -= dot * prev[j];
            }
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) norm += col[j] * col[j];
        norm = std::sqrt(norm);
        if (!(norm > 1e-10)) {
            throw Error("singular polynomial fit of order " + std::to_string(order) +
                        " at scale " + std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) col[j] /= norm;
    }
    return q;
}

}  // namespace

void DfaConfig::validate() const {
    if (detrend_order < 0) throw Error("DFA detrend order must be >= 0");
    if (n_min < detrend_order + 2) {
        throw Error("DFA n_min must be at least detrend order + 2");
    }
    if (n_scales < 4) throw Error("DFA needs at least 4 scale targets");
    if (min_blocks < 2) throw Error("DFA min_blocks must be >= 2");
    if (!(n_max_fraction > 0.0 && n_max_fraction <= 1.0)) {
        throw Error("DFA n_max_fraction must lie in (0, 1]");
    }
}

std::vector<double> profile(std::span<const double> series) {
    if (series.size() < 2) throw Error("profile needs at least 2 values");
    for (double x : series) {
        if (!std::isfinite(x)) throw Error("profile input contains non-finite values");
    }
    const double m = mean(series);
    std::vector<double> y(series.size());
    double run = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        run += series[t] - m;
        y[t] = run;
    }
    return y;
}

std::vector<std::size_t> make_scale_grid(std::size_t length, const DfaConfig& config) {
    config.validate();
    const auto n_min = static_cast<std::size_t>(config.n_min);
    const auto min_blocks = static_cast<std::size_t>(config.min_blocks);
    const auto n_max = static_cast<std::size_t>(
        std::floor(static_cast<double>(length) * config.n_max_fraction));
    if (n_min * min_blocks > length || n_max < n_min) {
        throw Error("series too short for DFA (length " + std::to_string(length) + ")");
    }

    std::vector<std::size_t> grid;
    const double lo = std::log(static_cast<double>(n_min));
    const double hi = std::log(static_cast<double>(n_max));
    const int k_count = config.n_scales;
    for (int k = 0; k < k_count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(k_count - 1);
        const auto n = static_cast<std::size_t>(std::llround(std::exp(lo + t * (hi - lo))));
        if (n < n_min || n > n_max || length / n < min_blocks) continue;
        if (grid.empty() || n > grid.back()) grid.push_back(n);
    }
    if (grid.empty()) {
        throw Error("series too short for DFA (length " + std::to_string(length) + ")");
    }
    return grid;
}

FluctuationCurve fluctuation(std::span<const double> prof, std::span<const std::size_t> scales,
                             int detrend_order) {
    if (detrend_order < 0) throw Error("detrend order must be >= 0");
    const std::size_t length = prof.size();
    FluctuationCurve curve;
    curve.detrend_order = detrend_order;
    curve.series_length = length;

    double y_scale = 0.0;
    for (double y : prof) y_scale = std::max(y_scale, std::abs(y));
    const double floor_value = kFloorRatio * y_scale;

    const auto cols = static_cast<std::size_t>(detrend_order + 1);
    std::vector<double> coef(cols);
    std::size_t previous = 0;
    for (std::size_t n : scales) {
        if (n <= previous) throw Error("scales must be strictly increasing");
        previous = n;
        if (n == 0 || n > length) {
            throw Error("scale " + std::to_string(n) + " invalid for length " +
                        std::to_string(length));
        }
        const auto q = orthonormal_basis(n, detrend_order);
        const std::size_t blocks = length / n;

        double block_mean_square_sum = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            const double* y = prof.data() + b * n;
            for (std::size_t k = 0; k < cols; ++k) {
                const double* col = &q[k * n];
                double dot = 0.0;
                for (std::size_t j = 0; j < n; ++j) dot += col[j] * y[j];
                coef[k] = dot;
            }
            double ss = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double trend = 0.0;
                for (std::size_t k = 0; k < cols; ++k) trend += coef[k] * q[k * n + j];
                const double r = y[j] - trend;
                ss += r * r;
            }
            block_mean_square_sum += ss / static_cast<double>(n);
        }
        const double f = std::sqrt(block_mean_square_sum / static_cast<double>(blocks));
        if (f > floor_value && f > 0.0) curve.points.push_back({n, f});
    }
    return curve;
}

DfaFit fit_hurst(const FluctuationCurve& curve,
                 std::optional<std::pair<std::size_t, std::size_t>> fit_range) {
    std::vector<double> log_n, log_f;
    std::size_t lo = 0, hi = 0;
    for (const auto& p : curve.points) {
        if (fit_range && (p.scale < fit_range->first || p.scale > fit_range->second)) continue;
        if (!(p.fluctuation > 0.0)) continue;
        if (log_n.empty()) lo = p.scale;
        hi = p.scale;
        log_n.push_back(std::log10(static_cast<double>(p.scale)));
        log_f.push_back(std::log10(p.fluctuation));
    }
    if (log_n.size() < 4) {
        throw Error("insufficient scales for Hurst fit (" + std::to_string(log_n.size()) +
                    " < 4)");
    }
    const LineFit line = fit_line(log_n, log_f);
    DfaFit fit;
    fit.hurst = line.slope;
    fit.intercept = line.intercept;
    fit.slope_stderr = line.slope_stderr;
    fit.r_squared = line.r_squared;
    fit.scale_lo = lo;
    fit.scale_hi = hi;
    fit.n_points_used = log_n.size();
    fit.detrend_order = curve.detrend_order;
    return fit;
}

DfaResult dfa_analyze(std::span<const double> series, const DfaConfig& config) {
    config.validate();
    const auto y = profile(series);
    const auto grid = make_scale_grid(series.size(), config);
    DfaResult result;
    result.curve = fluctuation(y, grid, config.detrend_order);
    result.fit = fit_hurst(result.curve);
    return result;
}

DfaFit dfa_hurst(std::span<const double> series, const DfaConfig& config) {
    return dfa_analyze(series, config).fit;
}

}  // namespace flowmem
