#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace flowmem {

/// Scale-grid and detrending parameters, applied uniformly to every series
/// in a run.
struct DfaConfig {
    int detrend_order = 2;         ///< polynomial order m of the per-block trend
    int n_min = 8;                 ///< smallest scale
    double n_max_fraction = 0.25;  ///< largest scale is floor(T * fraction)
    int n_scales = 20;             ///< number of log-spaced scale targets
    int min_blocks = 4;            ///< minimum floor(T / n) for an admissible scale

    /// Throws flowmem::Error unless n_min >= m + 2, n_scales >= 4,
    /// min_blocks >= 2, m >= 0 and the fraction lies in (0, 1].
    void validate() const;

    bool operator==(const DfaConfig&) const = default;
};

struct FluctuationPoint {
    std::size_t scale = 0;
    double fluctuation = 0.0;

    bool operator==(const FluctuationPoint&) const = default;
};

/// Sampled (n, F(n)) pairs; scales strictly increasing and every F > 0.
struct FluctuationCurve {
    std::vector<FluctuationPoint> points;
    int detrend_order = 2;
    std::size_t series_length = 0;

    bool operator==(const FluctuationCurve&) const = default;
};

/// Log-log scaling fit; H is the slope of log10 F(n) on log10 n.
struct DfaFit {
    double hurst = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    std::size_t scale_lo = 0;
    std::size_t scale_hi = 0;
    std::size_t n_points_used = 0;
    int detrend_order = 2;

    bool operator==(const DfaFit&) const = default;
};

struct DfaResult {
    FluctuationCurve curve;
    DfaFit fit;
};

/// Integrated profile Y[t] = sum_{s<=t} (X_s - mean X). Requires T >= 2 and
/// finite values.
std::vector<double> profile(std::span<const double> series);

/// Log-spaced integer scales in [n_min, floor(T * fraction)], rounded,
/// deduplicated and filtered to floor(T / n) >= min_blocks.
/// Throws "series too short for DFA" when nothing survives.
std::vector<std::size_t> make_scale_grid(std::size_t length, const DfaConfig& config);

/// Fluctuation function over forward, non-overlapping blocks of each scale;
/// the trailing remainder is discarded. Scales whose F falls below
/// 1e-12 * max|Y| are dropped from the curve.
FluctuationCurve fluctuation(std::span<const double> profile,
                             std::span<const std::size_t> scales, int detrend_order);

/// OLS of log10 F on log10 n over the points with scale in fit_range
/// (inclusive). Needs at least 4 points ("insufficient scales").
DfaFit fit_hurst(const FluctuationCurve& curve,
                 std::optional<std::pair<std::size_t, std::size_t>> fit_range = std::nullopt);

/// profile -> scale grid -> fluctuation -> fit.
DfaResult dfa_analyze(std::span<const double> series, const DfaConfig& config = {});
DfaFit dfa_hurst(std::span<const double> series, const DfaConfig& config = {});

}  // namespace flowmem
