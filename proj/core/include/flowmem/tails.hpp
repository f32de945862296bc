#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowmem {

/// Which tail a CCDF describes. `lower` is the upper tail of -x.
enum class TailSide { upper, lower, absolute };

std::string to_string(TailSide side);
TailSide parse_tail_side(const std::string& token);

/// Applies the side transform: identity, negation or absolute value.
std::vector<double> tail_values(std::span<const double> values, TailSide side);

struct CcdfPoint {
    double x = 0.0;
    double p = 0.0;

    bool operator==(const CcdfPoint&) const = default;
};

struct CcdfPoints {
    std::vector<CcdfPoint> points;
    TailSide side = TailSide::upper;
    std::size_t sample_size = 0;
    /// Set when every observation is equal; points then holds the single
    /// value with p = 1.
    bool degenerate = false;
    std::string warning;

    bool operator==(const CcdfPoints&) const = default;
};

/// p(x) = #{obs > x} / N at each distinct observation value after the side
/// transform. The maximum (where p = 0) is not emitted, so the last point
/// has p = (multiplicity of the maximum) / N. Needs >= 10 finite values.
CcdfPoints empirical_ccdf(std::span<const double> values, TailSide side = TailSide::upper);

/// Gaussian CCDF 0.5 erfc((x - mean) / (std sqrt 2)) at xs. std > 0.
CcdfPoints gaussian_ccdf_reference(double mean, double std, std::span<const double> xs);

/// P(|X| > x) for X ~ N(mean, std^2), the reference matching an absolute-side CCDF.
CcdfPoints gaussian_abs_ccdf_reference(double mean, double std, std::span<const double> xs);

enum class TailMethod { ccdf_ols, hill };

std::string to_string(TailMethod method);
TailMethod parse_tail_method(const std::string& token);

struct TailFit {
    double exponent = 0.0;
    double fit_xmin = 0.0;
    std::size_t n_tail = 0;
    TailMethod method = TailMethod::ccdf_ols;
    double standard_error = 0.0;
    std::optional<double> r_squared;  ///< ccdf_ols only

    bool operator==(const TailFit&) const = default;
};

struct TailOptions {
    double tail_fraction = 0.05;
    std::size_t min_tail = 10;  ///< n_tail = max(min_tail, floor(N * tail_fraction))
    TailSide side = TailSide::upper;

    bool operator==(const TailOptions&) const = default;
};

/// Power-law tail exponent over the n_tail largest (side-transformed)
/// observations.
///   ccdf_ols: OLS of log10 p on log10 x over CCDF points with x >= x_(n_tail);
///             exponent = -slope, stderr = slope stderr.
///   hill:     k / sum_{i<=k} ln(x_(i) / x_(k+1)) with k = n_tail;
///             stderr = exponent / sqrt(k).
TailFit fit_tail_exponent(std::span<const double> values, TailMethod method,
                          const TailOptions& options = {});

/// ccdf_ols on given CCDF points with x >= x_min.
TailFit fit_ccdf_points(const CcdfPoints& ccdf, double x_min);

}  // namespace flowmem
