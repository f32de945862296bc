#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "flowmem/rolling.hpp"

namespace flowmem {

struct PriceSeries {
    std::vector<std::string> calendar;
    std::vector<double> close;
};

/// Daily log returns; calendar[i] is the date of the later price.
struct ReturnSeries {
    std::vector<std::string> calendar;
    std::vector<double> returns;

    void validate() const;
};

/// r_t = ln(P_t / P_{t-1}). Prices must be finite and positive, >= 2 of them.
ReturnSeries log_returns(const PriceSeries& prices);

/// Daily volatility proxy on the returns' calendar.
struct VolatilitySeries {
    std::vector<std::string> calendar;
    std::vector<double> values;
};

/// RV_t = r_t^2.
VolatilitySeries squared_return_vol(const ReturnSeries& returns);

enum class FillPolicy { forward_fill, step_dates_only };

std::string to_string(FillPolicy policy);
FillPolicy parse_fill_policy(const std::string& token);

struct AlignOptions {
    FillPolicy policy = FillPolicy::forward_fill;
    /// RV is taken lag_k trading days after the H date (0 = contemporaneous).
    std::size_t lag_k = 0;

    bool operator==(const AlignOptions&) const = default;
};

struct AlignedPairs {
    std::vector<std::string> dates;  ///< date of the H observation
    std::vector<double> hurst;
    std::vector<double> rv;
};

/// Pairs rolling H with RV on the RV calendar.
///   forward_fill:    each RV day takes H from the latest rolling entry dated
///                    on or before it, provided fewer than `step` RV days
///                    have elapsed since that entry; a gap entry yields no H.
///   step_dates_only: only RV days equal to a (non-gap) entry date.
/// Throws when no pair survives.
AlignedPairs align_h_rv(const RollingHurst& rolling, const VolatilitySeries& rv,
                        const AlignOptions& options = {});

struct OlsResult {
    double alpha = 0.0;
    double beta = 0.0;
    double se_alpha = 0.0;
    double se_beta = 0.0;
    double t_alpha = 0.0;
    double t_beta = 0.0;
    /// Heteroskedasticity-robust (HC1) standard errors and t-values.
    double robust_se_alpha = 0.0;
    double robust_se_beta = 0.0;
    double robust_t_alpha = 0.0;
    double robust_t_beta = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
    double residual_variance = 0.0;

    bool operator==(const OlsResult&) const = default;
};

/// y = alpha + beta x + u by closed-form OLS; classical t-values use n - 2
/// degrees of freedom. Throws "degenerate regressor" for constant x.
OlsResult ols(std::span<const double> y, std::span<const double> x);

/// Two-sided p-value of t under Student's t with dof degrees of freedom.
double two_sided_p_value(double t, double dof);

/// "***" (p < 0.01), "**" (p < 0.05), "*" (p < 0.10) or "".
std::string significance_stars(double t, double dof);

}  // namespace flowmem
