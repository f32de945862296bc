#include "flowmem/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <map>

#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"

namespace flowmem {

void ReturnSeries::validate() const {
    if (calendar.size() != returns.size()) throw Error("return series: calendar length mismatch");
    for (double r : returns) {
        if (!std::isfinite(r)) throw Error("return series contains non-finite values");
    }
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.calendar.size() != prices.close.size()) {
        throw Error("price series: calendar length mismatch");
    }
    if (prices.close.size() < 2) throw Error("need at least 2 prices for returns");
    ReturnSeries out;
    for (std::size_t i = 0; i < prices.close.size(); ++i) {
        const double p = prices.close[i];
        if (!std::isfinite(p) || !(p > 0.0)) {
            throw Error("price at " + prices.calendar[i] + " must be finite and positive");
        }
        if (i == 0) continue;
        out.calendar.push_back(prices.calendar[i]);
        out.returns.push_back(std::log(p / prices.close[i - 1]));
    }
    return out;
}

VolatilitySeries squared_return_vol(const ReturnSeries& returns) {
    returns.validate();
    VolatilitySeries out;
    out.calendar = returns.calendar;
    out.values.reserve(returns.returns.size());
    for (double r : returns.returns) out.values.push_back(r * r);
    return out;
}

std::string to_string(FillPolicy policy) {
    return policy == FillPolicy::forward_fill ? "forward_fill" : "step_dates_only";
}

FillPolicy parse_fill_policy(const std::string& token) {
    if (token == "forward_fill") return FillPolicy::forward_fill;
    if (token == "step_dates_only") return FillPolicy::step_dates_only;
    throw Error("unknown fill policy '" + token + "'");
}

AlignedPairs align_h_rv(const RollingHurst& rolling, const VolatilitySeries& rv,
                        const AlignOptions& options) {
    if (rv.calendar.size() != rv.values.size()) throw Error("volatility series length mismatch");
    const std::size_t days = rv.calendar.size();

    // H available on each RV day (index into rolling.entries), or none.
    std::vector<const RollingEntry*> h_on_day(days, nullptr);
    std::size_t e = 0;
    const RollingEntry* latest = nullptr;
    std::size_t latest_day = 0;  // RV position of the first day at or after latest's date
    for (std::size_t d = 0; d < days; ++d) {
        while (e < rolling.entries.size() && rolling.entries[e].end_date <= rv.calendar[d]) {
            latest = &rolling.entries[e];
            latest_day = d;
            ++e;
        }
        if (latest == nullptr || latest->is_gap()) continue;
        const bool on_date = latest->end_date == rv.calendar[d];
        if (options.policy == FillPolicy::step_dates_only) {
            if (on_date) h_on_day[d] = latest;
            continue;
        }
        // RV days elapsed since the entry date.
        const std::size_t elapsed =
            d - latest_day + (rv.calendar[latest_day] == latest->end_date ? 0 : 1);
        if (elapsed < rolling.step) h_on_day[d] = latest;
    }

    AlignedPairs out;
    for (std::size_t d = 0; d + options.lag_k < days; ++d) {
        if (h_on_day[d] == nullptr) continue;
        out.dates.push_back(rv.calendar[d]);
        out.hurst.push_back(h_on_day[d]->fit->hurst);
        out.rv.push_back(rv.values[d + options.lag_k]);
    }
    if (out.dates.empty()) throw Error("no overlapping dates between rolling H and volatility");
    return out;
}

OlsResult ols(std::span<const double> y, std::span<const double> x) {
    if (x.size() != y.size()) throw Error("ols: x and y differ in length");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error("ols: non-finite input");
    }
    const LineFit line = fit_line(x, y);

    OlsResult out;
    out.n = line.n;
    out.alpha = line.intercept;
    out.beta = line.slope;
    out.se_alpha = line.intercept_stderr;
    out.se_beta = line.slope_stderr;
    out.residual_variance = line.residual_variance;
    out.r_squared = line.r_squared;
    out.t_alpha = out.alpha / out.se_alpha;
    out.t_beta = out.beta / out.se_beta;

    // HC1 sandwich: (X'X)^-1 X' diag(u^2) X (X'X)^-1 * n / (n - 2), on centred x.
    const double n = static_cast<double>(line.n);
    CompensatedSum meat_bb, meat_ab, meat_aa;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = y[i] - out.alpha - out.beta * x[i];
        const double dx = x[i] - line.x_mean;
        meat_bb.add(dx * dx * u * u);
        meat_ab.add(dx * u * u);
        meat_aa.add(u * u);
    }
    const double scale = n / (n - 2.0);
    // In the centred parameterisation (c, beta) with c = alpha + beta * x_mean the
    // bread is diag(1/n, 1/sxx).
    const double var_beta = scale * meat_bb.value() / (line.sxx * line.sxx);
    const double var_c = scale * meat_aa.value() / (n * n);
    const double cov_c_beta = scale * meat_ab.value() / (n * line.sxx);
    const double var_alpha =
        var_c - 2.0 * line.x_mean * cov_c_beta + line.x_mean * line.x_mean * var_beta;
    out.robust_se_beta = std::sqrt(var_beta);
    out.robust_se_alpha = std::sqrt(std::max(var_alpha, 0.0));
    out.robust_t_beta = out.beta / out.robust_se_beta;
    out.robust_t_alpha = out.alpha / out.robust_se_alpha;
    return out;
}

double two_sided_p_value(double t, double dof) {
    if (!(dof > 0.0)) throw Error("p-value needs positive degrees of freedom");
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

std::string significance_stars(double t, double dof) {
    const double p = two_sided_p_value(t, dof);
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    return "";
}

}  // namespace flowmem
