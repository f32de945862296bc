#include "flowmem/tails.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"

namespace flowmem {

namespace {

void check_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("tail analysis input contains non-finite values");
    }
}

double upper_gaussian(double x, double mean, double std) {
    return 0.5 * std::erfc((x - mean) / (std * std::numbers::sqrt2));
}

}  // namespace

std::string to_string(TailSide side) {
    switch (side) {
        case TailSide::upper: return "upper";
        case TailSide::lower: return "lower";
        case TailSide::absolute: return "absolute";
    }
    return "?";
}

TailSide parse_tail_side(const std::string& token) {
    if (token == "upper") return TailSide::upper;
    if (token == "lower") return TailSide::lower;
    if (token == "absolute") return TailSide::absolute;
    throw Error("unknown tail side '" + token + "'");
}

std::string to_string(TailMethod method) {
    return method == TailMethod::ccdf_ols ? "ccdf_ols" : "hill";
}

TailMethod parse_tail_method(const std::string& token) {
    if (token == "ccdf_ols") return TailMethod::ccdf_ols;
    if (token == "hill") return TailMethod::hill;
    throw Error("unknown tail method '" + token + "'");
}

std::vector<double> tail_values(std::span<const double> values, TailSide side) {
    std::vector<double> out(values.begin(), values.end());
    if (side == TailSide::lower) {
        for (auto& v : out) v = -v;
    } else if (side == TailSide::absolute) {
        for (auto& v : out) v = std::abs(v);
    }
    return out;
}

CcdfPoints empirical_ccdf(std::span<const double> values, TailSide side) {
    if (values.size() < 10) throw Error("CCDF needs at least 10 values");
    check_finite(values);
    auto sorted = tail_values(values, side);
    std::sort(sorted.begin(), sorted.end());

    CcdfPoints out;
    out.side = side;
    out.sample_size = sorted.size();
    const double n = static_cast<double>(sorted.size());
    if (sorted.front() == sorted.back()) {
        out.degenerate = true;
        out.warning = "all observations equal; CCDF is a single point";
        out.points.push_back({sorted.front(), 1.0});
        return out;
    }
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const std::size_t above = sorted.size() - j;
        if (above == 0) break;
        out.points.push_back({sorted[i], static_cast<double>(above) / n});
        i = j;
    }
    return out;
}

CcdfPoints gaussian_ccdf_reference(double mean, double std, std::span<const double> xs) {
    if (!(std > 0.0) || !std::isfinite(std)) throw Error("Gaussian reference needs std > 0");
    CcdfPoints out;
    out.side = TailSide::upper;
    out.sample_size = xs.size();
    for (double x : xs) out.points.push_back({x, upper_gaussian(x, mean, std)});
    return out;
}

CcdfPoints gaussian_abs_ccdf_reference(double mean, double std, std::span<const double> xs) {
    if (!(std > 0.0) || !std::isfinite(std)) throw Error("Gaussian reference needs std > 0");
    CcdfPoints out;
    out.side = TailSide::absolute;
    out.sample_size = xs.size();
    for (double x : xs) {
        const double p = x < 0.0 ? 1.0
                                 : upper_gaussian(x, mean, std) + upper_gaussian(x, -mean, std);
        out.points.push_back({x, p});
    }
    return out;
}

TailFit fit_ccdf_points(const CcdfPoints& ccdf, double x_min) {
    std::vector<double> log_x, log_p;
    for (const auto& pt : ccdf.points) {
        if (pt.x < x_min) continue;
        if (!(pt.x > 0.0)) throw Error("nonpositive value in tail; log undefined");
        if (!(pt.p > 0.0)) continue;
        log_x.push_back(std::log10(pt.x));
        log_p.push_back(std::log10(pt.p));
    }
    if (log_x.size() < 3) throw Error("insufficient tail points for CCDF fit");
    const LineFit line = fit_line(log_x, log_p);
    TailFit fit;
    fit.method = TailMethod::ccdf_ols;
    fit.exponent = -line.slope;
    fit.standard_error = line.slope_stderr;
    fit.r_squared = line.r_squared;
    fit.fit_xmin = x_min;
    fit.n_tail = log_x.size();
    if (!(fit.exponent > 0.0)) throw Error("CCDF tail fit produced a nonpositive exponent");
    return fit;
}

TailFit fit_tail_exponent(std::span<const double> values, TailMethod method,
                          const TailOptions& options) {
    if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
        throw Error("tail_fraction must lie in (0, 1]");
    }
    check_finite(values);
    auto desc = tail_values(values, options.side);
    std::sort(desc.begin(), desc.end(), std::greater<>());
    const std::size_t n = desc.size();
    const auto k = std::max<std::size_t>(
        std::max<std::size_t>(options.min_tail, 10),
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * options.tail_fraction)));
    if (n < k + 1) {
        throw Error("insufficient tail points: need " + std::to_string(k + 1) + ", have " +
                    std::to_string(n));
    }

    if (method == TailMethod::hill) {
        const double threshold = desc[k];
        if (!(threshold > 0.0)) throw Error("nonpositive value in tail; log undefined");
        CompensatedSum acc;
        for (std::size_t i = 0; i < k; ++i) acc.add(std::log(desc[i] / threshold));
        const double denom = acc.value();
        if (!(denom > 0.0)) throw Error("Hill estimator undefined: tail values all equal");
        TailFit fit;
        fit.method = TailMethod::hill;
        fit.n_tail = k;
        fit.fit_xmin = threshold;
        fit.exponent = static_cast<double>(k) / denom;
        fit.standard_error = fit.exponent / std::sqrt(static_cast<double>(k));
        return fit;
    }

    const double x_min = desc[k - 1];
    if (!(x_min > 0.0)) throw Error("nonpositive value in tail; log undefined");
    const auto ccdf = empirical_ccdf(desc, TailSide::upper);
    auto fit = fit_ccdf_points(ccdf, x_min);
    fit.n_tail = k;
    return fit;
}

}  // namespace flowmem
