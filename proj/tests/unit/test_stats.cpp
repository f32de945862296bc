#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "flowmem/error.hpp"
#include "flowmem/rng.hpp"
#include "flowmem/rolling.hpp"
#include "flowmem/stats.hpp"
#include "flowmem/synth.hpp"

using namespace flowmem;

namespace {

RollingHurst entries_at(const std::vector<std::string>& dates, const std::vector<double>& h,
                        std::size_t step) {
    RollingHurst r;
    r.step = step;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        RollingEntry e;
        e.end_date = dates[i];
        if (!std::isnan(h[i])) {
            DfaFit f;
            f.hurst = h[i];
            e.fit = f;
        } else {
            e.error = "failed";
        }
        r.entries.push_back(e);
    }
    return r;
}

VolatilitySeries daily(const std::vector<std::string>& cal) {
    VolatilitySeries v;
    v.calendar = cal;
    for (std::size_t i = 0; i < cal.size(); ++i) v.values.push_back(double(i) * 0.001);
    return v;
}

// Plain textbook formulas, computed from raw sums.
struct OracleOls {
    double alpha, beta, se_alpha, se_beta, t_alpha, t_beta, r2, s2, hc1_se_beta, hc1_se_alpha;
};

OracleOls oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    OracleOls o{};
    o.beta = sxy / sxx;
    o.alpha = my - o.beta * mx;
    double ssr = 0;
    std::vector<double> u;
    for (std::size_t i = 0; i < x.size(); ++i) {
        u.push_back(y[i] - o.alpha - o.beta * x[i]);
        ssr += u.back() * u.back();
    }
    o.s2 = ssr / (n - 2);
    o.se_beta = std::sqrt(o.s2 / sxx);
    o.se_alpha = std::sqrt(o.s2 * (1.0 / n + mx * mx / sxx));
    o.t_alpha = o.alpha / o.se_alpha;
    o.t_beta = o.beta / o.se_beta;
    o.r2 = 1.0 - ssr / syy;
    // HC1 with the uncentred design [1, x]: (X'X)^-1 (sum u^2 x x') (X'X)^-1 * n/(n-2)
    double a = n, b = sx, d = 0;
    for (double v : x) d += v * v;
    const double det = a * d - b * b;
    const double i00 = d / det, i01 = -b / det, i11 = a / det;
    double m00 = 0, m01 = 0, m11 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = u[i] * u[i];
        m00 += w;
        m01 += w * x[i];
        m11 += w * x[i] * x[i];
    }
    const double c = n / (n - 2);
    // V = I M I
    const double v00 = i00 * (m00 * i00 + m01 * i01) + i01 * (m01 * i00 + m11 * i01);
    const double v11 = i01 * (m00 * i01 + m01 * i11) + i11 * (m01 * i01 + m11 * i11);
    o.hc1_se_alpha = std::sqrt(c * v00);
    o.hc1_se_beta = std::sqrt(c * v11);
    return o;
}

void expect_rel(double got, double want, double tol) {
    EXPECT_NEAR(got, want, tol * std::max(std::fabs(want), 1e-300)) << got << " vs " << want;
}

}  // namespace

TEST(Volatility, SquaredReturns) {
    const auto rv = squared_return_vol({{"a", "b"}, {0.01, -0.02}});
    EXPECT_NEAR(rv.values[0], 0.0001, 1e-18);
    EXPECT_NEAR(rv.values[1], 0.0004, 1e-18);
    EXPECT_EQ(squared_return_vol({{"a", "b"}, {0.0, 0.0}}).values, (std::vector<double>{0, 0}));
}

TEST(Volatility, PricePipelineHandComputed) {
    const PriceSeries p{{"d1", "d2", "d3", "d4", "d5"}, {100, 101, 99.5, 99.5, 102}};
    const auto r = log_returns(p);
    ASSERT_EQ(r.returns.size(), 4u);
    EXPECT_EQ(r.calendar.front(), "d2");
    const double hand[] = {std::log(1.01), std::log(99.5 / 101), 0.0, std::log(102 / 99.5)};
    const auto rv = squared_return_vol(r);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(rv.values[i], hand[i] * hand[i], 1e-18);
    EXPECT_THROW(log_returns({{"d1", "d2"}, {100, -1}}), Error);
    EXPECT_THROW(squared_return_vol({{"a"}, {NAN}}), Error);
}

TEST(Align, ForwardFillAndStepDates) {
    const auto cal = business_day_calendar("2020-01-01", 260);
    const auto rolling = entries_at({cal[249], cal[254]}, {0.6, 0.7}, 5);
    const auto ff = align_h_rv(rolling, daily(cal));
    // days 250..254 (1-based) take H(250), days 255..259 take H(255)
    ASSERT_EQ(ff.dates.size(), 10u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(ff.dates[i], cal[249 + i]);
        EXPECT_EQ(ff.hurst[i], 0.6);
        EXPECT_EQ(ff.hurst[i + 5], 0.7);
    }
    const auto sd = align_h_rv(rolling, daily(cal), {FillPolicy::step_dates_only, 0});
    EXPECT_EQ(sd.dates, (std::vector<std::string>{cal[249], cal[254]}));
    EXPECT_EQ(sd.rv[0], 249 * 0.001);
}

TEST(Align, LagShiftsRv) {
    const auto cal = business_day_calendar("2020-01-01", 30);
    const auto rolling = entries_at({cal[10]}, {0.5}, 5);
    const auto a = align_h_rv(rolling, daily(cal), {FillPolicy::step_dates_only, 3});
    EXPECT_EQ(a.dates[0], cal[10]);
    EXPECT_EQ(a.rv[0], 13 * 0.001);
}

TEST(Align, GapsMatchBruteForce) {
    const auto cal = business_day_calendar("2021-01-04", 200);
    std::vector<std::string> dates;
    std::vector<double> h;
    for (std::size_t i = 20; i < 200; i += 5) {
        dates.push_back(cal[i]);
        h.push_back(i % 15 == 0 ? NAN : 0.5 + i * 1e-3);
    }
    const auto rolling = entries_at(dates, h, 5);
    // RV calendar with holes so elapsed-day counting matters
    VolatilitySeries rv;
    for (std::size_t i = 0; i < cal.size(); ++i) {
        if (i % 7 == 3) continue;
        rv.calendar.push_back(cal[i]);
        rv.values.push_back(double(i));
    }
    const auto got = align_h_rv(rolling, rv);

    std::size_t expected = 0;
    for (std::size_t d = 0; d < rv.calendar.size(); ++d) {
        // latest entry dated on or before rv day d
        int latest = -1;
        for (std::size_t e = 0; e < dates.size(); ++e) {
            if (dates[e] <= rv.calendar[d]) latest = int(e);
        }
        if (latest < 0 || std::isnan(h[latest])) continue;
        // rv days strictly after the entry date, up to and including d
        std::size_t elapsed = 0;
        for (std::size_t k = 0; k <= d; ++k) {
            if (rv.calendar[k] > dates[latest]) ++elapsed;
        }
        if (elapsed < 5) ++expected;
    }
    EXPECT_EQ(got.dates.size(), expected);
    for (double v : got.hurst) EXPECT_FALSE(std::isnan(v));
}

TEST(Align, EmptyIntersectionThrows) {
    const auto rolling = entries_at({"2030-01-01"}, {0.5}, 5);
    EXPECT_THROW(align_h_rv(rolling, daily(business_day_calendar("2020-01-01", 10))), Error);
}

TEST(Ols, ExactLine) {
    const std::vector<double> x{-1, 0.5, 2, 3, 7.25};
    std::vector<double> y;
    for (double v : x) y.push_back(2 + 3 * v);
    const auto r = ols(y, x);
    EXPECT_NEAR(r.alpha, 2, 1e-12);
    EXPECT_NEAR(r.beta, 3, 1e-12);
    EXPECT_NEAR(r.r_squared, 1, 1e-12);
    EXPECT_NEAR(r.residual_variance, 0, 1e-12);
    EXPECT_EQ(r.n, 5u);
}

TEST(Ols, FivePointOracle) {
    const std::vector<double> x{0.52, 0.61, 0.58, 0.73, 0.66};
    const std::vector<double> y{1.3e-4, 2.9e-4, 1.1e-4, 4.4e-4, 2.0e-4};
    const auto r = ols(y, x);
    const auto o = oracle(x, y);
    expect_rel(r.alpha, o.alpha, 1e-10);
    expect_rel(r.beta, o.beta, 1e-10);
    expect_rel(r.se_alpha, o.se_alpha, 1e-10);
    expect_rel(r.se_beta, o.se_beta, 1e-10);
    expect_rel(r.t_alpha, o.t_alpha, 1e-10);
    expect_rel(r.t_beta, o.t_beta, 1e-10);
    expect_rel(r.r_squared, o.r2, 1e-10);
    expect_rel(r.residual_variance, o.s2, 1e-10);
    expect_rel(r.robust_se_beta, o.hc1_se_beta, 1e-10);
    expect_rel(r.robust_se_alpha, o.hc1_se_alpha, 1e-10);
    expect_rel(r.robust_t_beta, o.beta / o.hc1_se_beta, 1e-10);
}

TEST(Ols, DegenerateRegressor) {
    const std::vector<double> x{1, 1, 1, 1}, y{1, 2, 3, 4};
    try {
        ols(y, x);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate regressor"), std::string::npos);
    }
    EXPECT_THROW(ols(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
}

TEST(Ols, TableOneScaleReconstruction) {
    // beta=0.046 with t about 4.7 at n=2000: sd_x=0.1 gives se_beta = sigma/(0.1*sqrt(n))
    const std::size_t n = 2000;
    const double sigma = 0.046 / 4.7 * 0.1 * std::sqrt(double(n));
    Rng rng(2024);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 0.6 + 0.1 * rng.normal();
        y[i] = 0.003 + 0.046 * x[i] + sigma * rng.normal();
    }
    const auto r = ols(y, x);
    const auto o = oracle(x, y);
    EXPECT_LE(std::fabs(r.beta - 0.046), 3.0 * o.se_beta);
    EXPECT_NEAR(r.t_beta, 4.7, 1.5);
}

TEST(OlsProperty, ResidualsOrthogonal) {
    Rng rng(6);
    std::vector<double> x(300), y(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal() * 5 + 2;
        y[i] = 1 - 0.4 * x[i] + rng.normal();
    }
    const auto r = ols(y, x);
    double su = 0, sux = 0, scale = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = y[i] - r.alpha - r.beta * x[i];
        su += u;
        sux += u * x[i];
        scale += std::fabs(y[i] * x[i]);
    }
    EXPECT_NEAR(su, 0.0, 1e-9 * scale);
    EXPECT_NEAR(sux, 0.0, 1e-9 * scale);

    // R^2 equals the squared sample correlation
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / x.size();
        my += y[i] / y.size();
    }
    double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    EXPECT_NEAR(r.r_squared, cxy * cxy / (cxx * cyy), 1e-12);
}

TEST(OlsProperty, BetaEquivariance) {
    Rng rng(7);
    std::vector<double> x(100), y(100);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = 0.5 * x[i] + rng.normal();
    }
    const auto r = ols(y, x);
    for (double c : {-2.0, 0.01, 1e4}) {
        std::vector<double> cx(x);
        for (double& v : cx) v *= c;
        const auto s = ols(y, cx);
        expect_rel(s.beta, r.beta / c, 1e-10);
        expect_rel(s.t_beta, r.t_beta * (c < 0 ? -1 : 1), 1e-10);
    }
}

TEST(Significance, PValuesAndStars) {
    EXPECT_NEAR(two_sided_p_value(2.228138851986274, 10), 0.05, 1e-9);
    EXPECT_NEAR(two_sided_p_value(0.0, 5), 1.0, 1e-15);
    EXPECT_EQ(significance_stars(4.718, 1998), "***");
    EXPECT_EQ(significance_stars(-2.0, 1998), "**");
    EXPECT_EQ(significance_stars(1.7, 1998), "*");
    EXPECT_EQ(significance_stars(1.0, 1998), "");
}
