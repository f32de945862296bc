#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "flowmem/dfa.hpp"
#include "flowmem/error.hpp"
#include "flowmem/parallel.hpp"
#include "flowmem/rng.hpp"
#include "flowmem/synth.hpp"

using namespace flowmem;

namespace {

// Least squares polynomial fit in raw block coordinates via normal
// equations in long double, then mean squared residual.
long double brute_block_msr(const std::vector<double>& y, int m) {
    const std::size_t n = y.size();
    const int d = m + 1;
    std::vector<std::vector<long double>> a(d, std::vector<long double>(d + 1, 0.0L));
    for (std::size_t j = 0; j < n; ++j) {
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) a[r][c] += std::pow((long double)j, r + c);
            a[r][d] += std::pow((long double)j, r) * y[j];
        }
    }
    for (int p = 0; p < d; ++p) {
        int best = p;
        for (int r = p + 1; r < d; ++r) {
            if (std::fabs(a[r][p]) > std::fabs(a[best][p])) best = r;
        }
        std::swap(a[p], a[best]);
        for (int r = 0; r < d; ++r) {
            if (r == p) continue;
            const long double f = a[r][p] / a[p][p];
            for (int c = p; c <= d; ++c) a[r][c] -= f * a[p][c];
        }
    }
    long double ss = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
        long double fit = 0.0L;
        for (int r = 0; r < d; ++r) fit += a[r][d] / a[r][r] * std::pow((long double)j, r);
        ss += (y[j] - fit) * (y[j] - fit);
    }
    return ss / n;
}

double brute_fluctuation(const std::vector<double>& prof, std::size_t n, int m) {
    const std::size_t blocks = prof.size() / n;
    long double total = 0.0L;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::vector<double> block(prof.begin() + b * n, prof.begin() + (b + 1) * n);
        total += brute_block_msr(block, m);
    }
    return static_cast<double>(std::sqrt(total / blocks));
}

struct Ols {
    double slope, intercept, slope_se;
};

Ols closed_form_ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - intercept - slope * x[i];
        ssr += e * e;
    }
    const double sxx_c = sxx - sx * sx / n;
    return {slope, intercept, std::sqrt(ssr / (n - 2) / sxx_c)};
}

FluctuationCurve curve_from(const std::vector<std::size_t>& scales, const std::vector<double>& f) {
    FluctuationCurve c;
    for (std::size_t i = 0; i < scales.size(); ++i) c.points.push_back({scales[i], f[i]});
    c.series_length = 10000;
    return c;
}

}  // namespace

TEST(Profile, HandExamples) {
    EXPECT_EQ(profile(std::vector<double>{1, 2, 3}), (std::vector<double>{-1, -1, 0}));
    EXPECT_EQ(profile(std::vector<double>{1, -1, 1, -1}), (std::vector<double>{1, 0, 1, 0}));
}

TEST(Profile, EndsNearZero) {
    const auto x = iid_gaussian(100, 3);
    double abs_sum = 0;
    for (double v : x) abs_sum += std::fabs(v + 5.0);
    std::vector<double> shifted(x);
    for (double& v : shifted) v += 5.0;
    EXPECT_LE(std::fabs(profile(shifted).back()), 1e-9 * abs_sum);
}

TEST(Profile, Errors) {
    EXPECT_THROW(profile(std::vector<double>{1}), Error);
    EXPECT_THROW(profile(std::vector<double>{1, NAN, 2}), Error);
}

TEST(ScaleGrid, DefaultsAtT1000) {
    const auto g = make_scale_grid(1000, {});
    ASSERT_GE(g.size(), 4u);
    EXPECT_EQ(g.front(), 8u);
    EXPECT_LE(g.back(), 250u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_GE(1000 / g[i], 4u);
        if (i) {
            EXPECT_GT(g[i], g[i - 1]);
        }
    }
}

TEST(ScaleGrid, ShortSeries) {
    const auto g = make_scale_grid(40, {});
    ASSERT_FALSE(g.empty());
    for (auto n : g) {
        EXPECT_LE(n, 10u);
        EXPECT_GE(n, 8u);
    }
    EXPECT_THROW(make_scale_grid(31, {}), Error);
}

TEST(ScaleGrid, MatchesIndependentRule) {
    const DfaConfig c;
    const std::size_t t = 2500;
    const double n_max = std::floor(t * c.n_max_fraction);
    std::set<std::size_t> oracle;
    for (int k = 0; k < c.n_scales; ++k) {
        const double target = c.n_min * std::pow(n_max / c.n_min, double(k) / (c.n_scales - 1));
        const auto n = static_cast<std::size_t>(std::round(target));
        if (n >= std::size_t(c.n_min) && n <= n_max && t / n >= std::size_t(c.min_blocks)) oracle.insert(n);
    }
    const auto g = make_scale_grid(t, c);
    EXPECT_EQ(g, std::vector<std::size_t>(oracle.begin(), oracle.end()));
}

TEST(DfaConfig, Validation) {
    DfaConfig c;
    c.n_min = 3;  // m=2 needs n_min >= 4
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.n_scales = 3;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.min_blocks = 1;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.n_max_fraction = 1.5;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Fluctuation, GlobalQuadraticIsAnnihilated) {
    std::vector<double> y(400);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3.0 + 0.5 * i - 0.01 * double(i) * i;
    const auto scales = make_scale_grid(y.size(), {});
    const auto curve = fluctuation(y, scales, 2);
    EXPECT_TRUE(curve.points.empty());
}

TEST(Fluctuation, MatchesBruteForceBlockFit) {
    Rng rng(17);
    std::vector<double> y(16);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = double(i + 1) * rng.normal();
    const std::vector<std::size_t> scales{4};
    const auto curve = fluctuation(y, scales, 1);
    ASSERT_EQ(curve.points.size(), 1u);
    EXPECT_NEAR(curve.points[0].fluctuation, brute_fluctuation(y, 4, 1),
                1e-12 * brute_fluctuation(y, 4, 1));
}

TEST(Fluctuation, MatchesBruteForceAcrossOrders) {
    const auto x = fgn(0.7, 1000, 4);
    const auto y = profile(x);
    const std::vector<std::size_t> scales{8, 13, 50, 77, 250};
    for (int m : {0, 1, 2, 3}) {
        const auto curve = fluctuation(y, scales, m);
        ASSERT_EQ(curve.points.size(), scales.size());
        for (std::size_t i = 0; i < scales.size(); ++i) {
            const double oracle = brute_fluctuation(y, scales[i], m);
            EXPECT_NEAR(curve.points[i].fluctuation, oracle, 1e-9 * oracle)
                << "m=" << m << " n=" << scales[i];
        }
    }
}

TEST(Fluctuation, TrailingRemainderDiscarded) {
    auto y = profile(iid_gaussian(103, 8));
    const std::vector<std::size_t> scales{10};
    const auto a = fluctuation(y, scales, 1);
    y.resize(100);
    const auto b = fluctuation(y, scales, 1);
    EXPECT_EQ(a.points[0].fluctuation, b.points[0].fluctuation);
}

TEST(FitHurst, ExactPowerLaws) {
    const std::vector<std::size_t> scales{8, 12, 20, 35, 60, 100, 180, 250};
    for (double h : {0.7, 1.0}) {
        std::vector<double> f;
        for (auto n : scales) f.push_back(2.5 * std::pow(double(n), h));
        const auto fit = fit_hurst(curve_from(scales, f));
        EXPECT_NEAR(fit.hurst, h, 1e-12);
        EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
        EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-12);
        EXPECT_EQ(fit.scale_lo, 8u);
        EXPECT_EQ(fit.scale_hi, 250u);
        EXPECT_EQ(fit.n_points_used, scales.size());
    }
}

TEST(FitHurst, NoisyCurveMatchesClosedFormOls) {
    const std::vector<std::size_t> scales{8, 11, 16, 23, 33, 47, 68, 97};
    const std::vector<double> f{1.91, 2.44, 3.02, 3.87, 4.51, 5.73, 6.88, 8.4};
    const auto fit = fit_hurst(curve_from(scales, f));
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        lx.push_back(std::log10(double(scales[i])));
        ly.push_back(std::log10(f[i]));
    }
    const auto o = closed_form_ols(lx, ly);
    EXPECT_NEAR(fit.hurst, o.slope, 1e-10 * std::fabs(o.slope));
    EXPECT_NEAR(fit.intercept, o.intercept, 1e-10 * std::fabs(o.intercept));
    EXPECT_NEAR(fit.slope_stderr, o.slope_se, 1e-10 * o.slope_se);
}

TEST(FitHurst, RangeAndInsufficientScales) {
    const std::vector<std::size_t> scales{8, 12, 20, 35, 60, 100};
    std::vector<double> f;
    for (auto n : scales) f.push_back(std::pow(double(n), 0.6));
    const auto curve = curve_from(scales, f);
    const auto fit = fit_hurst(curve, std::pair<std::size_t, std::size_t>{12, 60});
    EXPECT_EQ(fit.n_points_used, 4u);
    EXPECT_EQ(fit.scale_lo, 12u);
    EXPECT_EQ(fit.scale_hi, 60u);
    EXPECT_THROW(fit_hurst(curve, std::pair<std::size_t, std::size_t>{12, 35}), Error);
}

TEST(DfaHurst, GeneratorOracles) {
    const auto h07 = dfa_hurst(fgn(0.7, 16384, 2024)).hurst;
    EXPECT_GE(h07, 0.67);
    EXPECT_LE(h07, 0.73);
    const auto h05 = dfa_hurst(iid_gaussian(16384, 2024)).hurst;
    EXPECT_GE(h05, 0.47);
    EXPECT_LE(h05, 0.53);
    EXPECT_NEAR(dfa_hurst(cumsum(fgn(0.4, 16384, 2024))).hurst, 1.4, 0.05);
}

TEST(DfaProperty, AffineInvariance) {
    const auto x = fgn(0.65, 4096, 12);
    const double h = dfa_hurst(x).hurst;
    for (auto [a, b] : {std::pair{2.0, 0.0}, std::pair{-3.7, 100.0}, std::pair{1e-6, -5.0}}) {
        std::vector<double> y(x);
        for (double& v : y) v = a * v + b;
        EXPECT_NEAR(dfa_hurst(y).hurst, h, 1e-9) << a << ',' << b;
    }
}

TEST(DfaProperty, ReversalTolerance) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto x = fgn(0.75, 4096, seed);
        const double h = dfa_hurst(x).hurst;
        std::reverse(x.begin(), x.end());
        EXPECT_LE(std::fabs(dfa_hurst(x).hurst - h), 0.05);
    }
}

TEST(DfaProperty, PolynomialAnnihilation) {
    for (int m : {1, 2, 3}) {
        // X of degree m-1 has a profile of degree m
        std::vector<double> x(512);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(double(i) / 100.0, m - 1) + 0.3;
        DfaConfig c;
        c.detrend_order = m;
        c.n_min = std::max(8, m + 2);
        const auto grid = make_scale_grid(x.size(), c);
        EXPECT_TRUE(fluctuation(profile(x), grid, m).points.empty()) << m;
        EXPECT_THROW(dfa_hurst(x, c), Error);
    }
}

TEST(DfaProperty, SelfConcatenationAgreesAtSharedScales) {
    const auto x = fgn(0.7, 4096, 99);
    std::vector<double> xx(x);
    xx.insert(xx.end(), x.begin(), x.end());
    const std::vector<std::size_t> scales{16, 32, 64, 128, 256};
    const auto a = fluctuation(profile(x), scales, 2);
    const auto b = fluctuation(profile(xx), scales, 2);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_NEAR(a.points[i].fluctuation, b.points[i].fluctuation,
                    1e-6 * a.points[i].fluctuation);
    }
}

TEST(DfaProperty, DeterministicAcrossThreadCounts) {
    const auto x = fgn(0.8, 8192, 5);
    set_max_threads(1);
    const auto a = dfa_analyze(x);
    set_max_threads(4);
    const auto b = dfa_analyze(x);
    set_max_threads(0);
    EXPECT_EQ(a.curve, b.curve);
    EXPECT_EQ(a.fit, b.fit);
}
