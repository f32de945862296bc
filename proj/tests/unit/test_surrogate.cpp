#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "flowmem/dfa.hpp"
#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"
#include "flowmem/parallel.hpp"
#include "flowmem/surrogate.hpp"
#include "flowmem/synth.hpp"

using namespace flowmem;

namespace {

// O(n^2) periodogram of the mean-removed series, independent of the FFT path.
std::vector<double> naive_power(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const double mu = mean(x);
    std::vector<double> p(n / 2 + 1);
    for (std::size_t k = 0; k < p.size(); ++k) {
        std::complex<long double> acc = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const long double ang = -2.0L * std::numbers::pi_v<long double> * k * t / n;
            acc += (long double)(x[t] - mu) * std::complex<long double>(std::cos(ang), std::sin(ang));
        }
        p[k] = static_cast<double>(std::norm(acc));
    }
    return p;
}

std::vector<double> heavy_persistent(std::size_t n, std::uint64_t seed) {
    auto z = fgn(0.8, n, seed);
    for (double& v : z) v = std::exp(1.2 * v);
    return z;
}

}  // namespace

TEST(Shuffle, PreservesMultiset) {
    const auto x = pareto(1.5, 1000, 2);
    auto s = shuffle(x, 7);
    EXPECT_NE(s, x);
    auto a = x;
    std::sort(a.begin(), a.end());
    std::sort(s.begin(), s.end());
    EXPECT_EQ(a, s);
    EXPECT_EQ(shuffle(std::vector<double>{7.0}, 3), std::vector<double>{7.0});
}

TEST(Shuffle, DeterministicBySeed) {
    const auto x = iid_gaussian(300, 1);
    EXPECT_EQ(shuffle(x, 5), shuffle(x, 5));
    EXPECT_NE(shuffle(x, 5), shuffle(x, 6));
}

TEST(Shuffle, UniformPermutation) {
    // position of element 0 over many seeds is uniform over 5 slots
    std::vector<int> counts(5, 0);
    const std::vector<double> x{0, 1, 2, 3, 4};
    for (std::uint64_t s = 0; s < 5000; ++s) {
        const auto y = shuffle(x, s);
        ++counts[std::find(y.begin(), y.end(), 0.0) - y.begin()];
    }
    for (int c : counts) EXPECT_NEAR(c, 1000, 150);
}

TEST(Shuffle, DestroysPersistence) {
    const double h = dfa_hurst(shuffle(fgn(0.8, 2500, 3), 11)).hurst;
    EXPECT_GE(h, 0.42);
    EXPECT_LE(h, 0.58);
}

TEST(PhaseRandomize, PreservesSpectrumAndMean) {
    for (std::size_t n : {256u, 257u, 4u, 5u}) {
        const auto x = heavy_persistent(n, n);
        const auto y = phase_randomize(x, 99);
        ASSERT_EQ(y.size(), n);
        EXPECT_NEAR(mean(y), mean(x), 1e-10 * std::max(1.0, std::fabs(mean(x))));
        const auto px = naive_power(x);
        const auto py = naive_power(y);
        double peak = *std::max_element(px.begin(), px.end());
        for (std::size_t k = 1; k < px.size(); ++k) {
            EXPECT_NEAR(py[k], px[k], 1e-8 * std::max(px[k], 1e-6 * peak)) << "n=" << n << " k=" << k;
        }
        if (n > 5) {
            EXPECT_NE(x, y);
        }
    }
}

TEST(PhaseRandomize, Errors) {
    EXPECT_THROW(phase_randomize(std::vector<double>{1, 2, 3}, 1), Error);
}

TEST(PhaseRandomize, ContrastWithShuffle) {
    const auto x = fgn(0.8, 8192, 13);
    const double hp = dfa_hurst(phase_randomize(x, 1)).hurst;
    const double hs = dfa_hurst(shuffle(x, 1)).hurst;
    EXPECT_GE(hp, 0.72);
    EXPECT_LE(hp, 0.88);
    EXPECT_NEAR(hs, 0.5, 0.08);
}

TEST(SurrogateBand, ShuffleNullRecovery) {
    const auto x = heavy_persistent(2500, 77);
    const auto band = surrogate_band(x, {SurrogateKind::shuffle, 1234, 50});
    EXPECT_EQ(band.hurst_values.size(), 50u);
    EXPECT_GE(band.mean, 0.47);
    EXPECT_LE(band.mean, 0.53);
    ASSERT_TRUE(band.std.has_value());
    EXPECT_LE(band.q05, band.q25);
    EXPECT_LE(band.q25, band.median);
    EXPECT_LE(band.median, band.q75);
    EXPECT_LE(band.q75, band.q95);
}

TEST(SurrogateBand, SingleSurrogate) {
    const auto x = iid_gaussian(600, 1);
    const SurrogateSpec spec{SurrogateKind::phase_randomize, 9, 1};
    const auto band = surrogate_band(x, spec);
    EXPECT_FALSE(band.std.has_value());
    EXPECT_EQ(band.mean, band.hurst_values[0]);
    EXPECT_EQ(band.mean, dfa_hurst(make_surrogate(x, spec, 0)).hurst);
}

TEST(SurrogateBand, DeterministicAndCounterBased) {
    const auto x = iid_gaussian(800, 4);
    const SurrogateSpec spec{SurrogateKind::shuffle, 42, 8};
    set_max_threads(1);
    const auto a = surrogate_band(x, spec);
    set_max_threads(4);
    const auto b = surrogate_band(x, spec);
    set_max_threads(0);
    EXPECT_EQ(a, b);
    // surrogate k reproducible without generating 0..k-1
    EXPECT_EQ(a.hurst_values[5], dfa_hurst(make_surrogate(x, spec, 5)).hurst);
    EXPECT_THROW((SurrogateSpec{SurrogateKind::shuffle, 1, 0}.validate()), Error);
}
