#include "flowmem/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"
#include "flowmem/parallel.hpp"
#include "flowmem/rng.hpp"

namespace flowmem {

std::string to_string(SurrogateKind kind) {
    return kind == SurrogateKind::shuffle ? "shuffle" : "phase_randomize";
}

SurrogateKind parse_surrogate_kind(const std::string& token) {
    if (token == "shuffle") return SurrogateKind::shuffle;
    if (token == "phase_randomize" || token == "phase") return SurrogateKind::phase_randomize;
    throw Error("unknown surrogate kind '" + token + "'");
}

void SurrogateSpec::validate() const {
    if (count < 1) throw Error("surrogate count must be >= 1");
}

std::vector<double> shuffle(std::span<const double> series, std::uint64_t seed) {
    std::vector<double> out(series.begin(), series.end());
    Rng rng(seed);
    for (std::size_t i = out.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(out[i - 1], out[j]);
    }
    return out;
}

std::vector<double> phase_randomize(std::span<const double> series, std::uint64_t seed) {
    const std::size_t n = series.size();
    if (n < 4) throw Error("phase randomization needs at least 4 values");
    for (double x : series) {
        if (!std::isfinite(x)) throw Error("phase randomization input contains non-finite values");
    }
    const double m = mean(series);
    std::vector<double> centred(n);
    for (std::size_t i = 0; i < n; ++i) centred[i] = series[i] - m;

    auto spectrum = detail::forward_real_dft(centred);
    Rng rng(seed);
    spectrum[0] = {spectrum[0].real(), 0.0};
    const std::size_t last_free = (n % 2 == 0) ? n / 2 - 1 : n / 2;
    for (std::size_t k = 1; k <= last_free; ++k) {
        const double amplitude = std::abs(spectrum[k]);
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        spectrum[k] = std::polar(amplitude, phase);
    }
    if (n % 2 == 0) spectrum[n / 2] = {spectrum[n / 2].real(), 0.0};

    auto out = detail::backward_real_dft(spectrum, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : out) x = x * inv_n + m;
    return out;
}

std::vector<double> make_surrogate(std::span<const double> series, const SurrogateSpec& spec,
                                   std::size_t index) {
    const auto seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
    return spec.kind == SurrogateKind::shuffle ? shuffle(series, seed)
                                               : phase_randomize(series, seed);
}

SurrogateBand surrogate_band(std::span<const double> series, const SurrogateSpec& spec,
                             const DfaConfig& dfa) {
    spec.validate();
    dfa.validate();
    SurrogateBand band;
    band.spec = spec;
    band.hurst_values.resize(spec.count);
    parallel_for(spec.count, [&](std::size_t k) {
        band.hurst_values[k] = dfa_hurst(make_surrogate(series, spec, k), dfa).hurst;
    });

    band.mean = mean(band.hurst_values);
    if (spec.count >= 2) band.std = std::sqrt(sample_variance(band.hurst_values));
    auto sorted = band.hurst_values;
    std::sort(sorted.begin(), sorted.end());
    band.q05 = quantile_sorted(sorted, 0.05);
    band.q25 = quantile_sorted(sorted, 0.25);
    band.median = quantile_sorted(sorted, 0.50);
    band.q75 = quantile_sorted(sorted, 0.75);
    band.q95 = quantile_sorted(sorted, 0.95);
    return band;
}

}  // namespace flowmem
