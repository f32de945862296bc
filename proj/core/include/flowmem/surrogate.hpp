#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowmem/dfa.hpp"

namespace flowmem {

enum class SurrogateKind { shuffle, phase_randomize };

std::string to_string(SurrogateKind kind);
SurrogateKind parse_surrogate_kind(const std::string& token);

struct SurrogateSpec {
    SurrogateKind kind = SurrogateKind::shuffle;
    std::uint64_t seed = 0;
    std::size_t count = 1;

    void validate() const;
    bool operator==(const SurrogateSpec&) const = default;
};

/// Fisher-Yates permutation driven by Rng(seed).
std::vector<double> shuffle(std::span<const double> series, std::uint64_t seed);

/// Fourier phase randomization of the mean-removed series: amplitudes are
/// kept, phases of bins 1..ceil(n/2)-1 are redrawn uniformly, the DC and
/// (even n) Nyquist bins stay real, and the mean is added back. n >= 4.
std::vector<double> phase_randomize(std::span<const double> series, std::uint64_t seed);

/// Surrogate k of a spec; seeded by derive_seed(spec.seed, k).
std::vector<double> make_surrogate(std::span<const double> series, const SurrogateSpec& spec,
                                   std::size_t index);

struct SurrogateBand {
    SurrogateSpec spec;
    std::vector<double> hurst_values;  ///< ordered by surrogate index
    double mean = 0.0;
    std::optional<double> std;         ///< sample std; empty when count == 1
    double q05 = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;

    bool operator==(const SurrogateBand&) const = default;
};

/// dfa_hurst over spec.count surrogates of series.
SurrogateBand surrogate_band(std::span<const double> series, const SurrogateSpec& spec,
                             const DfaConfig& dfa = {});

}  // namespace flowmem
