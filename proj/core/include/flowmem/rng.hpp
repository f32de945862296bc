#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace flowmem {

/// Name recorded in output metadata. Bump the suffix whenever the bit stream
/// produced for a given seed changes.
inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64/box-muller/v1";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stable 64-bit hash of a label (FNV-1a), used to derive per-stage seeds.
std::uint64_t hash_label(std::string_view label) noexcept;

/// Seed for the stream identified by (seed, index). Stream k can be
/// reproduced without generating streams 0..k-1.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

/// Deterministic random source. The raw engine is std::mt19937_64, whose
/// output sequence is fixed by the standard; the variate transforms below
/// are implemented here (the std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_seed(seed, index));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal (Box-Muller, second variate cached).
    double normal();

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace flowmem
