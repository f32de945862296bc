#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flowmem/flows.hpp"
#include "flowmem/stats.hpp"

namespace flowmem {

enum class GeneratorKind { fgn, fbm_increments_cumsum, iid_gaussian, pareto };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& token);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::fgn;
    double hurst = 0.5;  ///< fgn / fbm_increments_cumsum, in (0, 1)
    double alpha = 2.0;  ///< pareto, > 0
    std::size_t n = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Autocovariance of unit-variance fGn at lag k:
/// 0.5 (|k+1|^2H - 2|k|^2H + |k-1|^2H).
double fgn_autocovariance(double hurst, std::size_t lag);

/// Exact fractional Gaussian noise by circulant embedding (Davies-Harte)
/// on an embedding of size 2M, M the smallest power of two >= n. Falls back
/// to fgn_hosking if the embedding has a negative eigenvalue.
std::vector<double> fgn(double hurst, std::size_t n, std::uint64_t seed);

/// Exact fGn by the sequential Durbin-Levinson (Hosking) recursion, O(n^2).
std::vector<double> fgn_hosking(double hurst, std::size_t n, std::uint64_t seed);

/// Prefix sum.
std::vector<double> cumsum(std::span<const double> series);

/// x = u^(-1/alpha) with u uniform on (0, 1); support [1, inf).
std::vector<double> pareto(double alpha, std::size_t n, std::uint64_t seed);

std::vector<double> iid_gaussian(std::size_t n, std::uint64_t seed);

std::vector<double> generate(const GeneratorSpec& spec);


/// Consecutive Monday-Friday dates starting at `start` (YYYY-MM-DD; moved
/// forward to a weekday if needed).
std::vector<std::string> business_day_calendar(const std::string& start, std::size_t count);

/// Generator for one investor group's BUY and SELL amounts:
/// amount_t = level * exp(volatility * z_t), z the generator output
/// standardized to zero mean and unit variance (pareto: amount = level * x).
struct GroupGenerator {
    Group group = Group::retail;
    GeneratorKind kind = GeneratorKind::fgn;
    double hurst = 0.5;
    double alpha = 2.5;
    double level = 1.0e9;
    double volatility = 0.5;
};

/// BUY and SELL of each group use independent streams derived from seed.
FlowPanel synthetic_flow_panel(std::span<const GroupGenerator> groups, std::size_t n,
                               std::uint64_t seed, const std::string& start_date = "2015-01-02");

/// Geometric random walk of n prices with i.i.d. Gaussian log returns.
PriceSeries synthetic_prices(std::span<const std::string> calendar, std::uint64_t seed,
                             double daily_vol = 0.01, double start_price = 2000.0);

}  // namespace flowmem
