#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowmem/dfa.hpp"
#include "flowmem/flows.hpp"

namespace flowmem {

/// Window length and step, both in trading days (calendar positions).
struct RollingConfig {
    std::size_t window = 250;
    std::size_t step = 5;

    void validate() const;
    bool operator==(const RollingConfig&) const = default;
};

/// One window's estimate, stamped with the window's final calendar date.
/// A window whose DFA failed is kept as a gap: fit is empty and error holds
/// the reason.
struct RollingEntry {
    std::string end_date;
    std::size_t end_index = 0;  ///< 0-based position of end_date in the series calendar
    std::optional<DfaFit> fit;
    std::string error;

    bool is_gap() const noexcept { return !fit.has_value(); }
    bool operator==(const RollingEntry&) const = default;
};

struct RollingHurst {
    std::vector<RollingEntry> entries;
    std::size_t window = 250;
    std::size_t step = 5;
    SeriesKey label;

    bool operator==(const RollingHurst&) const = default;
};

/// Static DFA on windows starting at positions 0, s, 2s, ... that fit
/// entirely inside the series. Throws if the series is shorter than the
/// window or the window cannot support a 4-point scale grid.
RollingHurst rolling_hurst(const LabeledSeries& series, const RollingConfig& rolling = {},
                           const DfaConfig& dfa = {});

/// Convenience overload for unlabeled data.
RollingHurst rolling_hurst(std::span<const double> values, std::span<const std::string> calendar,
                           const RollingConfig& rolling = {}, const DfaConfig& dfa = {});

struct RegimeWindow {
    std::string label;
    std::string start_date;
    std::string end_date;

    void validate() const;
    bool operator==(const RegimeWindow&) const = default;
};

/// Level and dispersion of H inside one regime window. Statistics are
/// empty when no non-gap entry falls inside the window. std is the
/// population standard deviation.
struct RegimeSummary {
    std::string label;
    std::size_t n_obs = 0;
    std::optional<double> mean_h;
    std::optional<double> std_h;
    std::optional<double> min_h;
    std::optional<double> max_h;

    bool operator==(const RegimeSummary&) const = default;
};

/// Summarizes entries with start_date <= end_date <= window end.
std::vector<RegimeSummary> regime_summary(const RollingHurst& rolling,
                                          std::span<const RegimeWindow> windows);

}  // namespace flowmem
