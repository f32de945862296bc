#include "flowmem/rolling.hpp"

#include <algorithm>
#include <cmath>

#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"
#include "flowmem/parallel.hpp"

namespace flowmem {

void RollingConfig::validate() const {
    if (window < 2) throw Error("rolling window must be >= 2");
    if (step < 1) throw Error("rolling step must be >= 1");
}

void RegimeWindow::validate() const {
    if (!(start_date < end_date)) {
        throw Error("regime window '" + label + "': start date must precede end date");
    }
}

RollingHurst rolling_hurst(std::span<const double> values, std::span<const std::string> calendar,
                           const RollingConfig& rolling, const DfaConfig& dfa) {
    rolling.validate();
    dfa.validate();
    if (values.size() != calendar.size()) throw Error("rolling: values and calendar differ in length");
    if (values.size() < rolling.window) {
        throw Error("rolling: series length " + std::to_string(values.size()) +
                    " shorter than window " + std::to_string(rolling.window));
    }
    const auto grid = make_scale_grid(rolling.window, dfa);
    if (grid.size() < 4) {
        throw Error("rolling: window " + std::to_string(rolling.window) +
                    " yields fewer than 4 DFA scales");
    }

    const std::size_t count = (values.size() - rolling.window) / rolling.step + 1;
    RollingHurst out;
    out.window = rolling.window;
    out.step = rolling.step;
    out.entries.resize(count);

    parallel_for(count, [&](std::size_t w) {
        const std::size_t start = w * rolling.step;
        const std::size_t end = start + rolling.window - 1;
        RollingEntry& entry = out.entries[w];
        entry.end_index = end;
        entry.end_date = calendar[end];
        try {
            entry.fit = dfa_hurst(values.subspan(start, rolling.window), dfa);
        } catch (const Error& e) {
            entry.error = e.what();
        }
    });
    return out;
}

RollingHurst rolling_hurst(const LabeledSeries& series, const RollingConfig& rolling,
                           const DfaConfig& dfa) {
    auto out = rolling_hurst(series.values, series.calendar, rolling, dfa);
    out.label = series.key;
    return out;
}

std::vector<RegimeSummary> regime_summary(const RollingHurst& rolling,
                                          std::span<const RegimeWindow> windows) {
    std::vector<RegimeSummary> out;
    out.reserve(windows.size());
    for (const auto& window : windows) {
        window.validate();
        RegimeSummary summary;
        summary.label = window.label;
        std::vector<double> hs;
        for (const auto& e : rolling.entries) {
            if (e.is_gap()) continue;
            if (e.end_date < window.start_date || e.end_date > window.end_date) continue;
            hs.push_back(e.fit->hurst);
        }
        summary.n_obs = hs.size();
        if (!hs.empty()) {
            summary.mean_h = mean(hs);
            summary.std_h = std::sqrt(population_variance(hs));
            const auto [lo, hi] = std::minmax_element(hs.begin(), hs.end());
            summary.min_h = *lo;
            summary.max_h = *hi;
        }
        out.push_back(std::move(summary));
    }
    return out;
}

}  // namespace flowmem
